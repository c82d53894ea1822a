// Command-line front end: solve poses from correspondence files, generate
// synthetic scenes, and run Monte Carlo benchmark sweeps.
//
// Exit codes: 0 success, 1 input/parse error, 2 numerical/solver error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpnp/errors.hpp"
#include "cpnp/io.hpp"
#include "cpnp/solver.hpp"
#include "cpnp/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitSolverError = 2;

Eigen::Vector3d parse_vec3(const std::string& text, const std::string& flag) {
  const auto parts = [&] {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(item);
    }
    return out;
  }();
  if (parts.size() != 3) {
    throw CLI::ValidationError(flag, "expected three comma-separated numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    try {
      v(i) = std::stod(parts[static_cast<std::size_t>(i)]);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "malformed number '" + parts[static_cast<std::size_t>(i)] + "'");
    }
  }
  return v;
}

// Grid spec like "n=200,800,3200;sigma=2,5,10"; cells are the cross product
// in n-major order.
std::vector<cpnp::GridCell> parse_grid(const std::string& spec) {
  std::vector<int> ns;
  std::vector<double> sigmas;
  std::stringstream ss(spec);
  std::string group;
  while (std::getline(ss, group, ';')) {
    const auto eq = group.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--grid", "expected 'n=...;sigma=...'");
    }
    const std::string key = group.substr(0, eq);
    std::stringstream values(group.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
      try {
        if (key == "n") {
          ns.push_back(std::stoi(item));
        } else if (key == "sigma") {
          sigmas.push_back(std::stod(item));
        } else {
          throw CLI::ValidationError("--grid", "unknown key '" + key + "'");
        }
      } catch (const CLI::ValidationError&) {
        throw;
      } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "malformed number '" + item + "'");
      }
    }
  }
  if (ns.empty() || sigmas.empty()) {
    throw CLI::ValidationError("--grid", "need at least one n and one sigma");
  }
  std::vector<cpnp::GridCell> grid;
  for (const int n : ns) {
    for (const double sigma : sigmas) {
      grid.push_back({n, sigma});
    }
  }
  return grid;
}

int run_solve(const std::string& correspondences_path,
              const std::string& intrinsics_path, const std::string& out_path,
              bool no_gn) {
  const cpnp::CorrespondenceSet data =
      cpnp::read_correspondences_file(correspondences_path);
  const cpnp::CameraIntrinsics intrinsics =
      cpnp::read_intrinsics_file(intrinsics_path);

  cpnp::SolverOptions opts;
  opts.refine_gn = !no_gn;
  const cpnp::SolveReport report = cpnp::cpnp_solve(data, intrinsics, opts);
  const std::string json = cpnp::solve_report_json(report);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    cpnp::write_file_atomic(out_path, json);
  }
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return kExitOk;
}

int run_gen(const cpnp::ScenarioConfig& cfg, const std::string& prefix) {
  const cpnp::Scene scene = cpnp::generate_scene(cfg);

  std::ostringstream csv;
  cpnp::write_correspondences(csv, scene.data);
  cpnp::write_file_atomic(prefix + ".csv", csv.str());

  std::ostringstream intr;
  cpnp::write_intrinsics(intr, cfg.intrinsics());
  cpnp::write_file_atomic(prefix + ".intr", intr.str());

  cpnp::write_file_atomic(prefix + "_truth.json",
                          cpnp::truth_sidecar_json(cfg, scene.truth));
  std::cerr << "wrote " << prefix << ".csv, " << prefix << ".intr, " << prefix
            << "_truth.json\n";
  return kExitOk;
}

int run_bench(const std::string& grid_spec, int trials, std::uint64_t seed,
              const std::string& out_dir, bool timing) {
  const auto grid = parse_grid(grid_spec);
  cpnp::SweepSummary summary = cpnp::run_sweep(grid, trials, seed);
  if (!timing) {
    // Wall-clock means are not reproducible byte for byte; keep the column
    // but zero it unless timing output was asked for.
    for (auto& cell : summary.cells) {
      for (auto& solver : cell.solvers) {
        solver.mean_runtime_s = 0.0;
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ostringstream csv;
  cpnp::write_sweep_csv(csv, summary);
  cpnp::write_file_atomic(dir / "sweep.csv", csv.str());
  cpnp::write_file_atomic(dir / "sweep.json", cpnp::sweep_report_json(summary));

  std::cout << "solver      sigma   slope_rmse_R  slope_rmse_t\n";
  for (const auto& fit : summary.slopes) {
    std::cout << fit.solver;
    for (std::size_t pad = fit.solver.size(); pad < 12; ++pad) {
      std::cout << ' ';
    }
    std::cout << cpnp::format_double(fit.sigma) << "\t"
              << cpnp::format_double(fit.slope_R) << "\t"
              << cpnp::format_double(fit.slope_t) << "\n";
  }

  int total_cells = 0;
  int all_failed_cells = 0;
  for (const auto& cell : summary.cells) {
    ++total_cells;
    bool all_failed = true;
    for (const auto& solver : cell.solvers) {
      if (solver.failures < cell.trials) {
        all_failed = false;
      }
    }
    if (all_failed) {
      ++all_failed_cells;
    }
  }
  return (total_cells > 0 && all_failed_cells == total_cells) ? kExitSolverError
                                                              : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPnP: consistent Perspective-n-Point pose estimation"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand(
      "solve", "Estimate a pose from a correspondence CSV file");
  std::string correspondences_path;
  std::string intrinsics_path;
  std::string solve_out;
  bool no_gn = false;
  solve->add_option("correspondences", correspondences_path,
                    "CSV file with header x,y,z,u,v")
      ->required();
  solve->add_option("--intrinsics", intrinsics_path,
                    "intrinsics file (fx, fy, u0, v0)")
      ->required();
  solve->add_option("--out", solve_out,
                    "write the JSON report here instead of stdout");
  solve->add_flag("--no-gn", no_gn, "skip the Gauss-Newton refinement");

  // gen
  auto* gen = app.add_subcommand(
      "gen", "Generate a synthetic scene and its ground-truth sidecar");
  cpnp::ScenarioConfig cfg;
  std::string prefix = "scene";
  std::string euler_text;
  std::string translation_text;
  gen->add_option("--n", cfg.n_points, "number of visible points (>= 6)")
      ->required();
  gen->add_option("--sigma", cfg.sigma_pixels, "pixel noise std (>= 0)")
      ->capture_default_str();
  gen->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out-prefix", prefix, "output path prefix")
      ->capture_default_str();
  gen->add_option("--fx", cfg.fx)->capture_default_str();
  gen->add_option("--fy", cfg.fy)->capture_default_str();
  gen->add_option("--u0", cfg.u0)->capture_default_str();
  gen->add_option("--v0", cfg.v0)->capture_default_str();
  gen->add_option("--width", cfg.image_width)->capture_default_str();
  gen->add_option("--height", cfg.image_height)->capture_default_str();
  gen->add_option("--euler", euler_text,
                  "camera Euler angles x,y,z in radians (R = Rz Ry Rx)");
  gen->add_option("--translation", translation_text, "camera translation x,y,z");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Run a Monte Carlo sweep over an (n, sigma) grid");
  std::string grid_spec;
  int trials = 100;
  std::uint64_t bench_seed = 1;
  std::string out_dir;
  bool timing = false;
  bench->add_option("--grid", grid_spec, "e.g. 'n=200,800,3200;sigma=2,5,10,20'")
      ->required();
  bench->add_option("--trials", trials, "Monte Carlo trials per cell")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "base seed")->capture_default_str();
  bench->add_option("--out", out_dir, "output directory for sweep.csv/.json")
      ->required();
  bench->add_flag("--timing", timing,
                  "fill mean_runtime_s with measured wall clock (makes the "
                  "CSV bytes non-reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*solve) {
      return run_solve(correspondences_path, intrinsics_path, solve_out, no_gn);
    }
    if (*gen) {
      if (!euler_text.empty()) {
        cfg.euler_angles = parse_vec3(euler_text, "--euler");
      }
      if (!translation_text.empty()) {
        cfg.translation = parse_vec3(translation_text, "--translation");
      }
      if (cfg.n_points < 6 || cfg.sigma_pixels < 0.0) {
        std::cerr << "error: need --n >= 6 and --sigma >= 0\n";
        return kExitInputError;
      }
      return run_gen(cfg, prefix);
    }
    if (*bench) {
      if (trials < 1) {
        std::cerr << "error: need --trials >= 1\n";
        return kExitInputError;
      }
      return run_bench(grid_spec, trials, bench_seed, out_dir, timing);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const cpnp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const cpnp::Error& e) {
    std::cerr << "error [stage " << cpnp::stage_name(e.stage()) << "]: "
              << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
