#include "cpnp/synthetic.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "cpnp/errors.hpp"

namespace cpnp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& euler) {
  return (Eigen::AngleAxisd(euler.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(euler.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(euler.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

CameraIntrinsics ScenarioConfig::intrinsics() const {
  CameraIntrinsics intr;
  intr.fx = fx;
  intr.fy = fy;
  intr.u0 = u0;
  intr.v0 = v0;
  intr.image_width = image_width;
  intr.image_height = image_height;
  return intr;
}

Pose ScenarioConfig::truth_pose() const {
  return Pose{rotation_from_euler(euler_angles), translation};
}

Scene generate_scene(const ScenarioConfig& cfg) {
  if (cfg.n_points < 6) {
    throw TooFewPoints(static_cast<std::size_t>(std::max(cfg.n_points, 0)));
  }
  if (cfg.sigma_pixels < 0.0 ||
      (cfg.region_max - cfg.region_min).minCoeff() <= 0.0) {
    throw EmptyInput("invalid scenario: need sigma >= 0 and a positive-volume region");
  }
  if (cfg.region_min.z() <= 0.0) {
    throw EmptyInput("point region must lie in front of the camera (z > 0)");
  }

  const CameraIntrinsics intr = cfg.intrinsics();
  const Pose truth = cfg.truth_pose();
  const Eigen::Matrix<double, 2, 3> we = intr.we();
  const Eigen::Vector2d pp = intr.principal_point();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(cfg.region_min.x(), cfg.region_max.x());
  std::uniform_real_distribution<double> uy(cfg.region_min.y(), cfg.region_max.y());
  std::uniform_real_distribution<double> uz(cfg.region_min.z(), cfg.region_max.z());

  Scene scene;
  scene.truth = truth;
  scene.data.points_world.reserve(static_cast<std::size_t>(cfg.n_points));
  scene.data.pixels.reserve(static_cast<std::size_t>(cfg.n_points));

  const std::int64_t probe_budget = 10LL * cfg.n_points;
  std::int64_t draws = 0;
  while (scene.data.size() < static_cast<std::size_t>(cfg.n_points)) {
    const Eigen::Vector3d p_cam(ux(rng), uy(rng), uz(rng));
    ++draws;
    const Eigen::Vector2d q = we * p_cam / p_cam.z() + pp;
    const bool visible = q.x() >= 0.0 && q.x() <= cfg.image_width &&
                         q.y() >= 0.0 && q.y() <= cfg.image_height;
    if (visible) {
      scene.data.points_world.push_back(truth.R.transpose() *
                                        (p_cam - truth.t));
      scene.data.pixels.push_back(q);
    } else if (draws >= probe_budget && scene.data.size() == 0) {
      throw RegionNotVisible();
    }
  }

  if (cfg.sigma_pixels > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.sigma_pixels);
    const double clip = 8.0 * cfg.sigma_pixels;
    for (auto& q : scene.data.pixels) {
      q.x() += std::clamp(noise(rng), -clip, clip);
      q.y() += std::clamp(noise(rng), -clip, clip);
    }
  }
  return scene;
}

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) {
    throw EmptyInput("rmse of an empty list");
  }
  double sum_sq = 0.0;
  for (const double e : errors) {
    sum_sq += e * e;
  }
  return std::sqrt(sum_sq / static_cast<double>(errors.size()));
}

std::uint64_t trial_seed(std::uint64_t base_seed, int n, double sigma,
                         int trial) {
  std::uint64_t h = splitmix64(base_seed ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(sigma));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

TrialResult run_trial(const ScenarioConfig& cfg,
                      const CameraIntrinsics& intrinsics, const Scene& scene) {
  TrialResult result;
  result.seed = cfg.seed;

  auto record = [&](int slot, auto&& run) {
    SolverTrial& trial = result.solvers[static_cast<std::size_t>(slot)];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto [pose, sigma2] = run();
      trial.runtime_s = seconds_since(start);
      trial.rot_error = (pose.R - scene.truth.R).norm();
      trial.trans_error = (pose.t - scene.truth.t).norm();
      trial.sigma2_hat = sigma2;
      trial.ok = true;
    } catch (const Error& e) {
      trial.runtime_s = seconds_since(start);
      trial.error = e.what();
    }
  };

  record(0, [&] {
    const NormalEquations ne = build_normal_equations(scene.data, intrinsics);
    const RecoveredPose rec = recover_pose(solve_biased(ne), ne.centroid);
    return std::pair<Pose, double>(rec.pose, 0.0);
  });
  record(1, [&] {
    SolverOptions opts;
    opts.refine_gn = false;
    const SolveReport report = cpnp_solve(scene.data, intrinsics, opts);
    return std::pair<Pose, double>(report.pose_be, report.variance.sigma2_hat);
  });
  record(2, [&] {
    const SolveReport report = cpnp_solve(scene.data, intrinsics, {});
    return std::pair<Pose, double>(report.pose_gn, report.variance.sigma2_hat);
  });
  return result;
}

SweepSummary run_sweep(const std::vector<GridCell>& grid, int trials,
                       std::uint64_t base_seed, const ScenarioConfig& base) {
  if (trials < 1) {
    throw EmptyInput("run_sweep needs at least one trial");
  }

  SweepSummary summary;
  summary.trials = trials;
  summary.base_seed = base_seed;

  for (const GridCell& cell : grid) {
    SweepCell out;
    out.n = cell.n;
    out.sigma = cell.sigma;
    out.trials = trials;

    std::array<std::vector<double>, 3> rot_errors;
    std::array<std::vector<double>, 3> trans_errors;
    std::array<double, 3> sigma2_sum{};
    std::array<double, 3> runtime_sum{};

    for (int t = 0; t < trials; ++t) {
      ScenarioConfig cfg = base;
      cfg.n_points = cell.n;
      cfg.sigma_pixels = cell.sigma;
      cfg.seed = trial_seed(base_seed, cell.n, cell.sigma, t);
      const Scene scene = generate_scene(cfg);
      const TrialResult trial = run_trial(cfg, cfg.intrinsics(), scene);
      for (std::size_t s = 0; s < 3; ++s) {
        const SolverTrial& st = trial.solvers[s];
        if (st.ok) {
          rot_errors[s].push_back(st.rot_error);
          trans_errors[s].push_back(st.trans_error);
          sigma2_sum[s] += st.sigma2_hat;
          runtime_sum[s] += st.runtime_s;
        } else {
          out.solvers[s].failures += 1;
        }
      }
    }

    for (std::size_t s = 0; s < 3; ++s) {
      SolverCellStats& stats = out.solvers[s];
      const auto succeeded = rot_errors[s].size();
      if (succeeded > 0) {
        stats.rmse_R = rmse(rot_errors[s]);
        stats.rmse_t = rmse(trans_errors[s]);
        stats.mean_sigma2_hat = sigma2_sum[s] / static_cast<double>(succeeded);
        stats.mean_runtime_s = runtime_sum[s] / static_cast<double>(succeeded);
      }
      if (stats.failures * 20 > trials) {  // > 5%
        out.flagged = true;
      }
    }
    summary.cells.push_back(std::move(out));
  }

  // Slope of log RMSE against log n, one fit per (solver, sigma).
  std::map<double, std::vector<const SweepCell*>> by_sigma;
  for (const SweepCell& cell : summary.cells) {
    by_sigma[cell.sigma].push_back(&cell);
  }
  for (const auto& [sigma, cells] : by_sigma) {
    if (cells.size() < 2) {
      continue;
    }
    for (std::size_t s = 0; s < 3; ++s) {
      SlopeFit fit;
      fit.solver = kSolverNames[s];
      fit.sigma = sigma;
      std::vector<double> log_n, log_rmse_R, log_rmse_t;
      for (const SweepCell* cell : cells) {
        const SolverCellStats& stats = cell->solvers[s];
        if (stats.rmse_R > 0.0 && stats.rmse_t > 0.0) {
          log_n.push_back(std::log(static_cast<double>(cell->n)));
          log_rmse_R.push_back(std::log(stats.rmse_R));
          log_rmse_t.push_back(std::log(stats.rmse_t));
          fit.n_values.push_back(cell->n);
        }
      }
      if (log_n.size() < 2) {
        continue;
      }
      const auto ols_slope = [&](const std::vector<double>& y) {
        const double n = static_cast<double>(log_n.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
          mx += log_n[i];
          my += y[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
          sxy += (log_n[i] - mx) * (y[i] - my);
          sxx += (log_n[i] - mx) * (log_n[i] - mx);
        }
        return sxy / sxx;
      };
      fit.slope_R = ols_slope(log_rmse_R);
      fit.slope_t = ols_slope(log_rmse_t);
      summary.slopes.push_back(std::move(fit));
    }
  }
  return summary;
}

}  // namespace cpnp
