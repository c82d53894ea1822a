#include "cpnp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cpnp/errors.hpp"

namespace cpnp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_finite_double(const std::string& token, const std::string& path,
                           int line) {
  const std::string t = trim(token);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty() || !std::isfinite(value)) {
    throw ParseError(path, line, "malformed number '" + token + "'");
  }
  return value;
}

ordered_json pose_json(const Pose& pose) {
  ordered_json j;
  j["R"] = {pose.R(0, 0), pose.R(0, 1), pose.R(0, 2),
            pose.R(1, 0), pose.R(1, 1), pose.R(1, 2),
            pose.R(2, 0), pose.R(2, 1), pose.R(2, 2)};
  j["t"] = {pose.t.x(), pose.t.y(), pose.t.z()};
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

CorrespondenceSet read_correspondences(std::istream& in,
                                       const std::string& path) {
  CorrespondenceSet data;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty()) {
      continue;
    }
    if (!saw_header) {
      if (content != "x,y,z,u,v") {
        throw ParseError(path, line_no, "expected header 'x,y,z,u,v'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split(content, ',');
    if (fields.size() != 5) {
      throw ParseError(path, line_no,
                       "expected 5 comma-separated values, got " +
                           std::to_string(fields.size()));
    }
    Eigen::Vector3d p;
    Eigen::Vector2d q;
    for (int k = 0; k < 3; ++k) {
      p(k) = parse_finite_double(fields[static_cast<std::size_t>(k)], path, line_no);
    }
    for (int k = 0; k < 2; ++k) {
      q(k) = parse_finite_double(fields[static_cast<std::size_t>(3 + k)], path, line_no);
    }
    data.points_world.push_back(p);
    data.pixels.push_back(q);
  }
  if (!saw_header) {
    throw ParseError(path, 0, "empty correspondence file");
  }
  return data;
}

CorrespondenceSet read_correspondences_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path.string(), 0, "cannot open file");
  }
  return read_correspondences(in, path.string());
}

void write_correspondences(std::ostream& out, const CorrespondenceSet& data) {
  out << "x,y,z,u,v\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = data.points_world[i];
    const auto& q = data.pixels[i];
    out << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << ',' << format_double(q.x()) << ','
        << format_double(q.y()) << '\n';
  }
}

CameraIntrinsics read_intrinsics(std::istream& in, const std::string& path) {
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string content = line;
    if (const auto hash = content.find('#'); hash != std::string::npos) {
      content = content.substr(0, hash);
    }
    content = trim(content);
    if (content.empty()) {
      continue;
    }
    std::string key, value;
    if (const auto eq = content.find('='); eq != std::string::npos) {
      key = trim(content.substr(0, eq));
      value = content.substr(eq + 1);
    } else {
      const auto space = content.find_first_of(" \t");
      if (space == std::string::npos) {
        throw ParseError(path, line_no, "expected 'key value'");
      }
      key = content.substr(0, space);
      value = content.substr(space + 1);
    }
    if (key != "fx" && key != "fy" && key != "u0" && key != "v0" &&
        key != "width" && key != "height") {
      throw ParseError(path, line_no, "unknown key '" + key + "'");
    }
    if (values.count(key) != 0) {
      throw ParseError(path, line_no, "duplicate key '" + key + "'");
    }
    values[key] = parse_finite_double(value, path, line_no);
  }
  for (const char* required : {"fx", "fy", "u0", "v0"}) {
    if (values.count(required) == 0) {
      throw ParseError(path, 0, std::string("missing required key '") +
                                    required + "'");
    }
  }
  CameraIntrinsics intr;
  intr.fx = values["fx"];
  intr.fy = values["fy"];
  intr.u0 = values["u0"];
  intr.v0 = values["v0"];
  if (values.count("width") != 0) {
    intr.image_width = values["width"];
  }
  if (values.count("height") != 0) {
    intr.image_height = values["height"];
  }
  if (!intr.valid() || intr.u0 < 0.0 || intr.v0 < 0.0) {
    throw ParseError(path, 0, "need fx > 0, fy > 0, u0 >= 0, v0 >= 0");
  }
  return intr;
}

CameraIntrinsics read_intrinsics_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path.string(), 0, "cannot open file");
  }
  return read_intrinsics(in, path.string());
}

void write_intrinsics(std::ostream& out, const CameraIntrinsics& intrinsics) {
  out << "fx " << format_double(intrinsics.fx) << '\n'
      << "fy " << format_double(intrinsics.fy) << '\n'
      << "u0 " << format_double(intrinsics.u0) << '\n'
      << "v0 " << format_double(intrinsics.v0) << '\n';
  if (intrinsics.image_width) {
    out << "width " << format_double(*intrinsics.image_width) << '\n';
  }
  if (intrinsics.image_height) {
    out << "height " << format_double(*intrinsics.image_height) << '\n';
  }
}

std::string solve_report_json(const SolveReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["sigma2_hat"] = report.variance.sigma2_hat;
  j["sigma2_min_root_raw"] = report.variance.min_root_raw;
  j["alpha"] = report.alpha;
  j["pose_be"] = pose_json(report.pose_be);
  j["cost_be"] = report.cost_be;
  if (report.gn_ran) {
    j["pose_gn"] = pose_json(report.pose_gn);
    j["cost_gn"] = report.cost_gn;
    j["gn_iterations"] = report.gn_iterations;
  }
  j["condition_AtA"] = report.condition_AtA;
  j["min_eig_corrected"] = report.min_eig_corrected;
  j["raw_rotation_det"] = report.raw_rotation_det;
  j["so3_projection_delta"] = report.so3_projection_delta;
  j["warnings"] = report.warnings;
  j["timing_ms"] = {{"build", report.timing.build_ms},
                    {"variance", report.timing.variance_ms},
                    {"solve", report.timing.solve_ms},
                    {"gn", report.timing.gn_ms},
                    {"total", report.timing.total_ms}};
  return j.dump(2) + "\n";
}

std::string truth_sidecar_json(const ScenarioConfig& cfg, const Pose& truth) {
  ordered_json j;
  j["n"] = cfg.n_points;
  j["sigma"] = cfg.sigma_pixels;
  j["seed"] = cfg.seed;
  j["pose"] = pose_json(truth);
  j["euler_zyx"] = {cfg.euler_angles.x(), cfg.euler_angles.y(),
                    cfg.euler_angles.z()};
  j["intrinsics"] = {{"fx", cfg.fx},       {"fy", cfg.fy},
                     {"u0", cfg.u0},       {"v0", cfg.v0},
                     {"width", cfg.image_width}, {"height", cfg.image_height}};
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const SweepSummary& summary) {
  out << "solver,n,sigma,rmse_R,rmse_t,mean_sigma2_hat,mean_runtime_s,trials,"
         "failures\n";
  for (const SweepCell& cell : summary.cells) {
    for (std::size_t s = 0; s < kSolverNames.size(); ++s) {
      const SolverCellStats& stats = cell.solvers[s];
      out << kSolverNames[s] << ',' << cell.n << ','
          << format_double(cell.sigma) << ',' << format_double(stats.rmse_R)
          << ',' << format_double(stats.rmse_t) << ','
          << format_double(stats.mean_sigma2_hat) << ','
          << format_double(stats.mean_runtime_s) << ',' << cell.trials << ','
          << stats.failures << '\n';
    }
  }
}

std::string sweep_report_json(const SweepSummary& summary) {
  ordered_json j;
  j["base_seed"] = summary.base_seed;
  j["trials"] = summary.trials;
  j["cells"] = ordered_json::array();
  for (const SweepCell& cell : summary.cells) {
    ordered_json c;
    c["n"] = cell.n;
    c["sigma"] = cell.sigma;
    c["flagged"] = cell.flagged;
    for (std::size_t s = 0; s < kSolverNames.size(); ++s) {
      const SolverCellStats& stats = cell.solvers[s];
      c[kSolverNames[s]] = {{"rmse_R", stats.rmse_R},
                            {"rmse_t", stats.rmse_t},
                            {"mean_sigma2_hat", stats.mean_sigma2_hat},
                            {"mean_runtime_s", stats.mean_runtime_s},
                            {"failures", stats.failures}};
    }
    j["cells"].push_back(std::move(c));
  }
  j["slopes"] = ordered_json::array();
  for (const SlopeFit& fit : summary.slopes) {
    j["slopes"].push_back({{"solver", fit.solver},
                           {"sigma", fit.sigma},
                           {"slope_rmse_R", fit.slope_R},
                           {"slope_rmse_t", fit.slope_t},
                           {"n_values", fit.n_values}});
  }
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cpnp
