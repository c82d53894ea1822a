#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cpnp/camera.hpp"
#include "cpnp/solver.hpp"
#include "cpnp/synthetic.hpp"

namespace cpnp {

/// Malformed input file; line is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& what)
      : std::runtime_error(path + (line > 0 ? ":" + std::to_string(line) : "") +
                           ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Correspondence CSV: header "x,y,z,u,v", one row per correspondence, world
// coordinates in meters, pixels uncentered.
CorrespondenceSet read_correspondences(std::istream& in,
                                       const std::string& path = "<stream>");
CorrespondenceSet read_correspondences_file(const std::filesystem::path& path);
void write_correspondences(std::ostream& out, const CorrespondenceSet& data);

// Intrinsics as "key value" lines; keys fx, fy, u0, v0 required, width and
// height optional, '#' starts a comment. "key = value" is accepted on read.
CameraIntrinsics read_intrinsics(std::istream& in,
                                 const std::string& path = "<stream>");
CameraIntrinsics read_intrinsics_file(const std::filesystem::path& path);
void write_intrinsics(std::ostream& out, const CameraIntrinsics& intrinsics);

// Solve report as JSON: sigma2_hat, pose_be / pose_gn (R row-major, t),
// cost_be / cost_gn, n, condition numbers, warnings, timing_ms.
std::string solve_report_json(const SolveReport& report);

// Truth sidecar written next to generated scenes so harnesses can score
// estimates against the generating pose.
std::string truth_sidecar_json(const ScenarioConfig& cfg, const Pose& truth);

// Sweep results; columns are
// solver,n,sigma,rmse_R,rmse_t,mean_sigma2_hat,mean_runtime_s,trials,failures
// with rows in grid order, solvers ordered biased_ls, cpnp, cpnp_gn.
void write_sweep_csv(std::ostream& out, const SweepSummary& summary);
std::string sweep_report_json(const SweepSummary& summary);

/// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace cpnp
