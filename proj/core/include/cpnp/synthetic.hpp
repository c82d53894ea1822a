#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cpnp/camera.hpp"
#include "cpnp/solver.hpp"

namespace cpnp {

/// Synthetic-scene recipe: a fixed camera pose, pinhole intrinsics, and a
/// camera-frame box from which 3D points are drawn uniformly. Defaults match
/// the standard benchmark setup (f = 800 px, 640x480 image, points in
/// [-2,2] x [-2,2] x [4,16] m).
struct ScenarioConfig {
  /// Applied as R = Rz(e2) * Ry(e1) * Rx(e0).
  Eigen::Vector3d euler_angles{1.0471975511965976, 1.0471975511965976,
                               1.0471975511965976};  // pi/3 each
  Eigen::Vector3d translation{2.0, 6.0, 6.0};
  double fx = 800.0;
  double fy = 800.0;
  double u0 = 320.0;
  double v0 = 240.0;
  double image_width = 640.0;
  double image_height = 480.0;
  Eigen::Vector3d region_min{-2.0, -2.0, 4.0};
  Eigen::Vector3d region_max{2.0, 2.0, 16.0};
  double sigma_pixels = 0.0;
  int n_points = 0;
  std::uint64_t seed = 0;

  CameraIntrinsics intrinsics() const;
  Pose truth_pose() const;
};

/// R = Rz(e2) * Ry(e1) * Rx(e0).
Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& euler);

/// Draws camera-frame points uniformly from the config region, keeps those
/// whose noise-free projection lands inside the image until exactly n_points
/// survive, maps them to the world frame via p_w = R^T (p_c - t), and adds
/// i.i.d. Gaussian pixel noise (truncated at 8 sigma). Deterministic given
/// the seed. Throws RegionNotVisible when 10*n_points draws all miss the
/// image, and TooFewPoints/EmptyInput for invalid configs.
struct Scene {
  Pose truth;
  CorrespondenceSet data;
};
Scene generate_scene(const ScenarioConfig& cfg);

/// sqrt(mean of squares). Throws EmptyInput on an empty list.
double rmse(const std::vector<double>& errors);

/// Stable per-trial RNG stream: hash of (base_seed, n, sigma, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, int n, double sigma,
                         int trial);

inline constexpr std::array<const char*, 3> kSolverNames = {
    "biased_ls", "cpnp", "cpnp_gn"};

/// One Monte Carlo trial: the three solvers run on the same correspondences.
struct SolverTrial {
  bool ok = false;
  double rot_error = 0.0;    // ||R_hat - R_true||_F
  double trans_error = 0.0;  // ||t_hat - t_true||
  double sigma2_hat = 0.0;   // 0 for the biased baseline
  double runtime_s = 0.0;
  std::string error;
};

struct TrialResult {
  std::uint64_t seed = 0;
  std::array<SolverTrial, 3> solvers;  // indexed like kSolverNames
};

TrialResult run_trial(const ScenarioConfig& cfg,
                      const CameraIntrinsics& intrinsics, const Scene& scene);

struct GridCell {
  int n = 0;
  double sigma = 0.0;
};

struct SolverCellStats {
  double rmse_R = 0.0;
  double rmse_t = 0.0;
  double mean_sigma2_hat = 0.0;
  double mean_runtime_s = 0.0;
  int failures = 0;
};

struct SweepCell {
  int n = 0;
  double sigma = 0.0;
  int trials = 0;
  std::array<SolverCellStats, 3> solvers;
  /// More than 5% of trials failed for some solver.
  bool flagged = false;
};

struct SlopeFit {
  std::string solver;
  double sigma = 0.0;
  double slope_R = 0.0;
  double slope_t = 0.0;
  std::vector<int> n_values;
};

struct SweepSummary {
  std::vector<SweepCell> cells;
  std::vector<SlopeFit> slopes;
  int trials = 0;
  std::uint64_t base_seed = 0;
};

/// Runs trials on every (n, sigma) cell with per-trial seeds derived from
/// hash(base_seed, n, sigma, trial); failures are excluded from the RMSE and
/// counted. Slopes are ordinary least squares on (log n, log RMSE) per sigma
/// per solver.
SweepSummary run_sweep(const std::vector<GridCell>& grid, int trials,
                       std::uint64_t base_seed,
                       const ScenarioConfig& base = {});

}  // namespace cpnp
