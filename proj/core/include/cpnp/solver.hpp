#pragma once

#include <string>
#include <vector>

#include "cpnp/camera.hpp"
#include "cpnp/gauss_newton.hpp"
#include "cpnp/linear_system.hpp"
#include "cpnp/variance.hpp"

namespace cpnp {

struct SolverOptions {
  /// Run the constrained Gauss-Newton refinement (step 6).
  bool refine_gn = true;
  GnOptions gn;
};

/// Pose recovered from theta: alpha from the sign-preserving cube root of the
/// rotation-block determinant, rotation projected onto SO(3).
struct RecoveredPose {
  double alpha = 0.0;
  Pose pose;
  /// Rotation block divided by alpha, before the SO(3) projection.
  Eigen::Matrix3d rotation_raw = Eigen::Matrix3d::Identity();
  double raw_det = 0.0;
  /// ||projected - raw||_F.
  double projection_delta = 0.0;
};

struct SolveTiming {
  double build_ms = 0.0;
  double variance_ms = 0.0;
  double solve_ms = 0.0;
  double gn_ms = 0.0;
  double total_ms = 0.0;
};

struct SolveReport {
  std::int64_t n = 0;
  VarianceEstimate variance;
  double alpha = 0.0;
  ThetaVector theta_be = ThetaVector::Zero();
  Pose pose_be;
  Pose pose_gn;
  bool gn_ran = false;
  int gn_iterations = 0;
  double cost_be = 0.0;
  double cost_gn = 0.0;
  double condition_AtA = 0.0;
  double min_eig_corrected = 0.0;
  double raw_rotation_det = 0.0;
  double so3_projection_delta = 0.0;
  std::vector<std::string> warnings;
  SolveTiming timing;
};

/// Ordinary least squares theta = (A^T A)^{-1} A^T b; the uncorrected
/// DLT-style baseline. Throws IllConditionedSystem when cond(A^T A) >= 1e12.
ThetaVector solve_biased(const NormalEquations& ne);
ThetaVector solve_biased(const LinearSystem& sys);

/// Bias-eliminated solution
///   theta = (A^T A - sigma2 G^T G)^{-1} (A^T b - sigma2 G^T 1).
/// Throws CorrectedMatrixNotPD when the corrected normal matrix is not
/// positive definite.
ThetaVector solve_bias_eliminated(const NormalEquations& ne,
                                  const VarianceEstimate& var);
ThetaVector solve_bias_eliminated(const LinearSystem& sys,
                                  const VarianceEstimate& var);

/// Recovers (alpha, R, t) from theta and the point centroid; the returned
/// rotation is the SO(3) projection of the raw block, which is kept alongside
/// for diagnostics. Throws DegenerateTheta when |det| <= 1e-12.
RecoveredPose recover_pose(const ThetaVector& theta,
                           const Eigen::Vector3d& centroid);

/// cond(A^T A) from its eigenvalue extremes (diagnostics and guards).
double normal_matrix_condition(const NormalEquations& ne);

/// Full CPnP pipeline: center pixels, estimate the noise variance, solve the
/// bias-eliminated system, recover the pose, project onto SO(3), and
/// optionally refine with guarded Gauss-Newton iterations.
SolveReport cpnp_solve(const CorrespondenceSet& data,
                       const CameraIntrinsics& intrinsics,
                       const SolverOptions& opts = {});

}  // namespace cpnp
