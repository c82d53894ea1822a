#pragma once

#include <Eigen/Core>

#include "cpnp/camera.hpp"

namespace cpnp {

struct GnOptions {
  int max_iters = 5;
  /// Stop when ||[s; dt]|| drops to this.
  double step_tol = 1e-10;
  /// Stop when the relative cost decrease drops to this.
  double cost_tol = 1e-12;
  /// Initial Levenberg damping; 0 means plain Gauss-Newton steps. A rejected
  /// step retries with damping max(damping, 1e-6) growing 10x, at most 3
  /// times, scaled by the normal-matrix diagonal.
  double damping = 0.0;
};

/// Stacked derivative of the reprojection map at s = 0: columns 0-2 with
/// respect to the rotation tangent s, columns 3-5 with respect to t.
struct JacobianBlocks {
  Eigen::MatrixXd J;         // 2n x 6
  Eigen::VectorXd residual;  // b - f(R, t), centered pixels
};

struct GnResult {
  Pose pose;
  int iterations = 0;
  double final_cost = 0.0;
  double initial_cost = 0.0;
  int rejected_steps = 0;
  /// A point lost positive depth mid-iteration; pose is best-so-far.
  bool depth_warning = false;
};

/// d vec(exp(s^)) / d s^T at s = 0: the 9x3 constant whose k-th column is
/// vec of the k-th so(3) generator. Entries are in {-1, 0, 1}.
Eigen::Matrix<double, 9, 3> psi_matrix();

/// Row pair for point i:
///   df/ds^T = (h WE - g e3^T) (p^T kron R) Psi / h^2
///   df/dt^T = (h WE - g e3^T) / h^2
/// with g = WE(Rp + t), h = e3^T(Rp + t). Throws NonPositiveDepth when some
/// h <= depth_epsilon.
JacobianBlocks jacobian(const Pose& pose, const CameraIntrinsics& intrinsics,
                        const CorrespondenceSet& data);

/// Constrained Gauss-Newton refinement on SO(3) x R^3: solve the 6x6 normal
/// system for [s; dt], update R <- R exp(s^), t <- t + dt. Steps that would
/// increase the reprojection cost are rejected and retried with Levenberg
/// damping, so the reported final cost never exceeds the initial cost.
/// J^T J and J^T r are accumulated per point; nothing of size O(n) is stored.
GnResult gn_refine(const Pose& init, const CameraIntrinsics& intrinsics,
                   const CorrespondenceSet& data, const GnOptions& opts = {});

}  // namespace cpnp
