#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "cpnp/camera.hpp"

namespace cpnp {

using Vec11 = Eigen::Matrix<double, 11, 1>;
using Mat11 = Eigen::Matrix<double, 11, 11>;

/// The eliminated 11-parameter vector theta = alpha * [r3; r1; t1; r2; t2],
/// where r_k are the rows of R. Layout:
///   theta[0:3) = alpha*r3, theta[3:6) = alpha*r1, theta[6] = alpha*t1,
///   theta[7:10) = alpha*r2, theta[10] = alpha*t2.
using ThetaVector = Vec11;

/// Stacked regression system b = A theta + eps built from centered pixels,
/// plus the noise-sensitivity pattern G. Row pair for point i:
///   A(2i,:)   = [-u_i (p_i - pbar)^T, fx p_i^T, fx, 0 0 0 0]
///   A(2i+1,:) = [-v_i (p_i - pbar)^T, 0 0 0 0, fy p_i^T, fy]
///   G(2i,:) = G(2i+1,:) = [-(p_i - pbar)^T, 0_{1x8}]
struct LinearSystem {
  Eigen::MatrixXd A;  // 2n x 11
  Eigen::VectorXd b;  // 2n
  Eigen::MatrixXd G;  // 2n x 11
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();

  std::int64_t num_points() const { return A.rows() / 2; }
};

/// Gram-matrix form of a LinearSystem, accumulated in one streaming pass so
/// memory stays O(1) beyond the inputs. Everything the solver and the noise
/// variance estimator need lives here.
struct NormalEquations {
  Mat11 AtA = Mat11::Zero();
  Vec11 Atb = Vec11::Zero();
  double btb = 0.0;
  Mat11 GtG = Mat11::Zero();
  Vec11 Gt1 = Vec11::Zero();
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::int64_t n = 0;
};

/// Builds the explicit stacked system. Throws TooFewPoints for n < 6.
LinearSystem build_system(const CorrespondenceSet& data,
                          const CameraIntrinsics& intrinsics);

/// Streaming equivalent of build_system(...) followed by Gram products;
/// never materializes the 2n x 11 matrices.
NormalEquations build_normal_equations(const CorrespondenceSet& data,
                                       const CameraIntrinsics& intrinsics);

/// Gram form of an already-built explicit system.
NormalEquations normal_equations(const LinearSystem& sys);

/// Inverse of the pose recovery: theta = alpha [r3; r1; t1; r2; t2] for a
/// given scale. Used by forward-substitution oracles and roundtrip tests.
ThetaVector stack_theta(double alpha, const Pose& pose);

/// The scale that satisfies the elimination constraint
/// alpha * sum_i e3^T(R p_i + t) = n for ground-truth data.
double elimination_scale(const Pose& pose, const CorrespondenceSet& data);

}  // namespace cpnp
