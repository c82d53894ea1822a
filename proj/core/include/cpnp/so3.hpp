#pragma once

#include <Eigen/Core>

namespace cpnp {

/// Rotation increment in the tangent space at a base rotation (axis-angle).
using So3Tangent = Eigen::Vector3d;

/// Skew-symmetric matrix s^ such that (s^)v = s x v.
Eigen::Matrix3d hat(const So3Tangent& s);

/// Rodrigues exponential map. Uses a second-order Taylor expansion of the
/// coefficients below |s| = 1e-8.
Eigen::Matrix3d so3_exp(const So3Tangent& s);

/// Rotation angle of R in [0, pi], from the trace.
double rotation_angle(const Eigen::Matrix3d& R);

/// Frobenius-nearest element of SO(3): U diag(1, 1, det(UV^T)) V^T from the
/// SVD of M. Throws DegenerateMatrix when the smallest singular value of M
/// is at or below 1e-12.
Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& M);

/// ||R^T R - I||_F, for rotation-validity checks.
double orthonormality_error(const Eigen::Matrix3d& R);

}  // namespace cpnp
