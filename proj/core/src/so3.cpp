#include "cpnp/so3.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cpnp/errors.hpp"

namespace cpnp {

namespace {
constexpr double kSmallAngle = 1e-8;
constexpr double kMinSingularValue = 1e-12;
}  // namespace

Eigen::Matrix3d hat(const So3Tangent& s) {
  Eigen::Matrix3d m;
  m << 0.0, -s.z(), s.y(),
       s.z(), 0.0, -s.x(),
      -s.y(), s.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const So3Tangent& s) {
  const double theta = s.norm();
  const Eigen::Matrix3d S = hat(s);
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * S + b * S * S;
}

double rotation_angle(const Eigen::Matrix3d& R) {
  const double c = std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double min_sv = svd.singularValues().minCoeff();
  if (min_sv <= kMinSingularValue) {
    throw DegenerateMatrix(min_sv);
  }
  const Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  const double d = (U * V.transpose()).determinant();
  return U * Eigen::Vector3d(1.0, 1.0, d).asDiagonal() * V.transpose();
}

double orthonormality_error(const Eigen::Matrix3d& R) {
  return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

}  // namespace cpnp
