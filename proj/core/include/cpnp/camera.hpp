#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <vector>

namespace cpnp {

/// Positive-depth guard used by every projection-like operation.
inline constexpr double kDepthEpsilon = 1e-12;

/// Calibrated pinhole intrinsics (matrix K). fx, fy, u0, v0 in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  /// Sensor bounds; only the synthetic generator uses them for visibility
  /// filtering.
  std::optional<double> image_width;
  std::optional<double> image_height;

  bool valid() const { return fx > 0.0 && fy > 0.0; }

  /// W = diag(fx, fy).
  Eigen::Matrix2d w() const {
    return Eigen::Vector2d(fx, fy).asDiagonal();
  }

  /// W*E: the 2x3 matrix mapping camera-frame points to scaled image rows.
  Eigen::Matrix<double, 2, 3> we() const {
    Eigen::Matrix<double, 2, 3> m;
    m << fx, 0.0, 0.0,
         0.0, fy, 0.0;
    return m;
  }

  Eigen::Vector2d principal_point() const { return {u0, v0}; }
};

/// World-to-camera rigid transform: p_c = R p_w + t.
struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  double depth_of(const Eigen::Vector3d& p_world) const {
    return R.row(2).dot(p_world) + t.z();
  }
};

/// Paired 3D world points (meters) and 2D pixel observations (raw pixels).
struct CorrespondenceSet {
  std::vector<Eigen::Vector3d> points_world;
  std::vector<Eigen::Vector2d> pixels;

  std::size_t size() const { return points_world.size(); }
  bool consistent() const { return points_world.size() == pixels.size(); }

  Eigen::Vector3d centroid() const;
};

/// Pinhole projection q = W E (Rp + t) / (e3^T(Rp + t)) + [u0; v0].
/// Throws NonPositiveDepth when the depth is <= kDepthEpsilon.
Eigen::Vector2d project(const Pose& pose, const CameraIntrinsics& intrinsics,
                        const Eigen::Vector3d& p_world);

/// q' = q - [u0; v0].
Eigen::Vector2d centered_projection(const Eigen::Vector2d& q,
                                    const CameraIntrinsics& intrinsics);

/// Mean squared reprojection error (1/n) sum_i ||project(p_i) - q_i||^2.
/// NonPositiveDepth carries the offending point index.
double reprojection_cost(const Pose& pose, const CameraIntrinsics& intrinsics,
                         const CorrespondenceSet& data);

}  // namespace cpnp
