#include "cpnp/camera.hpp"

#include "cpnp/errors.hpp"

namespace cpnp {

Eigen::Vector3d CorrespondenceSet::centroid() const {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points_world) {
    sum += p;
  }
  return sum / static_cast<double>(points_world.size());
}

Eigen::Vector2d project(const Pose& pose, const CameraIntrinsics& intrinsics,
                        const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p_cam = pose.R * p_world + pose.t;
  if (p_cam.z() <= kDepthEpsilon) {
    throw NonPositiveDepth(Stage::Projection, -1, p_cam.z());
  }
  return intrinsics.we() * p_cam / p_cam.z() + intrinsics.principal_point();
}

Eigen::Vector2d centered_projection(const Eigen::Vector2d& q,
                                    const CameraIntrinsics& intrinsics) {
  return q - intrinsics.principal_point();
}

double reprojection_cost(const Pose& pose, const CameraIntrinsics& intrinsics,
                         const CorrespondenceSet& data) {
  const std::size_t n = data.size();
  if (n == 0) {
    throw EmptyInput("reprojection_cost needs at least one correspondence");
  }
  const Eigen::Matrix<double, 2, 3> we = intrinsics.we();
  const Eigen::Vector2d pp = intrinsics.principal_point();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p_cam = pose.R * data.points_world[i] + pose.t;
    if (p_cam.z() <= kDepthEpsilon) {
      throw NonPositiveDepth(Stage::Projection,
                             static_cast<std::ptrdiff_t>(i), p_cam.z());
    }
    const Eigen::Vector2d q = we * p_cam / p_cam.z() + pp;
    sum += (q - data.pixels[i]).squaredNorm();
  }
  return sum / static_cast<double>(n);
}

}  // namespace cpnp
