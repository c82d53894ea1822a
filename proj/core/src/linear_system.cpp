#include "cpnp/linear_system.hpp"

#include "cpnp/errors.hpp"

namespace cpnp {

namespace {

constexpr std::size_t kMinPoints = 6;

void check_input(const CorrespondenceSet& data) {
  if (!data.consistent()) {
    throw EmptyInput("points_world and pixels differ in length");
  }
  if (data.size() < kMinPoints) {
    throw TooFewPoints(data.size());
  }
}

// Row pair of A and the shared G row for one correspondence.
struct PointRows {
  Vec11 a_u = Vec11::Zero();
  Vec11 a_v = Vec11::Zero();
  Vec11 g = Vec11::Zero();
  Eigen::Vector2d q_centered = Eigen::Vector2d::Zero();
};

PointRows make_rows(const Eigen::Vector3d& p, const Eigen::Vector2d& pixel,
                    const Eigen::Vector3d& centroid,
                    const CameraIntrinsics& intr) {
  PointRows rows;
  rows.q_centered = centered_projection(pixel, intr);
  const Eigen::Vector3d d = p - centroid;
  rows.a_u.segment<3>(0) = -rows.q_centered.x() * d;
  rows.a_u.segment<3>(3) = intr.fx * p;
  rows.a_u(6) = intr.fx;
  rows.a_v.segment<3>(0) = -rows.q_centered.y() * d;
  rows.a_v.segment<3>(7) = intr.fy * p;
  rows.a_v(10) = intr.fy;
  rows.g.segment<3>(0) = -d;
  return rows;
}

}  // namespace

LinearSystem build_system(const CorrespondenceSet& data,
                          const CameraIntrinsics& intrinsics) {
  check_input(data);
  const auto n = static_cast<Eigen::Index>(data.size());

  LinearSystem sys;
  sys.centroid = data.centroid();
  sys.A.setZero(2 * n, 11);
  sys.b.setZero(2 * n);
  sys.G.setZero(2 * n, 11);

  for (Eigen::Index i = 0; i < n; ++i) {
    const PointRows rows = make_rows(data.points_world[i], data.pixels[i],
                                     sys.centroid, intrinsics);
    sys.A.row(2 * i) = rows.a_u;
    sys.A.row(2 * i + 1) = rows.a_v;
    sys.b(2 * i) = rows.q_centered.x();
    sys.b(2 * i + 1) = rows.q_centered.y();
    sys.G.row(2 * i) = rows.g;
    sys.G.row(2 * i + 1) = rows.g;
  }
  return sys;
}

NormalEquations build_normal_equations(const CorrespondenceSet& data,
                                       const CameraIntrinsics& intrinsics) {
  check_input(data);
  NormalEquations ne;
  ne.n = static_cast<std::int64_t>(data.size());
  ne.centroid = data.centroid();

  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointRows rows = make_rows(data.points_world[i], data.pixels[i],
                                     ne.centroid, intrinsics);
    ne.AtA.noalias() += rows.a_u * rows.a_u.transpose();
    ne.AtA.noalias() += rows.a_v * rows.a_v.transpose();
    ne.Atb.noalias() += rows.a_u * rows.q_centered.x();
    ne.Atb.noalias() += rows.a_v * rows.q_centered.y();
    ne.btb += rows.q_centered.squaredNorm();
    ne.GtG.noalias() += 2.0 * (rows.g * rows.g.transpose());
    ne.Gt1.noalias() += 2.0 * rows.g;
  }
  return ne;
}

NormalEquations normal_equations(const LinearSystem& sys) {
  NormalEquations ne;
  ne.n = sys.num_points();
  ne.centroid = sys.centroid;
  ne.AtA = sys.A.transpose() * sys.A;
  ne.Atb = sys.A.transpose() * sys.b;
  ne.btb = sys.b.squaredNorm();
  ne.GtG = sys.G.transpose() * sys.G;
  ne.Gt1 = sys.G.transpose() * Eigen::VectorXd::Ones(sys.G.rows());
  return ne;
}

ThetaVector stack_theta(double alpha, const Pose& pose) {
  ThetaVector theta;
  theta.segment<3>(0) = pose.R.row(2);
  theta.segment<3>(3) = pose.R.row(0);
  theta(6) = pose.t.x();
  theta.segment<3>(7) = pose.R.row(1);
  theta(10) = pose.t.y();
  return alpha * theta;
}

double elimination_scale(const Pose& pose, const CorrespondenceSet& data) {
  double depth_sum = 0.0;
  for (const auto& p : data.points_world) {
    depth_sum += pose.depth_of(p);
  }
  return static_cast<double>(data.size()) / depth_sum;
}

}  // namespace cpnp
