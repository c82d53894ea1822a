#include "cpnp/gauss_newton.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "cpnp/errors.hpp"
#include "cpnp/so3.hpp"

namespace cpnp {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2x3 = Eigen::Matrix<double, 2, 3>;
using Mat2x6 = Eigen::Matrix<double, 2, 6>;
using Mat3x9 = Eigen::Matrix<double, 3, 9>;

constexpr double kConditionLimit = 1e12;
constexpr double kFallbackDamping = 1e-6;
constexpr int kMaxRetries = 3;

// Row pair of J and the residual for one correspondence.
struct PointJacobian {
  Mat2x6 J;
  Eigen::Vector2d residual;
};

PointJacobian point_jacobian(const Pose& pose, const CameraIntrinsics& intr,
                             const Eigen::Vector3d& p,
                             const Eigen::Vector2d& q_centered,
                             std::ptrdiff_t index,
                             const Eigen::Matrix<double, 9, 3>& psi) {
  const Eigen::Vector3d p_cam = pose.R * p + pose.t;
  const double h = p_cam.z();
  if (h <= kDepthEpsilon) {
    throw NonPositiveDepth(Stage::GnRefinement, index, h);
  }
  const Mat2x3 we = intr.we();
  const Eigen::Vector2d g = we * p_cam;

  Mat2x3 d_dt = we;
  d_dt.col(2) -= g / h;  // (h WE - g e3^T)/h^2, factored
  d_dt /= h;

  Mat3x9 kron;  // p^T kron R
  kron.block<3, 3>(0, 0) = p.x() * pose.R;
  kron.block<3, 3>(0, 3) = p.y() * pose.R;
  kron.block<3, 3>(0, 6) = p.z() * pose.R;

  PointJacobian out;
  out.J.block<2, 3>(0, 0) = d_dt * (kron * psi);
  out.J.block<2, 3>(0, 3) = d_dt;
  out.residual = q_centered - g / h;
  return out;
}

struct NormalSystem {
  Mat6 JtJ = Mat6::Zero();
  Vec6 Jtr = Vec6::Zero();
  double cost = 0.0;  // (1/n) sum ||residual_i||^2
};

NormalSystem accumulate(const Pose& pose, const CameraIntrinsics& intr,
                        const CorrespondenceSet& data,
                        const Eigen::Matrix<double, 9, 3>& psi) {
  NormalSystem sys;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointJacobian pj =
        point_jacobian(pose, intr, data.points_world[i],
                       centered_projection(data.pixels[i], intr),
                       static_cast<std::ptrdiff_t>(i), psi);
    sys.JtJ.noalias() += pj.J.transpose() * pj.J;
    sys.Jtr.noalias() += pj.J.transpose() * pj.residual;
    sys.cost += pj.residual.squaredNorm();
  }
  sys.cost /= static_cast<double>(data.size());
  return sys;
}

Pose apply_step(const Pose& pose, const Vec6& delta) {
  return Pose{pose.R * so3_exp(delta.head<3>()), pose.t + delta.tail<3>()};
}

double cost_or_infinity(const Pose& pose, const CameraIntrinsics& intr,
                        const CorrespondenceSet& data) {
  try {
    return reprojection_cost(pose, intr, data);
  } catch (const NonPositiveDepth&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Eigen::Matrix<double, 9, 3> psi_matrix() {
  Eigen::Matrix<double, 9, 3> psi = Eigen::Matrix<double, 9, 3>::Zero();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix3d gen = hat(Eigen::Vector3d::Unit(k));
    psi.col(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(gen.data());
  }
  return psi;
}

JacobianBlocks jacobian(const Pose& pose, const CameraIntrinsics& intrinsics,
                        const CorrespondenceSet& data) {
  if (data.size() == 0 || !data.consistent()) {
    throw EmptyInput("jacobian needs a nonempty, consistent correspondence set");
  }
  const auto psi = psi_matrix();
  const auto n = static_cast<Eigen::Index>(data.size());
  JacobianBlocks blocks;
  blocks.J.resize(2 * n, 6);
  blocks.residual.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PointJacobian pj =
        point_jacobian(pose, intrinsics, data.points_world[i],
                       centered_projection(data.pixels[i], intrinsics),
                       static_cast<std::ptrdiff_t>(i), psi);
    blocks.J.middleRows<2>(2 * i) = pj.J;
    blocks.residual.segment<2>(2 * i) = pj.residual;
  }
  return blocks;
}

GnResult gn_refine(const Pose& init, const CameraIntrinsics& intrinsics,
                   const CorrespondenceSet& data, const GnOptions& opts) {
  if (data.size() < 6) {
    throw TooFewPoints(data.size());
  }
  const auto psi = psi_matrix();

  GnResult result;
  result.pose = init;
  result.initial_cost = cost_or_infinity(init, intrinsics, data);
  result.final_cost = result.initial_cost;

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    NormalSystem sys;
    try {
      sys = accumulate(result.pose, intrinsics, data, psi);
    } catch (const NonPositiveDepth&) {
      result.depth_warning = true;
      return result;
    }
    result.iterations = iter;

    const Eigen::SelfAdjointEigenSolver<Mat6> eig(sys.JtJ);
    const double eig_min = eig.eigenvalues().minCoeff();
    const double eig_max = eig.eigenvalues().maxCoeff();
    if (!(eig_min > 0.0) || eig_max >= kConditionLimit * eig_min) {
      throw SingularNormalMatrix(eig_min > 0.0 ? eig_max / eig_min
                                               : std::numeric_limits<double>::infinity());
    }

    const Vec6 diag = sys.JtJ.diagonal();
    const auto damped_step = [&](double damping) -> Vec6 {
      Mat6 damped = sys.JtJ;
      damped.diagonal() += damping * diag;
      return damped.llt().solve(sys.Jtr);
    };
    double damping = opts.damping;
    Vec6 delta = damped_step(damping);
    if (delta.norm() <= opts.step_tol) {
      break;
    }

    // Accept the step only if the cost does not increase; otherwise retry
    // with growing Levenberg damping, then stop at the best pose so far.
    bool accepted = false;
    for (int retry = 0; retry <= kMaxRetries; ++retry) {
      if (retry > 0) {
        damping = (damping > 0.0 ? damping * 10.0 : kFallbackDamping);
        delta = damped_step(damping);
        result.rejected_steps += 1;
      }
      const Pose candidate = apply_step(result.pose, delta);
      const double candidate_cost = cost_or_infinity(candidate, intrinsics, data);
      if (candidate_cost <= sys.cost) {
        const double decrease = sys.cost - candidate_cost;
        result.pose = candidate;
        result.final_cost = candidate_cost;
        accepted = true;
        if (decrease <= opts.cost_tol * std::max(sys.cost, 1e-300)) {
          return result;
        }
        break;
      }
    }
    if (!accepted) {
      break;
    }
    if (delta.norm() <= opts.step_tol) {
      break;
    }
  }
  return result;
}

}  // namespace cpnp
