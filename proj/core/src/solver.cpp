#include "cpnp/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>

#include "cpnp/errors.hpp"
#include "cpnp/so3.hpp"

namespace cpnp {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kDetEpsilon = 1e-12;

double ms_since(const std::chrono::steady_clock::time_point& start) {
  const auto dt = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(dt).count();
}

double smallest_eigenvalue(const Mat11& m) {
  return Eigen::SelfAdjointEigenSolver<Mat11>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

}  // namespace

double normal_matrix_condition(const NormalEquations& ne) {
  const Eigen::SelfAdjointEigenSolver<Mat11> eig(ne.AtA, Eigen::EigenvaluesOnly);
  const double eig_min = eig.eigenvalues().minCoeff();
  const double eig_max = eig.eigenvalues().maxCoeff();
  if (!(eig_min > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return eig_max / eig_min;
}

ThetaVector solve_biased(const NormalEquations& ne) {
  const double condition = normal_matrix_condition(ne);
  if (!(condition < kConditionLimit)) {
    throw IllConditionedSystem(condition);
  }
  return ne.AtA.llt().solve(ne.Atb);
}

ThetaVector solve_biased(const LinearSystem& sys) {
  return solve_biased(normal_equations(sys));
}

ThetaVector solve_bias_eliminated(const NormalEquations& ne,
                                  const VarianceEstimate& var) {
  const Mat11 corrected = ne.AtA - var.sigma2_hat * ne.GtG;
  const Eigen::LLT<Mat11> llt(corrected);
  if (llt.info() != Eigen::Success) {
    throw CorrectedMatrixNotPD(smallest_eigenvalue(corrected));
  }
  return llt.solve(ne.Atb - var.sigma2_hat * ne.Gt1);
}

ThetaVector solve_bias_eliminated(const LinearSystem& sys,
                                  const VarianceEstimate& var) {
  return solve_bias_eliminated(normal_equations(sys), var);
}

RecoveredPose recover_pose(const ThetaVector& theta,
                           const Eigen::Vector3d& centroid) {
  Eigen::Matrix3d scaled;  // alpha * R
  scaled.row(0) = theta.segment<3>(3);
  scaled.row(1) = theta.segment<3>(7);
  scaled.row(2) = theta.segment<3>(0);

  const double det = scaled.determinant();
  if (std::abs(det) <= kDetEpsilon) {
    throw DegenerateTheta(det);
  }

  RecoveredPose rec;
  rec.alpha = std::cbrt(det);
  rec.rotation_raw = scaled / rec.alpha;
  rec.raw_det = rec.rotation_raw.determinant();
  rec.pose.R = project_to_so3(rec.rotation_raw);
  rec.projection_delta = (rec.pose.R - rec.rotation_raw).norm();
  rec.pose.t = Eigen::Vector3d(theta(6), theta(10),
                               1.0 - centroid.dot(theta.head<3>())) /
               rec.alpha;
  return rec;
}

SolveReport cpnp_solve(const CorrespondenceSet& data,
                       const CameraIntrinsics& intrinsics,
                       const SolverOptions& opts) {
  const auto t_total = std::chrono::steady_clock::now();
  SolveReport report;

  auto t = std::chrono::steady_clock::now();
  const NormalEquations ne = build_normal_equations(data, intrinsics);
  report.n = ne.n;
  report.condition_AtA = normal_matrix_condition(ne);
  report.timing.build_ms = ms_since(t);

  t = std::chrono::steady_clock::now();
  report.variance = estimate_noise_variance(ne);
  report.timing.variance_ms = ms_since(t);

  t = std::chrono::steady_clock::now();
  report.theta_be = solve_bias_eliminated(ne, report.variance);
  report.min_eig_corrected =
      smallest_eigenvalue(ne.AtA - report.variance.sigma2_hat * ne.GtG);
  const RecoveredPose rec = recover_pose(report.theta_be, ne.centroid);
  report.alpha = rec.alpha;
  report.pose_be = rec.pose;
  report.raw_rotation_det = rec.raw_det;
  report.so3_projection_delta = rec.projection_delta;
  report.timing.solve_ms = ms_since(t);

  if (rec.alpha < 0.0) {
    report.warnings.emplace_back(
        "negative alpha: recovered scene is mirrored (points behind camera)");
  }

  try {
    report.cost_be = reprojection_cost(report.pose_be, intrinsics, data);
  } catch (const NonPositiveDepth& e) {
    report.cost_be = std::numeric_limits<double>::quiet_NaN();
    report.warnings.emplace_back(
        std::string("cheirality: non-positive depth at bias-eliminated pose "
                    "(point ") +
        std::to_string(e.index()) + ")");
  }

  report.pose_gn = report.pose_be;
  report.cost_gn = report.cost_be;
  if (opts.refine_gn && std::isfinite(report.cost_be)) {
    t = std::chrono::steady_clock::now();
    const GnResult gn = gn_refine(report.pose_be, intrinsics, data, opts.gn);
    report.gn_ran = true;
    report.gn_iterations = gn.iterations;
    report.pose_gn = gn.pose;
    report.cost_gn = gn.final_cost;
    if (gn.depth_warning) {
      report.warnings.emplace_back(
          "gn_refinement: non-positive depth mid-iteration; kept best pose");
    }
    if (gn.rejected_steps > 0) {
      report.warnings.emplace_back(
          "gn_refinement: " + std::to_string(gn.rejected_steps) +
          " step(s) rejected by the descent guard");
    }
    report.timing.gn_ms = ms_since(t);
  } else if (opts.refine_gn) {
    report.warnings.emplace_back(
        "gn_refinement skipped: bias-eliminated pose has invalid depths");
  }

  report.timing.total_ms = ms_since(t_total);
  return report;
}

}  // namespace cpnp
