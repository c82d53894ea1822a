#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cpnp/errors.hpp"
#include "cpnp/solver.hpp"
#include "cpnp/synthetic.hpp"
#include "support/test_scenes.hpp"

using namespace cpnp;

TEST_CASE("biased LS recovers theta exactly on clean data") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto scene = testing::random_scene(seed, 60, 0.0);
    const auto ne =
        build_normal_equations(scene.data, testing::default_intrinsics());
    const ThetaVector truth =
        stack_theta(elimination_scale(scene.truth, scene.data), scene.truth);
    const ThetaVector solved = solve_biased(ne);
    CHECK((solved - truth).norm() <= 1e-8 * truth.norm());
  }
}

TEST_CASE("bias elimination beats plain LS in theta space (sigma=10, n=5000)") {
  std::vector<double> biased_err, be_err;
  for (int s = 0; s < 100; ++s) {
    ScenarioConfig cfg;
    cfg.n_points = 5000;
    cfg.sigma_pixels = 10.0;
    cfg.seed = trial_seed(555, 5000, 10.0, s);
    const Scene scene = generate_scene(cfg);
    const auto ne = build_normal_equations(scene.data, cfg.intrinsics());
    const ThetaVector truth =
        stack_theta(elimination_scale(scene.truth, scene.data), scene.truth);
    biased_err.push_back((solve_biased(ne) - truth).norm());
    be_err.push_back(
        (solve_bias_eliminated(ne, estimate_noise_variance(ne)) - truth).norm());
  }
  CHECK(rmse(be_err) < rmse(biased_err));
  std::sort(biased_err.begin(), biased_err.end());
  std::sort(be_err.begin(), be_err.end());
  CHECK(be_err[50] < biased_err[50]);
}

TEST_CASE("world points coplanar in z make the system rank deficient") {
  // z = const duplicates the fx*z / fy*z columns against the constant fx/fy
  // columns, so cond(A^T A) blows past the guard.
  const auto intr = testing::default_intrinsics();
  const Pose pose{Eigen::Matrix3d::Identity(), {0.0, 0.0, 10.0}};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  CorrespondenceSet data;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d p(u(rng), u(rng), 1.5);
    data.points_world.push_back(p);
    data.pixels.push_back(project(pose, intr, p));
  }
  CHECK_THROWS_AS(solve_biased(build_normal_equations(data, intr)),
                  IllConditionedSystem);
}

TEST_CASE("zero variance reduces bias elimination to plain LS") {
  const auto scene = testing::random_scene(4, 120, 3.0);
  const auto ne =
      build_normal_equations(scene.data, testing::default_intrinsics());
  VarianceEstimate zero;
  zero.sigma2_hat = 0.0;
  CHECK((solve_bias_eliminated(ne, zero) - solve_biased(ne)).norm() <= 1e-12);
}

TEST_CASE("on clean data the estimated correction is negligible") {
  const auto scene = testing::random_scene(14, 150, 0.0);
  const auto ne =
      build_normal_equations(scene.data, testing::default_intrinsics());
  const VarianceEstimate est = estimate_noise_variance(ne);
  CHECK(est.sigma2_hat <= 1e-6);
  const ThetaVector biased = solve_biased(ne);
  const ThetaVector be = solve_bias_eliminated(ne, est);
  CHECK((be - biased).norm() <= 1e-8 * biased.norm());
}

TEST_CASE("theta-space consistency slope at sigma=10") {
  // RMSE of the bias-eliminated theta over n in {200, 800, 3200, 12800}
  // should decay close to n^{-1/2}.
  std::vector<double> log_n, log_rmse;
  for (int n : {200, 800, 3200, 12800}) {
    std::vector<double> errors;
    for (int s = 0; s < 50; ++s) {
      ScenarioConfig cfg;
      cfg.n_points = n;
      cfg.sigma_pixels = 10.0;
      cfg.seed = trial_seed(808, n, 10.0, s);
      const Scene scene = generate_scene(cfg);
      const auto ne = build_normal_equations(scene.data, cfg.intrinsics());
      const ThetaVector truth =
          stack_theta(elimination_scale(scene.truth, scene.data), scene.truth);
      errors.push_back(
          (solve_bias_eliminated(ne, estimate_noise_variance(ne)) - truth)
              .norm());
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_rmse.push_back(std::log(rmse(errors)));
  }
  const double mx =
      std::accumulate(log_n.begin(), log_n.end(), 0.0) / 4.0;
  const double my =
      std::accumulate(log_rmse.begin(), log_rmse.end(), 0.0) / 4.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 4; ++i) {
    sxy += (log_n[i] - mx) * (log_rmse[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope >= -0.65);
  CHECK(slope <= -0.35);
}

TEST_CASE("recover_pose inverts stack_theta on valid triples") {
  // Valid means alpha satisfies the elimination constraint
  // alpha (t3 + centroid . r3) = 1, which is what defines t3's reconstruction.
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 1000) {
    Pose pose{testing::random_rotation(rng),
              Eigen::Vector3d(u(rng) * 5, u(rng) * 5, u(rng) * 5 + 8)};
    const Eigen::Vector3d centroid(u(rng), u(rng), u(rng));
    const double denom = pose.t.z() + centroid.dot(pose.R.row(2));
    if (std::abs(denom) < 0.1) continue;
    const double alpha = 1.0 / denom;
    const RecoveredPose rec = recover_pose(stack_theta(alpha, pose), centroid);
    CHECK(std::abs(rec.alpha - alpha) <= 1e-10 * std::abs(alpha));
    CHECK((rec.pose.R - pose.R).norm() <= 1e-10);
    CHECK((rec.pose.t - pose.t).norm() <= 1e-10 * pose.t.norm());
    ++tested;
  }
}

TEST_CASE("theta is homogeneous of degree one in alpha") {
  // Scaling theta scales alpha and leaves R, t1 and t2 untouched. The third
  // translation component is pinned to the scale through the normalization
  // constant in 1 - centroid . theta[0:3], so it tracks 1/alpha instead.
  std::mt19937_64 rng(45);
  const Pose pose{testing::random_rotation(rng), {1.0, -2.0, 9.0}};
  const Eigen::Vector3d centroid(0.4, -0.3, 0.2);
  const double alpha = 1.0 / (pose.t.z() + centroid.dot(pose.R.row(2)));
  const ThetaVector theta = stack_theta(alpha, pose);
  for (double c : {2.0, 0.5, 13.7}) {
    const RecoveredPose rec = recover_pose(c * theta, centroid);
    CHECK(std::abs(rec.alpha - c * alpha) <= 1e-10 * std::abs(c * alpha));
    CHECK((rec.pose.R - pose.R).norm() <= 1e-10);
    CHECK(std::abs(rec.pose.t.x() - pose.t.x()) <= 1e-10);
    CHECK(std::abs(rec.pose.t.y() - pose.t.y()) <= 1e-10);
    const double expected_t3 =
        1.0 / (c * alpha) - centroid.dot(pose.R.row(2));
    CHECK(std::abs(rec.pose.t.z() - expected_t3) <= 1e-10);
  }
}

TEST_CASE("noisy solve stays near SO(3) before projection") {
  ScenarioConfig cfg;
  cfg.n_points = 1000;
  cfg.sigma_pixels = 2.0;
  cfg.seed = 99;
  const Scene scene = generate_scene(cfg);
  const auto ne = build_normal_equations(scene.data, cfg.intrinsics());
  const RecoveredPose rec = recover_pose(
      solve_bias_eliminated(ne, estimate_noise_variance(ne)), ne.centroid);
  CHECK(std::abs(rec.raw_det - 1.0) < 0.05);
  CHECK(rec.projection_delta < 0.05);
}

TEST_CASE("degenerate theta is rejected") {
  ThetaVector theta = ThetaVector::Zero();
  theta(6) = 1.0;  // rotation block identically zero
  CHECK_THROWS_AS(recover_pose(theta, Eigen::Vector3d::Zero()), DegenerateTheta);
}

TEST_CASE("bias-eliminated LS agrees with an orthogonal-factorization oracle") {
  // n = 8, sigma = 0: the correction is ~0 and the argmin of ||A theta - b||
  // can be computed by QR on the stacked system, never forming A^T A.
  const auto scene = testing::random_scene(99, 8, 0.0);
  const auto intr = testing::default_intrinsics();
  const LinearSystem sys = build_system(scene.data, intr);
  const ThetaVector via_qr = sys.A.colPivHouseholderQr().solve(sys.b);
  const ThetaVector via_be =
      solve_bias_eliminated(sys, estimate_noise_variance(sys));
  CHECK((via_be - via_qr).norm() <= 1e-6 * via_qr.norm());
}

TEST_CASE("cpnp_solve is exact on clean scenes, with and without GN") {
  for (std::uint64_t seed : {11, 12, 13}) {
    ScenarioConfig cfg;
    cfg.n_points = 20;
    cfg.sigma_pixels = 0.0;
    cfg.seed = seed;
    const Scene scene = generate_scene(cfg);
    for (bool gn : {false, true}) {
      SolverOptions opts;
      opts.refine_gn = gn;
      const SolveReport report = cpnp_solve(scene.data, cfg.intrinsics(), opts);
      const Pose& pose = gn ? report.pose_gn : report.pose_be;
      CHECK((pose.R - scene.truth.R).norm() <= 1e-6);
      CHECK((pose.t - scene.truth.t).norm() <= 1e-6);
      CHECK(report.gn_ran == gn);
    }
  }
}

TEST_CASE("CPnP+GN dominates the biased baseline on the benchmark scene") {
  // sigma = 2, n = 1000: both rotation and translation RMSE must order
  // GN-refined CPnP strictly below biased-LS + recovery.
  std::vector<double> rot_biased, rot_gn, trans_biased, trans_gn;
  for (int s = 0; s < 100; ++s) {
    ScenarioConfig cfg;
    cfg.n_points = 1000;
    cfg.sigma_pixels = 2.0;
    cfg.seed = trial_seed(31337, 1000, 2.0, s);
    const Scene scene = generate_scene(cfg);
    const auto intr = cfg.intrinsics();
    const auto ne = build_normal_equations(scene.data, intr);
    const RecoveredPose biased = recover_pose(solve_biased(ne), ne.centroid);
    rot_biased.push_back((biased.pose.R - scene.truth.R).norm());
    trans_biased.push_back((biased.pose.t - scene.truth.t).norm());
    const SolveReport report = cpnp_solve(scene.data, intr, {});
    rot_gn.push_back((report.pose_gn.R - scene.truth.R).norm());
    trans_gn.push_back((report.pose_gn.t - scene.truth.t).norm());
  }
  CHECK(rmse(rot_gn) < rmse(rot_biased));
  CHECK(rmse(trans_gn) < rmse(trans_biased));
}

TEST_CASE("solve report carries diagnostics") {
  ScenarioConfig cfg;
  cfg.n_points = 500;
  cfg.sigma_pixels = 3.0;
  cfg.seed = 5;
  const Scene scene = generate_scene(cfg);
  const SolveReport report = cpnp_solve(scene.data, cfg.intrinsics(), {});
  CHECK(report.n == 500);
  CHECK(report.condition_AtA > 1.0);
  CHECK(report.condition_AtA < 1e12);
  CHECK(report.min_eig_corrected > 0.0);
  CHECK(report.alpha > 0.0);
  CHECK(report.cost_gn <= report.cost_be);
  CHECK(report.gn_iterations >= 1);
  CHECK(report.variance.sigma2_hat == doctest::Approx(9.0).epsilon(0.5));
  CHECK(report.timing.total_ms > 0.0);
  CHECK(report.warnings.empty());
}

TEST_CASE("mirrored theta recovers a negative alpha") {
  std::mt19937_64 rng(46);
  const Pose pose{testing::random_rotation(rng), {0.5, 0.2, 7.0}};
  const Eigen::Vector3d centroid(0.1, 0.0, -0.2);
  const double alpha = 1.0 / (pose.t.z() + centroid.dot(pose.R.row(2)));
  const RecoveredPose rec = recover_pose(stack_theta(-alpha, pose), centroid);
  CHECK(rec.alpha == doctest::Approx(-alpha).epsilon(1e-10));
}
