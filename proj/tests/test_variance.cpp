#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "cpnp/linear_system.hpp"
#include "cpnp/synthetic.hpp"
#include "cpnp/variance.hpp"
#include "support/test_scenes.hpp"

using namespace cpnp;

TEST_CASE("noise-free data estimates essentially zero variance") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto scene = testing::random_scene(seed, 100, 0.0);
    const auto ne =
        build_normal_equations(scene.data, testing::default_intrinsics());
    const VarianceEstimate est = estimate_noise_variance(ne);
    CHECK(est.sigma2_hat >= 0.0);
    CHECK(est.sigma2_hat <= 1e-6);
  }
}

TEST_CASE("median relative error under 10% at sigma=5, n=2000") {
  std::vector<double> errors;
  for (int s = 0; s < 100; ++s) {
    ScenarioConfig cfg;
    cfg.n_points = 2000;
    cfg.sigma_pixels = 5.0;
    cfg.seed = trial_seed(2026, 2000, 5.0, s);
    const Scene scene = generate_scene(cfg);
    const auto ne = build_normal_equations(scene.data, cfg.intrinsics());
    errors.push_back(std::abs(estimate_noise_variance(ne).sigma2_hat - 25.0) /
                     25.0);
  }
  std::sort(errors.begin(), errors.end());
  CHECK(errors[50] < 0.10);
}

TEST_CASE("every retained real root drives the pencil determinant to zero") {
  for (std::uint64_t seed : {5, 6, 7}) {
    const auto scene = testing::random_scene(seed, 400, 4.0);
    const auto ne =
        build_normal_equations(scene.data, testing::default_intrinsics());
    const VarianceEstimate est = estimate_noise_variance(ne);
    CHECK(est.roots.size() == 4);
    const Mat12 phi = phi_matrix(ne);
    const Mat12 delta = delta_matrix(ne);
    for (const std::complex<double>& root : est.roots) {
      if (std::abs(root.imag()) > 1e-6 * (1.0 + std::abs(root.real()))) {
        continue;
      }
      CHECK(normalized_pencil_residual(phi, delta, root.real()) <= 1e-8);
    }
  }
}

TEST_CASE("sigma2_hat is the smallest retained root, clamped at zero") {
  const auto scene = testing::random_scene(8, 500, 6.0);
  const auto ne =
      build_normal_equations(scene.data, testing::default_intrinsics());
  const VarianceEstimate est = estimate_noise_variance(ne);
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& root : est.roots) {
    if (std::abs(root.imag()) <= 1e-6 * (1.0 + std::abs(root.real()))) {
      smallest = std::min(smallest, root.real());
    }
  }
  CHECK(est.min_root_raw == smallest);
  CHECK(est.sigma2_hat == std::max(smallest, 0.0));
}

TEST_CASE("phi and delta have the advertised symmetric block layout") {
  const auto scene = testing::random_scene(9, 50, 2.0);
  const auto ne =
      build_normal_equations(scene.data, testing::default_intrinsics());
  const Mat12 phi = phi_matrix(ne);
  const Mat12 delta = delta_matrix(ne);
  const double n = static_cast<double>(ne.n);
  CHECK((phi - phi.transpose()).norm() == 0.0);
  CHECK((delta - delta.transpose()).norm() == 0.0);
  CHECK((phi.topLeftCorner<11, 11>() * n - ne.AtA).norm() <= 1e-9 * ne.AtA.norm());
  CHECK(phi(11, 11) * n == doctest::Approx(ne.btb));
  CHECK(delta(11, 11) * n == doctest::Approx(2.0 * n));
  // Columns 4..11 of G are zero, so Delta is supported on the first three
  // coordinates plus the corner.
  CHECK(delta.block<8, 8>(3, 3).norm() == 0.0);
}
