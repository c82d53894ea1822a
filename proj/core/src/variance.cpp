#include "cpnp/variance.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cpnp/errors.hpp"

namespace cpnp {

namespace {

constexpr int kDegree = 4;
constexpr double kImagTolerance = 1e-6;

double scaled_determinant(const Mat12& phi, const Mat12& delta, double lambda,
                          double norm_scale) {
  const Mat12 h = (phi - lambda * delta) / norm_scale;
  return h.fullPivLu().determinant();
}

// Newton polish of a real root of h(lambda) = det(Phi - lambda*Delta) using
// h'/h = -tr((Phi - lambda*Delta)^{-1} Delta), so the step is
// 1/tr((Phi - lambda*Delta)^{-1} Delta). Companion-matrix eigenvalues carry
// an absolute error on the order of lambda_scale * eps, which is far too
// coarse for the near-zero root of noise-free data.
double polish_real_root(const Mat12& phi, const Mat12& delta, double lambda,
                        double lambda_scale) {
  for (int iter = 0; iter < 8; ++iter) {
    const Mat12 h = phi - lambda * delta;
    const Eigen::FullPivLU<Mat12> lu(h);
    if (!lu.isInvertible()) {
      break;  // exactly singular: lambda is a root
    }
    const double trace = lu.solve(delta).trace();
    if (trace == 0.0 || !std::isfinite(trace)) {
      break;
    }
    const double step = 1.0 / trace;
    lambda += step;
    if (std::abs(step) <= 1e-14 * (std::abs(lambda) + lambda_scale * 1e-8)) {
      break;
    }
  }
  return lambda;
}

// Roots of sum_k coeffs[k] x^k via the companion matrix of the monic
// polynomial. Near-zero leading coefficients are trimmed first.
std::vector<std::complex<double>> polynomial_roots(
    Eigen::Matrix<double, kDegree + 1, 1> coeffs) {
  const double max_coeff = coeffs.cwiseAbs().maxCoeff();
  int degree = kDegree;
  while (degree > 0 && std::abs(coeffs(degree)) <= 1e-13 * max_coeff) {
    --degree;
  }
  if (degree == 0) {
    return {};
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  companion.bottomLeftCorner(degree - 1, degree - 1).setIdentity();
  companion.col(degree - 1) =
      -coeffs.head(degree) / coeffs(degree);
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) {
    roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  }
  return roots;
}

}  // namespace

Mat12 phi_matrix(const NormalEquations& ne) {
  Mat12 phi;
  phi.topLeftCorner<11, 11>() = ne.AtA;
  phi.topRightCorner<11, 1>() = ne.Atb;
  phi.bottomLeftCorner<1, 11>() = ne.Atb.transpose();
  phi(11, 11) = ne.btb;
  return phi / static_cast<double>(ne.n);
}

Mat12 delta_matrix(const NormalEquations& ne) {
  Mat12 delta;
  delta.topLeftCorner<11, 11>() = ne.GtG;
  delta.topRightCorner<11, 1>() = ne.Gt1;
  delta.bottomLeftCorner<1, 11>() = ne.Gt1.transpose();
  delta(11, 11) = 2.0 * static_cast<double>(ne.n);
  return delta / static_cast<double>(ne.n);
}

double normalized_pencil_residual(const Mat12& phi, const Mat12& delta,
                                  double lambda) {
  return std::abs(scaled_determinant(phi, delta, lambda, phi.norm()));
}

VarianceEstimate estimate_noise_variance(const NormalEquations& ne) {
  const Mat12 phi = phi_matrix(ne);
  const Mat12 delta = delta_matrix(ne);

  VarianceEstimate est;
  est.lambda_scale = phi.trace() / delta.trace();
  const double norm_scale = phi.norm();

  // h(mu * lambda_scale) sampled at the 5 Chebyshev-Gauss nodes on [-1, 1].
  Eigen::Matrix<double, kDegree + 1, 1> nodes;
  Eigen::Matrix<double, kDegree + 1, 1> values;
  Eigen::Matrix<double, kDegree + 1, kDegree + 1> vandermonde;
  for (int j = 0; j <= kDegree; ++j) {
    const double mu =
        std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * (kDegree + 1)));
    nodes(j) = mu;
    values(j) =
        scaled_determinant(phi, delta, mu * est.lambda_scale, norm_scale);
    double power = 1.0;
    for (int k = 0; k <= kDegree; ++k) {
      vandermonde(j, k) = power;
      power *= mu;
    }
  }
  const Eigen::Matrix<double, kDegree + 1, 1> coeffs =
      vandermonde.fullPivLu().solve(values);

  bool have_real = false;
  double min_real = 0.0;
  for (const auto& mu_root : polynomial_roots(coeffs)) {
    std::complex<double> lambda = mu_root * est.lambda_scale;
    if (std::abs(lambda.imag()) <= kImagTolerance * (1.0 + std::abs(lambda.real()))) {
      lambda = polish_real_root(phi, delta, lambda.real(), est.lambda_scale);
      if (!have_real || lambda.real() < min_real) {
        min_real = lambda.real();
        have_real = true;
      }
    }
    est.roots.push_back(lambda);
  }
  if (!have_real) {
    throw NoRealRoot();
  }
  est.min_root_raw = min_real;
  est.sigma2_hat = std::max(min_real, 0.0);
  return est;
}

VarianceEstimate estimate_noise_variance(const LinearSystem& sys) {
  return estimate_noise_variance(normal_equations(sys));
}

}  // namespace cpnp
