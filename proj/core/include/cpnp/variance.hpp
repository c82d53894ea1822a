#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "cpnp/linear_system.hpp"

namespace cpnp {

using Mat12 = Eigen::Matrix<double, 12, 12>;

/// Consistent estimate of the projection-noise variance (pixels^2).
struct VarianceEstimate {
  /// min over retained real roots, clamped to >= 0.
  double sigma2_hat = 0.0;
  /// Roots of det(Phi - lambda*Delta) = 0 before filtering (diagnostics).
  std::vector<std::complex<double>> roots;
  /// Smallest retained real root before clamping.
  double min_root_raw = 0.0;
  /// trace(Phi)/trace(Delta), the magnitude the roots were scaled by.
  double lambda_scale = 0.0;
};

/// Phi = (1/n) [[A^T A, A^T b], [b^T A, b^T b]], symmetric 12x12.
Mat12 phi_matrix(const NormalEquations& ne);

/// Delta = (1/n) [[G^T G, G^T 1], [1^T G, 2n]], symmetric 12x12, rank 4.
Mat12 delta_matrix(const NormalEquations& ne);

/// |det((Phi - lambda*Delta) / ||Phi||_F)|, the scale-free residual a root of
/// the pencil must drive to ~0.
double normalized_pencil_residual(const Mat12& phi, const Mat12& delta,
                                  double lambda);

/// Estimates sigma^2 from the roots of h(lambda) = det(Phi - lambda*Delta),
/// a quartic since Delta has rank 4.
///
/// Procedure:
///   1. Scale the variable by lambda_scale = trace(Phi)/trace(Delta) so the
///      roots of interest sit near [-1, 1].
///   2. Evaluate the determinant at 5 Chebyshev nodes (entries normalized by
///      ||Phi||_F to keep the 12x12 determinant in double range; a constant
///      factor does not move the roots).
///   3. Interpolate the 5 quartic coefficients through the 5x5 Vandermonde
///      system and take the companion-matrix eigenvalues as roots.
///   4. Keep roots with |imag| <= 1e-6 * (1 + |real|); sigma2_hat is the
///      smallest retained real part, clamped to >= 0.
///
/// Throws NoRealRoot when the filter rejects all roots.
VarianceEstimate estimate_noise_variance(const NormalEquations& ne);
VarianceEstimate estimate_noise_variance(const LinearSystem& sys);

}  // namespace cpnp
