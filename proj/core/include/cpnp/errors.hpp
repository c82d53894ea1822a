#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpnp {

/// Pipeline stage that raised an error. Carried by every Error so callers
/// (and the CLI) can name where a solve fell over.
enum class Stage {
  Input,
  Projection,
  BuildSystem,
  VarianceEstimation,
  BiasedSolve,
  BiasEliminatedSolve,
  PoseRecovery,
  So3Projection,
  GnRefinement,
  Generator,
};

const char* stage_name(Stage stage);

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what)
      : std::runtime_error(what), stage_(stage) {}

  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

/// Point depth e3^T(Rp + t) fell at or below depth_epsilon.
class NonPositiveDepth : public Error {
 public:
  NonPositiveDepth(Stage stage, std::ptrdiff_t index, double depth)
      : Error(stage, "NonPositiveDepth: point " + std::to_string(index) +
                         " has depth " + std::to_string(depth)),
        index_(index),
        depth_(depth) {}

  std::ptrdiff_t index() const { return index_; }
  double depth() const { return depth_; }

 private:
  std::ptrdiff_t index_;
  double depth_;
};

/// Fewer correspondences than the 11 unknowns require (2n >= 11, so n >= 6).
class TooFewPoints : public Error {
 public:
  explicit TooFewPoints(std::size_t n)
      : Error(Stage::BuildSystem, "TooFewPoints: n=" + std::to_string(n) +
                                      " but at least 6 are required"),
        n_(n) {}

  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
};

/// cond(A^T A) exceeded the conditioning guard.
class IllConditionedSystem : public Error {
 public:
  explicit IllConditionedSystem(double condition)
      : Error(Stage::BiasedSolve,
              "IllConditionedSystem: cond(A^T A)=" + std::to_string(condition)),
        condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Every root of det(Phi - lambda*Delta) failed the realness filter.
class NoRealRoot : public Error {
 public:
  NoRealRoot()
      : Error(Stage::VarianceEstimation,
              "NoRealRoot: no real root of det(Phi - lambda*Delta); "
              "geometry is severely degenerate") {}
};

/// A^T A - sigma2*G^T G lost positive definiteness.
class CorrectedMatrixNotPD : public Error {
 public:
  explicit CorrectedMatrixNotPD(double min_eigenvalue)
      : Error(Stage::BiasEliminatedSolve,
              "CorrectedMatrixNotPD: smallest eigenvalue " +
                  std::to_string(min_eigenvalue)),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// det of the stacked rotation block of theta is numerically zero.
class DegenerateTheta : public Error {
 public:
  explicit DegenerateTheta(double det)
      : Error(Stage::PoseRecovery,
              "DegenerateTheta: |det|=" + std::to_string(det)),
        det_(det) {}

  double det() const { return det_; }

 private:
  double det_;
};

/// Rank-deficient input to the SO(3) projection.
class DegenerateMatrix : public Error {
 public:
  explicit DegenerateMatrix(double min_singular_value)
      : Error(Stage::So3Projection, "DegenerateMatrix: smallest singular value " +
                                        std::to_string(min_singular_value)),
        min_singular_value_(min_singular_value) {}

  double min_singular_value() const { return min_singular_value_; }

 private:
  double min_singular_value_;
};

/// cond(J^T J) exceeded the conditioning guard during GN refinement.
class SingularNormalMatrix : public Error {
 public:
  explicit SingularNormalMatrix(double condition)
      : Error(Stage::GnRefinement,
              "SingularNormalMatrix: cond(J^T J)=" + std::to_string(condition)),
        condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

/// The synthetic generator accepted no point over 10*n_points draws.
class RegionNotVisible : public Error {
 public:
  RegionNotVisible()
      : Error(Stage::Generator,
              "RegionNotVisible: no sampled point projects inside the image") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what)
      : Error(Stage::Input, "EmptyInput: " + what) {}
};

}  // namespace cpnp
