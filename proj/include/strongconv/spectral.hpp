#pragma once

// Hermitian eigensolvers (dense and matrix-free), operator norms, spectra as
// point sets, and the Hausdorff distance between spectra.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "strongconv/ensembles.hpp"
#include "strongconv/ncpoly.hpp"

namespace strongconv {

/// Relative Hermitian defect ||H - H^*||_max / (1 + ||H||_max).
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& h) {
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

struct HermEig {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns orthonormal
};

template <typename Derived>
HermEig herm_eig(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("herm_eig: matrix not square");
  if (hermitian_defect(h) > 1e-10) throw std::invalid_argument("herm_eig: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.derived().template cast<Complex>());
  if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename Derived>
Eigen::VectorXd herm_eigenvalues(const Eigen::MatrixBase<Derived>& h) {
  if (hermitian_defect(h) > 1e-10) throw std::invalid_argument("herm_eigenvalues: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.derived().template cast<Complex>(),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Largest singular value, as sqrt(lambda_max(A^* A)).
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Unitary factor W of the polar decomposition A = W |A|.
Matrix polar_unitary(const Matrix& a);

/// Black-box Hermitian operator v -> Hv on C^n, with an optional deflation
/// subspace whose (orthonormalized) directions are projected out of every
/// Lanczos iterate.
class HermOp {
 public:
  using Apply = std::function<void(const Vector& in, Vector& out)>;

  /// Spot-checks <Hv, w> = <v, Hw> on random vectors; throws if the relative
  /// defect exceeds 1e-10.
  HermOp(Eigen::Index dim, Apply apply, Matrix deflation = Matrix());

  static HermOp from_dense(const Matrix& h);

  Eigen::Index dim() const { return dim_; }
  const Matrix& deflation() const { return deflation_; }
  void apply(const Vector& in, Vector& out) const { apply_(in, out); }

  /// Removes the deflation-subspace component of v in place.
  void project(Vector& v) const;

 private:
  Eigen::Index dim_;
  Apply apply_;
  Matrix deflation_;
};

struct LanczosResult {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual_min = 0.0;
  double residual_max = 0.0;
  Vector vector_min;  // Ritz vectors, unit norm
  Vector vector_max;
};

/// Krylov iteration with full reorthogonalization for the extreme eigenvalues.
/// Convergence: both extreme Ritz residuals <= tol * (1 + |lambda|). A flag,
/// never an exception, reports non-convergence within max_iter.
LanczosResult lanczos_extremes(const HermOp& op, double tol, int max_iter, const SeedSpec& seed);

/// Sorted, deduplicated point set.
struct SpectrumSet {
  std::vector<double> points;
  Eigen::Index source_dim = 0;
};

/// Eigenvalues of a Hermitian matrix collapsed at resolution 1e-9 * (1 + ||H||).
SpectrumSet spectrum_set(const Matrix& h);
SpectrumSet spectrum_set(std::vector<double> values, double resolution);

/// Finite union of closed intervals [a, b].
struct IntervalUnion {
  std::vector<std::pair<double, double>> intervals;
};

double hausdorff(const SpectrumSet& e, const SpectrumSet& f);
double hausdorff(const SpectrumSet& e, const IntervalUnion& f);

}  // namespace strongconv
