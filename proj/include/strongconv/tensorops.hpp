#pragma once

// Matrix-free operators on S^2(k, tr) realizing M_k (x) M_k through the
// # action (A (x) B) # C = A C B^t.
//
// Vectorization is column stacking (Eigen's native layout), so A (x) B acts on
// vec(C) as kron(B, A).

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "strongconv/ensembles.hpp"
#include "strongconv/mattuple.hpp"
#include "strongconv/ncpoly.hpp"
#include "strongconv/spectral.hpp"

namespace strongconv {

struct TensorTerm {
  Matrix left;
  Matrix right;
  Complex coeff{1.0, 0.0};
};

/// Finite sum of coeff * (left (x) right) on k x k matrices.
class TensorOp {
 public:
  explicit TensorOp(Eigen::Index k);
  TensorOp(Eigen::Index k, std::vector<TensorTerm> terms);

  static TensorOp identity(Eigen::Index k);
  static TensorOp elementary(Matrix left, Matrix right, Complex coeff = 1.0);

  Eigen::Index dim() const { return k_; }
  const std::vector<TensorTerm>& terms() const { return terms_; }
  void add_term(Matrix left, Matrix right, Complex coeff = 1.0);

  TensorOp& operator+=(const TensorOp& other);
  TensorOp& operator*=(Complex scalar);
  friend TensorOp operator+(TensorOp a, const TensorOp& b) { return a += b; }
  friend TensorOp operator-(TensorOp a, TensorOp b) { return a += (b *= Complex(-1.0, 0.0)); }
  friend TensorOp operator*(TensorOp a, Complex s) { return a *= s; }
  friend TensorOp operator*(Complex s, TensorOp a) { return a *= s; }
  /// Product in M_k (x) M_k: (A (x) B)(C (x) D) = AC (x) BD.
  friend TensorOp operator*(const TensorOp& a, const TensorOp& b);

 private:
  Eigen::Index k_;
  std::vector<TensorTerm> terms_;
};

TensorOp adjoint(const TensorOp& x);

/// sum coeff * L C R^t.
Matrix sharp_apply(const TensorOp& x, const Matrix& c);

/// Normalized tr (x) tr of x: sum coeff * tr(L) tr(R).
Complex tensor_trace(const TensorOp& x);

/// Explicit k^2 x k^2 matrix of the # action in the column-stacking basis.
Matrix to_dense(const TensorOp& x);

/// Generators 1..r map to X_i (x) 1 and r+1..2r to 1 (x) Y_i, r = x.size();
/// starred letters use adjoints. Legs commute, so each monomial contributes
/// one term (left-leg word in X, right-leg word in Y).
TensorOp eval_tensor_poly(const NcPoly& p, const MatTuple& x, const MatTuple& y);

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Probes <x#v, w> = <v, x#w> on random vectors.
bool is_self_adjoint(const TensorOp& x, double tol = 1e-12);

/// Operator norm of the # action. Self-adjoint operators use Lanczos
/// directly; others use the Hermitian dilation [[0, x], [x^*, 0]].
NormEstimate tensor_norm(const TensorOp& x, double tol = 1e-10, int max_iter = 400,
                         const SeedSpec& seed = SeedSpec{0x7e550fULL, {}});

/// Norm of (1/r) sum_j U_j (x) conj(V_j). Inputs must be unitary within 1e-8.
NormEstimate haagerup_witness(const MatTuple& u, const MatTuple& v, double tol = 1e-10,
                              int max_iter = 400);

struct LaplacianGap {
  double lambda_min = 0.0;  // bottom of the spectrum; 0 since L # I = 0
  double lambda_gap = 0.0;  // smallest eigenvalue above the numerical kernel
  int kernel_dim = 0;       // deflated kernel directions, identity included
  bool converged = false;
};

struct LaplacianOptions {
  double tol = 1e-12;
  int max_iter = 400;
  int max_kernel = 64;
  SeedSpec seed{0x1a91ULL, {}};
};

/// L = sum_j w_j (X_j (x) 1 - 1 (x) X_j^t)^* (X_j (x) 1 - 1 (x) X_j^t).
TensorOp nonamen_operator(const MatTuple& x, std::span<const double> weights);

/// Spectral data of nonamen_operator. Kernel directions (starting with the
/// identity) are deflated one at a time until the bottom Ritz value clears
/// 1e-8 * (1 + lambda_max).
LaplacianGap nonamen_laplacian(const MatTuple& x, std::span<const double> weights,
                               const LaplacianOptions& opts = {});

/// Normalized Schatten norm (tr |A|^p)^{1/p}, tr = Tr / k; p = infinity gives
/// the operator norm.
template <typename Derived>
double schatten_norm(const Eigen::MatrixBase<Derived>& a, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: p must be >= 1");
  const Matrix m = a.derived().template cast<Complex>();
  const Eigen::VectorXd s = Eigen::BDCSVD<Matrix>(m).singularValues();
  if (s.size() == 0) return 0.0;
  if (std::isinf(p)) return s.maxCoeff();
  const double k = static_cast<double>(m.rows());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc / k, 1.0 / p);
}

struct InfOneBound {
  double lower_bound = 0.0;  // max ||x # C||_1 found over ||C||_inf <= 1
  Matrix witness;
};

/// Heuristic lower bound on the (inf -> 1) norm of the # action: starts from
/// the identity, Haar unitaries and signed projections, then alternates
/// C <- polar(x^* # polar(x # C)), which never decreases ||x # C||_1.
InfOneBound norm_inf_one_lower(const TensorOp& x, int trials, const SeedSpec& seed,
                               int ascent_steps = 50);

}  // namespace strongconv
