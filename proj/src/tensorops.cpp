#include "strongconv/tensorops.hpp"

#include <algorithm>
#include <numeric>

namespace strongconv {

TensorOp::TensorOp(Eigen::Index k) : k_(k) {
  if (k < 1) throw std::invalid_argument("TensorOp: dimension must be >= 1");
}

TensorOp::TensorOp(Eigen::Index k, std::vector<TensorTerm> terms) : TensorOp(k) {
  for (auto& t : terms) add_term(std::move(t.left), std::move(t.right), t.coeff);
}

TensorOp TensorOp::identity(Eigen::Index k) {
  return elementary(Matrix::Identity(k, k), Matrix::Identity(k, k));
}

TensorOp TensorOp::elementary(Matrix left, Matrix right, Complex coeff) {
  TensorOp out(left.rows());
  out.add_term(std::move(left), std::move(right), coeff);
  return out;
}

void TensorOp::add_term(Matrix left, Matrix right, Complex coeff) {
  if (left.rows() != k_ || left.cols() != k_ || right.rows() != k_ || right.cols() != k_)
    throw std::invalid_argument("TensorOp: term dimension mismatch");
  terms_.push_back({std::move(left), std::move(right), coeff});
}

TensorOp& TensorOp::operator+=(const TensorOp& other) {
  if (other.k_ != k_) throw std::invalid_argument("TensorOp: dimension mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

TensorOp& TensorOp::operator*=(Complex scalar) {
  for (auto& t : terms_) t.coeff *= scalar;
  return *this;
}

TensorOp operator*(const TensorOp& a, const TensorOp& b) {
  if (a.k_ != b.k_) throw std::invalid_argument("TensorOp: dimension mismatch");
  TensorOp out(a.k_);
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) out.add_term(s.left * t.left, s.right * t.right, s.coeff * t.coeff);
  return out;
}

TensorOp adjoint(const TensorOp& x) {
  TensorOp out(x.dim());
  for (const auto& t : x.terms()) out.add_term(t.left.adjoint(), t.right.adjoint(), std::conj(t.coeff));
  return out;
}

Matrix sharp_apply(const TensorOp& x, const Matrix& c) {
  if (c.rows() != x.dim() || c.cols() != x.dim())
    throw std::invalid_argument("sharp_apply: dimension mismatch");
  Matrix out = Matrix::Zero(x.dim(), x.dim());
  for (const auto& t : x.terms()) out.noalias() += t.coeff * (t.left * c * t.right.transpose());
  return out;
}

Complex tensor_trace(const TensorOp& x) {
  const double k = static_cast<double>(x.dim());
  Complex acc(0.0, 0.0);
  for (const auto& t : x.terms()) acc += t.coeff * (t.left.trace() / k) * (t.right.trace() / k);
  return acc;
}

Matrix to_dense(const TensorOp& x) {
  const Eigen::Index k = x.dim();
  Matrix out(k * k, k * k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) {
      Matrix unit = Matrix::Zero(k, k);
      unit(i, j) = 1.0;
      const Matrix img = sharp_apply(x, unit);
      out.col(j * k + i) = Eigen::Map<const Vector>(img.data(), k * k);
    }
  return out;
}

TensorOp eval_tensor_poly(const NcPoly& p, const MatTuple& x, const MatTuple& y) {
  if (x.size() != y.size()) throw std::invalid_argument("eval_tensor_poly: X and Y differ in length");
  if (x.dim() != y.dim()) throw std::invalid_argument("eval_tensor_poly: X and Y differ in dimension");
  const int r = static_cast<int>(x.size());
  const Eigen::Index k = x.dim();
  if (p.max_index() > 2 * r)
    throw std::out_of_range("eval_tensor_poly: generator T" + std::to_string(p.max_index()) +
                            " outside 1.." + std::to_string(2 * r));
  TensorOp out(k);
  for (const auto& [w, c] : p.terms()) {
    Matrix left = Matrix::Identity(k, k);
    Matrix right = Matrix::Identity(k, k);
    for (const auto& l : w) {
      if (l.index <= r) {
        const Matrix& m = x[static_cast<std::size_t>(l.index - 1)];
        left = l.starred ? Matrix(left * m.adjoint()) : Matrix(left * m);
      } else {
        const Matrix& m = y[static_cast<std::size_t>(l.index - r - 1)];
        right = l.starred ? Matrix(right * m.adjoint()) : Matrix(right * m);
      }
    }
    out.add_term(std::move(left), std::move(right), c);
  }
  if (out.terms().empty()) out.add_term(Matrix::Zero(k, k), Matrix::Zero(k, k), 0.0);
  return out;
}

namespace {

Matrix as_matrix(const Vector& v, Eigen::Index k) { return Eigen::Map<const Matrix>(v.data(), k, k); }

Vector as_vector(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix random_matrix(Eigen::Index k, const SeedSpec& seed) { return sample_ginibre(k, seed); }

}  // namespace

bool is_self_adjoint(const TensorOp& x, double tol) {
  const Eigen::Index k = x.dim();
  const SeedSpec probe{0xad301ULL, {}};
  const Matrix v = random_matrix(k, probe.child(0));
  const Matrix w = random_matrix(k, probe.child(1));
  const Matrix xv = sharp_apply(x, v);
  const Matrix xw = sharp_apply(x, w);
  const Complex lhs = as_vector(w).dot(as_vector(xv));
  const Complex rhs = as_vector(xw).dot(as_vector(v));
  const double scale = as_vector(xv).norm() * as_vector(w).norm() + as_vector(xw).norm() * as_vector(v).norm();
  return std::abs(lhs - rhs) <= tol * (1.0 + scale);
}

NormEstimate tensor_norm(const TensorOp& x, double tol, int max_iter, const SeedSpec& seed) {
  const Eigen::Index k = x.dim();
  const Eigen::Index n = k * k;
  if (is_self_adjoint(x)) {
    HermOp op(n, [&x, k](const Vector& in, Vector& out) { out = as_vector(sharp_apply(x, as_matrix(in, k))); });
    const LanczosResult r = lanczos_extremes(op, tol, max_iter, seed);
    return {std::max(std::abs(r.lambda_min), std::abs(r.lambda_max)), r.converged, r.iterations};
  }
  const TensorOp xs = adjoint(x);
  HermOp op(2 * n, [&x, &xs, k, n](const Vector& in, Vector& out) {
    out.resize(2 * n);
    out.head(n) = as_vector(sharp_apply(x, as_matrix(in.tail(n), k)));
    out.tail(n) = as_vector(sharp_apply(xs, as_matrix(in.head(n), k)));
  });
  const LanczosResult r = lanczos_extremes(op, tol, max_iter, seed);
  return {std::max(std::abs(r.lambda_min), std::abs(r.lambda_max)), r.converged, r.iterations};
}

NormEstimate haagerup_witness(const MatTuple& u, const MatTuple& v, double tol, int max_iter) {
  if (u.size() != v.size() || u.dim() != v.dim())
    throw std::invalid_argument("haagerup_witness: tuples differ in shape");
  const Eigen::Index k = u.dim();
  const Matrix id = Matrix::Identity(k, k);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if ((u[j].adjoint() * u[j] - id).cwiseAbs().maxCoeff() > 1e-8 ||
        (v[j].adjoint() * v[j] - id).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("haagerup_witness: coordinate " + std::to_string(j + 1) + " is not unitary");
  }
  TensorOp x(k);
  const Complex w(1.0 / static_cast<double>(u.size()), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) x.add_term(u[j], v[j].conjugate(), w);
  return tensor_norm(x, tol, max_iter);
}

TensorOp nonamen_operator(const MatTuple& x, std::span<const double> weights) {
  if (weights.size() != x.size())
    throw std::invalid_argument("nonamen_laplacian: weight vector length differs from tuple length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("nonamen_laplacian: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("nonamen_laplacian: weights must sum to 1");
  const Eigen::Index k = x.dim();
  const Matrix id = Matrix::Identity(k, k);
  TensorOp out(k);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (weights[j] == 0.0) continue;
    if (!x.is_hermitian(j, 1e-10))
      throw std::invalid_argument("nonamen_laplacian: coordinate " + std::to_string(j + 1) + " is not Hermitian");
    TensorOp d = TensorOp::elementary(x[j], id) - TensorOp::elementary(id, x[j].transpose());
    out += (adjoint(d) * d) * Complex(weights[j], 0.0);
  }
  if (out.terms().empty()) out.add_term(Matrix::Zero(k, k), Matrix::Zero(k, k), 0.0);
  return out;
}

LaplacianGap nonamen_laplacian(const MatTuple& x, std::span<const double> weights,
                               const LaplacianOptions& opts) {
  const TensorOp l = nonamen_operator(x, weights);
  const Eigen::Index k = x.dim();
  const Eigen::Index n = k * k;
  auto apply = [&l, k](const Vector& in, Vector& out) { out = as_vector(sharp_apply(l, as_matrix(in, k))); };

  LaplacianGap out;
  const LanczosResult full = lanczos_extremes(HermOp(n, apply), opts.tol, opts.max_iter, opts.seed.child(0));
  out.lambda_min = full.lambda_min;
  out.converged = full.converged;
  const double null_tol = 1e-8 * (1.0 + std::abs(full.lambda_max));

  Matrix kernel(n, 1);
  kernel.col(0) = as_vector(Matrix(Matrix::Identity(k, k)));
  kernel.col(0).normalize();
  for (int round = 1;; ++round) {
    if (kernel.cols() >= n) {
      out.lambda_gap = std::numeric_limits<double>::infinity();
      break;
    }
    const LanczosResult r =
        lanczos_extremes(HermOp(n, apply, kernel), opts.tol, opts.max_iter, opts.seed.child(static_cast<std::uint64_t>(round)));
    out.converged = out.converged && r.converged;
    if (r.lambda_min > null_tol || kernel.cols() >= opts.max_kernel) {
      out.lambda_gap = r.lambda_min;
      break;
    }
    kernel.conservativeResize(Eigen::NoChange, kernel.cols() + 1);
    kernel.col(kernel.cols() - 1) = r.vector_min;
  }
  out.kernel_dim = static_cast<int>(kernel.cols());
  return out;
}

InfOneBound norm_inf_one_lower(const TensorOp& x, int trials, const SeedSpec& seed, int ascent_steps) {
  const Eigen::Index k = x.dim();
  const TensorOp xs = adjoint(x);
  InfOneBound best;
  best.lower_bound = -1.0;

  auto consider = [&](const Matrix& c) {
    const double v = schatten_norm(sharp_apply(x, c), 1.0);
    if (v > best.lower_bound) {
      best.lower_bound = v;
      best.witness = c;
    }
    return v;
  };

  for (int t = 0; t < std::max(trials, 1); ++t) {
    Matrix c;
    const SeedSpec s = seed.child(static_cast<std::uint64_t>(t));
    if (t == 0) {
      c = Matrix::Identity(k, k);
    } else if (t % 2 == 1) {
      c = sample_haar_unitary(k, s);
    } else {
      const Matrix v = sample_haar_unitary(k, s.child(0));
      GaussianStream g(s.child(1));
      Eigen::VectorXcd signs(k);
      for (Eigen::Index i = 0; i < k; ++i) signs(i) = g.uniform() < 0.5 ? -1.0 : 1.0;
      c = v * signs.asDiagonal() * v.adjoint();
    }
    double value = consider(c);
    for (int step = 0; step < ascent_steps; ++step) {
      const Matrix w = polar_unitary(sharp_apply(x, c));
      c = polar_unitary(sharp_apply(xs, w));
      const double next = consider(c);
      if (next <= value * (1.0 + 1e-12)) break;
      value = next;
    }
  }
  return best;
}

}  // namespace strongconv
