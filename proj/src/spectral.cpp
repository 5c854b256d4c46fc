#include "strongconv/spectral.hpp"

#include <algorithm>
#include <limits>

namespace strongconv {

namespace {

Vector random_unit_vector(Eigen::Index n, const SeedSpec& seed) {
  GaussianStream g(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g.complex_normal(1.0);
  return v / v.norm();
}

Matrix orthonormalize_columns(const Matrix& m) {
  std::vector<Vector> kept;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vector v = m.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : kept) v -= q * q.dot(v);
    const double nrm = v.norm();
    if (nrm > 1e-10 * original) kept.push_back(v / nrm);
  }
  Matrix out(m.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

double dist_to_sorted(double x, const std::vector<double>& pts) {
  auto it = std::lower_bound(pts.begin(), pts.end(), x);
  double d = std::numeric_limits<double>::infinity();
  if (it != pts.end()) d = std::min(d, *it - x);
  if (it != pts.begin()) d = std::min(d, x - *std::prev(it));
  return d;
}

double dist_to_intervals(double x, const IntervalUnion& f) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : f.intervals) {
    if (x < a)
      d = std::min(d, a - x);
    else if (x > b)
      d = std::min(d, x - b);
    else
      return 0.0;
  }
  return d;
}

}  // namespace

Matrix polar_unitary(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

HermOp::HermOp(Eigen::Index dim, Apply apply, Matrix deflation)
    : dim_(dim), apply_(std::move(apply)) {
  if (dim_ < 1) throw std::invalid_argument("HermOp: dimension must be >= 1");
  if (deflation.size() > 0) {
    if (deflation.rows() != dim_) throw std::invalid_argument("HermOp: deflation has wrong row count");
    deflation_ = orthonormalize_columns(deflation);
  }
  const SeedSpec check{0x5eedc0deULL, {}};
  const Vector v = random_unit_vector(dim_, check.child(0));
  const Vector w = random_unit_vector(dim_, check.child(1));
  Vector hv(dim_), hw(dim_);
  apply_(v, hv);
  apply_(w, hw);
  const Complex lhs = w.dot(hv);  // <Hv, w>
  const Complex rhs = hw.dot(v);  // <v, Hw>
  const double scale = 1.0 + hv.norm() + hw.norm();
  if (std::abs(lhs - rhs) > 1e-10 * scale)
    throw std::invalid_argument("HermOp: operator failed the Hermitian spot check");
}

HermOp HermOp::from_dense(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("HermOp::from_dense: not square");
  return HermOp(h.rows(), [h](const Vector& in, Vector& out) { out.noalias() = h * in; });
}

void HermOp::project(Vector& v) const {
  if (deflation_.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) v -= deflation_ * (deflation_.adjoint() * v);
}

LanczosResult lanczos_extremes(const HermOp& op, double tol, int max_iter, const SeedSpec& seed) {
  const Eigen::Index n = op.dim();
  const Eigen::Index n_eff = n - op.deflation().cols();
  if (n_eff < 1) throw std::invalid_argument("lanczos_extremes: deflation spans the whole space");
  const int m_max = static_cast<int>(std::min<Eigen::Index>(std::max(max_iter, 1), n_eff));

  Vector v = random_unit_vector(n, seed);
  op.project(v);
  if (v.norm() < 1e-12) v = random_unit_vector(n, seed.child(1));
  op.project(v);
  v /= v.norm();

  std::vector<Vector> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  Vector w(n);

  LanczosResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  double beta_last = 0.0;
  for (int j = 0;; ++j) {
    op.apply(basis[static_cast<std::size_t>(j)], w);
    op.project(w);
    const double a = basis[static_cast<std::size_t>(j)].dot(w).real();
    alpha.push_back(a);
    w -= a * basis[static_cast<std::size_t>(j)];
    if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis[static_cast<std::size_t>(j - 1)];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q * q.dot(w);
      op.project(w);
    }
    beta_last = w.norm();

    const int m = j + 1;
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd e(std::max(m - 1, 0));
    for (int i = 0; i + 1 < m; ++i) e(i) = beta[static_cast<std::size_t>(i)];
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const auto& theta = tri.eigenvalues();
    const auto& s = tri.eigenvectors();
    res.lambda_min = theta(0);
    res.lambda_max = theta(m - 1);
    res.residual_min = beta_last * std::abs(s(m - 1, 0));
    res.residual_max = beta_last * std::abs(s(m - 1, m - 1));
    res.iterations = m;

    const double scale = std::max({1.0, std::abs(res.lambda_min), std::abs(res.lambda_max)});
    const bool breakdown = beta_last <= 1e-13 * scale;
    const bool small_res = res.residual_min <= tol * (1.0 + std::abs(res.lambda_min)) &&
                           res.residual_max <= tol * (1.0 + std::abs(res.lambda_max));
    if (breakdown || m == n_eff) {
      res.converged = true;
      res.residual_min = breakdown ? res.residual_min : 0.0;
      res.residual_max = breakdown ? res.residual_max : 0.0;
    } else {
      res.converged = small_res;
    }
    if (res.converged || m == m_max) {
      res.vector_min = Vector::Zero(n);
      res.vector_max = Vector::Zero(n);
      for (int i = 0; i < m; ++i) {
        res.vector_min += s(i, 0) * basis[static_cast<std::size_t>(i)];
        res.vector_max += s(i, m - 1) * basis[static_cast<std::size_t>(i)];
      }
      res.vector_min /= res.vector_min.norm();
      res.vector_max /= res.vector_max.norm();
      return res;
    }
    beta.push_back(beta_last);
    basis.push_back(w / beta_last);
  }
}

SpectrumSet spectrum_set(std::vector<double> values, double resolution) {
  SpectrumSet out;
  out.source_dim = static_cast<Eigen::Index>(values.size());
  std::sort(values.begin(), values.end());
  for (double x : values) {
    if (!std::isfinite(x)) throw std::invalid_argument("spectrum_set: non-finite value");
    if (out.points.empty() || x - out.points.back() > resolution) out.points.push_back(x);
  }
  return out;
}

SpectrumSet spectrum_set(const Matrix& h) {
  const Eigen::VectorXd ev = herm_eigenvalues(h);
  const double norm = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  return spectrum_set(std::vector<double>(ev.data(), ev.data() + ev.size()), 1e-9 * (1.0 + norm));
}

double hausdorff(const SpectrumSet& e, const SpectrumSet& f) {
  if (e.points.empty() || f.points.empty()) throw std::invalid_argument("hausdorff: empty set");
  double d = 0.0;
  for (double x : e.points) d = std::max(d, dist_to_sorted(x, f.points));
  for (double x : f.points) d = std::max(d, dist_to_sorted(x, e.points));
  return d;
}

double hausdorff(const SpectrumSet& e, const IntervalUnion& f) {
  if (e.points.empty() || f.intervals.empty()) throw std::invalid_argument("hausdorff: empty set");
  for (const auto& [a, b] : f.intervals)
    if (!(a <= b)) throw std::invalid_argument("hausdorff: interval with a > b");
  double d = 0.0;
  for (double x : e.points) d = std::max(d, dist_to_intervals(x, f));
  // The distance to a finite set is piecewise linear; on an interval its
  // maximum sits at an endpoint or at a midpoint between neighbouring points.
  for (const auto& [a, b] : f.intervals) {
    d = std::max({d, dist_to_sorted(a, e.points), dist_to_sorted(b, e.points)});
    for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
      const double mid = 0.5 * (e.points[i] + e.points[i + 1]);
      if (mid >= a && mid <= b) d = std::max(d, dist_to_sorted(mid, e.points));
    }
  }
  return d;
}

}  // namespace strongconv
