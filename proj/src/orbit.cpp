#include "strongconv/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strongconv/spectral.hpp"

namespace strongconv {

std::string to_string(Certification c) { return c == Certification::exact ? "exact" : "upper_bound"; }

namespace {

void check_shapes(const MatTuple& a, const MatTuple& b) {
  if (a.size() != b.size()) throw std::invalid_argument("d_orb: tuples differ in length");
  if (a.dim() != b.dim()) throw std::invalid_argument("d_orb: tuples differ in dimension");
}

double norm2_sq(const Matrix& c) { return c.squaredNorm() / static_cast<double>(c.rows()); }

Matrix cayley(const Matrix& w) {
  const Eigen::Index k = w.rows();
  const Matrix id = Matrix::Identity(k, k);
  return (id - 0.5 * w).partialPivLu().solve(id + 0.5 * w);
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }
Matrix antihermitian_part(const Matrix& a) { return (a - a.adjoint()) / Complex(0.0, 2.0); }

Matrix eigen_alignment(const MatTuple& a, const MatTuple& b) {
  const Eigen::Index k = a.dim();
  Matrix sa = Matrix::Zero(k, k), sb = Matrix::Zero(k, k);
  for (std::size_t j = 0; j < a.size(); ++j) {
    sa += a[j];
    sb += b[j];
  }
  const HermEig ea = herm_eig(hermitian_part(sa));
  const HermEig eb = herm_eig(hermitian_part(sb));
  return eb.vectors * ea.vectors.adjoint();
}

struct Descent {
  Matrix u;
  double value;
  int iterations;
};

Descent descend(const MatTuple& a, const MatTuple& b, Matrix u, const OrbitOptions& opts) {
  double g = orbit_objective(a, b, u);
  Matrix grad = orbit_gradient(a, b, u);
  double step = 1.0;
  int it = 0;
  Matrix prev_grad;
  Matrix prev_move;
  for (; it < opts.max_iters; ++it) {
    const double gn2 = grad.squaredNorm();
    if (std::sqrt(gn2) <= opts.grad_tol || g <= 1e-30) break;
    if (it > 0) {
      // Barzilai-Borwein trial step from the last move in the Lie algebra.
      const Matrix dg = grad - prev_grad;
      const double sy = std::abs((prev_move.adjoint() * dg).trace().real());
      if (sy > 0.0) step = std::clamp(prev_move.squaredNorm() / sy, 1e-8, 1e8);
      else step *= 2.0;
    }
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Matrix move = -step * grad;
      const Matrix trial = cayley(move) * u;
      const double gt = orbit_objective(a, b, trial);
      if (gt <= g - opts.armijo * step * gn2) {
        prev_move = move;
        u = trial;
        g = gt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if ((it + 1) % 50 == 0) {
      u = polar_unitary(u);
      g = orbit_objective(a, b, u);
    }
    prev_grad = grad;
    grad = orbit_gradient(a, b, u);
  }
  u = polar_unitary(u);
  return {u, orbit_objective(a, b, u), it};
}

}  // namespace

double dorb_exact_herm1(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("dorb_exact_herm1: dimension mismatch");
  if (hermitian_defect(a) > 1e-10 || hermitian_defect(b) > 1e-10)
    throw std::invalid_argument("dorb_exact_herm1: inputs must be Hermitian");
  const Eigen::VectorXd la = herm_eigenvalues(a);
  const Eigen::VectorXd lb = herm_eigenvalues(b);
  return std::sqrt((la - lb).squaredNorm() / static_cast<double>(a.rows()));
}

double orbit_objective(const MatTuple& a, const MatTuple& b, const Matrix& u) {
  check_shapes(a, b);
  double g = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) g += norm2_sq(u * a[j] * u.adjoint() - b[j]);
  return g;
}

Matrix orbit_gradient(const MatTuple& a, const MatTuple& b, const Matrix& u) {
  check_shapes(a, b);
  const Eigen::Index k = a.dim();
  Matrix m = Matrix::Zero(k, k);
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Matrix at = u * a[j] * u.adjoint();
    const Matrix d = at - b[j];
    m += at * d.adjoint() - d.adjoint() * at;
  }
  // dg = (2/k) Re Tr(W M); project M^* onto skew-Hermitian matrices.
  return (1.0 / static_cast<double>(k)) * (m.adjoint() - m);
}

OrbitResult dorb_upper(const MatTuple& a, const MatTuple& b, const OrbitOptions& opts) {
  check_shapes(a, b);
  const Eigen::Index k = a.dim();
  OrbitResult best;
  best.value = std::numeric_limits<double>::infinity();
  const int restarts = std::max(opts.restarts, 1);
  const bool herm1 = a.size() == 1 && a.is_hermitian(0) && b.is_hermitian(0);
  const double exact = herm1 ? dorb_exact_herm1(a[0], b[0]) : 0.0;
  int rs = 0;
  for (; rs < restarts; ++rs) {
    Matrix u0;
    if (rs == 0)
      u0 = Matrix::Identity(k, k);
    else if (rs == 1)
      u0 = eigen_alignment(a, b);
    else
      u0 = sample_haar_unitary(k, opts.seed.child(static_cast<std::uint64_t>(rs)));
    const Descent d = descend(a, b, std::move(u0), opts);
    best.iterations += d.iterations;
    const double v = std::sqrt(std::max(d.value, 0.0));
    if (v < best.value) {
      best.value = v;
      best.minimizer = d.u;
      best.best_restart = rs;
    }
    if (herm1 && best.value <= exact + 1e-9) {
      best.certified = Certification::exact;
      ++rs;
      break;
    }
  }
  best.restarts_used = rs;
  return best;
}

double dorb_lower(const MatTuple& a, const MatTuple& b) {
  check_shapes(a, b);
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double h = dorb_exact_herm1(hermitian_part(a[j]), hermitian_part(b[j]));
    const double s = dorb_exact_herm1(antihermitian_part(a[j]), antihermitian_part(b[j]));
    acc += h * h + s * s;
  }
  return std::sqrt(acc);
}

EntropyProbe covering_number(std::span<const MatTuple> samples, double epsilon, CoverDistance dist,
                             const OrbitOptions& opts) {
  if (samples.empty()) throw std::invalid_argument("covering_number: no samples");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("covering_number: epsilon must be >= 0");
  const std::size_t r = samples.front().size();
  const Eigen::Index k = samples.front().dim();
  for (const auto& s : samples)
    if (s.size() != r || s.dim() != k) throw std::invalid_argument("covering_number: samples differ in shape");
  if (dist == CoverDistance::exact_herm1 && r != 1)
    throw std::invalid_argument("covering_number: exact_herm1 needs single-matrix samples");

  auto distance = [&](const MatTuple& x, const MatTuple& y) {
    if (dist == CoverDistance::exact_herm1) return dorb_exact_herm1(x[0], y[0]);
    return dorb_upper(x, y, opts).value;
  };

  std::vector<const MatTuple*> net;
  for (const auto& s : samples) {
    bool covered = false;
    for (const MatTuple* c : net)
      if (distance(*c, s) <= epsilon) {
        covered = true;
        break;
      }
    if (!covered) net.push_back(&s);
  }
  EntropyProbe out;
  out.epsilon = epsilon;
  out.sample_count = static_cast<int>(samples.size());
  out.cover_size = static_cast<int>(net.size());
  out.h_estimate = std::log(static_cast<double>(net.size())) / static_cast<double>(k * k);
  return out;
}

}  // namespace strongconv
