#include "strongconv/ensembles.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "strongconv/spectral.hpp"

namespace strongconv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("malformed seed component '" + std::string(s) + "'");
  return v;
}

}  // namespace

SeedSpec SeedSpec::child(std::uint64_t index) const {
  SeedSpec out = *this;
  out.stream_path.push_back(index);
  return out;
}

std::uint64_t SeedSpec::key() const {
  std::uint64_t h = splitmix64(master_seed);
  for (auto p : stream_path) h = splitmix64(h ^ (splitmix64(p) + 0x9e3779b97f4a7c15ULL));
  return h;
}

std::string SeedSpec::to_string() const {
  std::string out = std::to_string(master_seed) + "/";
  for (std::size_t i = 0; i < stream_path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(stream_path[i]);
  }
  return out;
}

SeedSpec SeedSpec::parse(std::string_view text) {
  SeedSpec out;
  const auto slash = text.find('/');
  out.master_seed = parse_u64(text.substr(0, slash));
  if (slash == std::string_view::npos) return out;
  std::string_view rest = text.substr(slash + 1);
  while (!rest.empty()) {
    const auto dot = rest.find('.');
    out.stream_path.push_back(parse_u64(rest.substr(0, dot)));
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  return out;
}

GaussianStream::GaussianStream(const SeedSpec& seed) : engine_(seed.key()) {}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Complex GaussianStream::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "gue") return Ensemble::gue;
  if (name == "haar") return Ensemble::haar;
  throw std::invalid_argument("unknown ensemble '" + std::string(name) + "'");
}

std::string to_string(Ensemble e) { return e == Ensemble::gue ? "gue" : "haar"; }

Matrix sample_gue(Eigen::Index k, const SeedSpec& seed) {
  if (k < 1) throw std::invalid_argument("sample_gue: dimension must be >= 1");
  GaussianStream g(seed);
  const double diag_sd = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix x(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    x(i, i) = Complex(diag_sd * g.normal(), 0.0);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const Complex z = g.complex_normal(1.0 / static_cast<double>(k));
      x(i, j) = z;
      x(j, i) = std::conj(z);
    }
  }
  return x;
}

Matrix sample_ginibre(Eigen::Index k, const SeedSpec& seed) {
  if (k < 1) throw std::invalid_argument("sample_ginibre: dimension must be >= 1");
  GaussianStream g(seed);
  Matrix z(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) z(i, j) = g.complex_normal(1.0);
  return z;
}

Matrix sample_haar_unitary(Eigen::Index k, const SeedSpec& seed) {
  if (k < 1) throw std::invalid_argument("sample_haar_unitary: dimension must be >= 1");
  const Matrix z = sample_ginibre(k, seed);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  // Z = (Q D)(D^* R) with D the phases of diag(R) makes the triangular factor
  // positive-diagonal, which pins down the Haar-distributed factor Q D.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a == 0.0) ? Complex(1.0, 0.0) : d / a;
  }
  return q;
}

MatTuple sample_tuple(Ensemble kind, int r, Eigen::Index k, const SeedSpec& seed) {
  if (r < 1) throw std::invalid_argument("sample_tuple: r must be >= 1");
  std::vector<Matrix> mats;
  mats.reserve(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    const SeedSpec s = seed.child(static_cast<std::uint64_t>(j));
    mats.push_back(kind == Ensemble::gue ? sample_gue(k, s) : sample_haar_unitary(k, s));
  }
  return MatTuple(std::move(mats));
}

BoundedSample sample_tuple_bounded(Ensemble kind, int r, Eigen::Index k, const SeedSpec& seed,
                                   double radius, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    MatTuple t = sample_tuple(kind, r, k, seed.child(static_cast<std::uint64_t>(attempt)));
    bool ok = true;
    for (std::size_t j = 0; j < t.size() && ok; ++j) ok = op_norm(t[j]) <= radius;
    if (ok) return {t.with_radius(radius), attempt};
  }
  throw std::runtime_error("sample_tuple_bounded: radius " + std::to_string(radius) +
                           " not met after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace strongconv
