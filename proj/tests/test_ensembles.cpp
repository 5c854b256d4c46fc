#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "strongconv/ensembles.hpp"
#include "strongconv/spectral.hpp"

using namespace strongconv;

namespace {

struct Stats {
  double mean = 0.0, m2 = 0.0;
  int n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / (n - 1) / n); }
};

double tr(const Matrix& m) { return m.trace().real() / static_cast<double>(m.rows()); }

}  // namespace

TEST_CASE("seed specs") {
  const SeedSpec s{42, {1, 2, 3}};
  CHECK(s.to_string() == "42/1.2.3");
  CHECK(SeedSpec::parse("42/1.2.3") == s);
  CHECK(SeedSpec::parse("7/") == SeedSpec{7, {}});
  CHECK(s.child(4) == SeedSpec{42, {1, 2, 3, 4}});
  CHECK(s.key() != s.child(0).key());
  CHECK(SeedSpec{1, {}}.key() != SeedSpec{2, {}}.key());
  CHECK_THROWS(SeedSpec::parse("abc"));
}

TEST_CASE("gaussian stream") {
  GaussianStream g(SeedSpec{5, {}});
  Stats s, u;
  for (int i = 0; i < 100000; ++i) {
    s.add(g.normal());
    const double x = g.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    u.add(x);
  }
  CHECK(std::abs(s.mean) < 4 * s.se());
  CHECK(s.m2 / (s.n - 1) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(u.mean == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gue samples") {
  CHECK_THROWS(sample_gue(0, SeedSpec{}));
  const Matrix x = sample_gue(16, SeedSpec{1, {2}});
  CHECK((x - x.adjoint()).norm() == 0.0);
  CHECK(x == sample_gue(16, SeedSpec{1, {2}}));
  CHECK(x != sample_gue(16, SeedSpec{1, {3}}));

  Stats t2;
  for (int i = 0; i < 10000; ++i) {
    const Matrix a = sample_gue(8, SeedSpec{9, {static_cast<std::uint64_t>(i)}});
    t2.add(tr(a * a));
  }
  CHECK(std::abs(t2.mean - 1.0) < 4 * t2.se());
}

TEST_CASE("gue entry variances") {
  const int k = 6;
  Stats diag, re, im;
  for (int i = 0; i < 4000; ++i) {
    const Matrix a = sample_gue(k, SeedSpec{3, {static_cast<std::uint64_t>(i)}});
    diag.add(a(2, 2).real() * a(2, 2).real() * k);
    re.add(2.0 * a(1, 4).real() * a(1, 4).real() * k);
    im.add(2.0 * a(1, 4).imag() * a(1, 4).imag() * k);
  }
  CHECK(std::abs(diag.mean - 1.0) < 4 * diag.se());
  CHECK(std::abs(re.mean - 1.0) < 4 * re.se());
  CHECK(std::abs(im.mean - 1.0) < 4 * im.se());
}

TEST_CASE("haar samples") {
  const Matrix u = sample_haar_unitary(12, SeedSpec{4, {}});
  CHECK((u.adjoint() * u - Matrix::Identity(12, 12)).norm() <= 1e-12);
  CHECK(u == sample_haar_unitary(12, SeedSpec{4, {}}));

  Stats re, im, sq, u11re, u11im;
  for (int i = 0; i < 10000; ++i) {
    const Matrix v = sample_haar_unitary(4, SeedSpec{8, {static_cast<std::uint64_t>(i)}});
    const Complex t = v.trace();
    re.add(t.real() / 4);
    im.add(t.imag() / 4);
    sq.add(std::norm(t));
    u11re.add(v(0, 0).real());
    u11im.add(v(0, 0).imag());
  }
  CHECK(std::abs(re.mean) < 4 * re.se());
  CHECK(std::abs(im.mean) < 4 * im.se());
  CHECK(std::abs(sq.mean - 1.0) < 4 * sq.se());
  // Without the phase correction the diagonal would be biased.
  CHECK(std::abs(u11re.mean) < 4 * u11re.se());
  CHECK(std::abs(u11im.mean) < 4 * u11im.se());
}

TEST_CASE("tuples") {
  const MatTuple t = sample_tuple(Ensemble::gue, 2, 2, SeedSpec{1, {}});
  CHECK(t.size() == 2);
  CHECK(t[0] != t[1]);
  CHECK(std::isinf(t.radii()[0]));

  const MatTuple h = sample_tuple(Ensemble::haar, 3, 5, SeedSpec{2, {}});
  for (std::size_t j = 0; j < 3; ++j) CHECK((h[j].adjoint() * h[j] - Matrix::Identity(5, 5)).norm() < 1e-12);

  Stats mixed;
  for (int i = 0; i < 10000; ++i) {
    const MatTuple x = sample_tuple(Ensemble::gue, 2, 8, SeedSpec{6, {static_cast<std::uint64_t>(i)}});
    mixed.add(tr(x[0] * x[1]));
  }
  CHECK(std::abs(mixed.mean) < 4 * mixed.se());
}

TEST_CASE("unitary and transpose invariance of gue moments") {
  const int k = 6;
  const Matrix v = sample_haar_unitary(k, SeedSpec{77, {}});
  Stats a, b, c, d;
  for (int i = 0; i < 4000; ++i) {
    const MatTuple x = sample_tuple(Ensemble::gue, 2, k, SeedSpec{12, {static_cast<std::uint64_t>(i)}});
    const Matrix y = v * x[0] * v.adjoint();
    // An off-diagonal entry of V X V^* is again N(0, 1/k) complex.
    a.add(std::norm(y(0, 3)) * k);
    b.add(std::norm(x[0](0, 3)) * k);
    const Matrix p = x[0].transpose(), q = x[1].transpose();
    c.add(tr(p * p * q * q));
    d.add(tr(p * q * p * q));
  }
  CHECK(std::abs(a.mean - b.mean) < 4 * std::hypot(a.se(), b.se()));
  // Degree-4 moments of the transposed pair vs the finite-k GUE values
  // tr(X1^2 X2^2) = 1 and tr(X1 X2 X1 X2) = 1/k^2.
  CHECK(std::abs(c.mean - 1.0) < 4 * c.se());
  CHECK(std::abs(d.mean - 1.0 / (k * k)) < 4 * d.se());
}

TEST_CASE("bounded sampling") {
  const BoundedSample s = sample_tuple_bounded(Ensemble::gue, 2, 32, SeedSpec{3, {}}, kGueRadius);
  for (std::size_t j = 0; j < 2; ++j) CHECK(op_norm(s.tuple[j]) <= kGueRadius + 1e-8);
  CHECK(s.tuple.radii()[0] == kGueRadius);
  CHECK_THROWS(sample_tuple_bounded(Ensemble::gue, 1, 8, SeedSpec{3, {}}, 0.01, 5));
}
