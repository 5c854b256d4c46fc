#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "strongconv/ensembles.hpp"
#include "strongconv/orbit.hpp"
#include "strongconv/spectral.hpp"

using namespace strongconv;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i, i) = x, ++i;
  return d;
}

MatTuple single(const Matrix& m) { return MatTuple(std::vector<Matrix>{m}); }

}  // namespace

TEST_CASE("exact single-matrix distance") {
  CHECK(dorb_exact_herm1(diag({0, 1}), diag({1, 0})) == doctest::Approx(0));
  CHECK(dorb_exact_herm1(diag({0, 2}), Matrix::Zero(2, 2)) == doctest::Approx(std::sqrt(2.0)));
  const Matrix x = sample_gue(10, SeedSpec{1, {}});
  CHECK(dorb_exact_herm1(x, x) == 0.0);
  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(dorb_exact_herm1(bad, bad), std::invalid_argument);

  const double grid = oracle::dorb_u2_grid({diag({0, 2})}, {Matrix::Zero(2, 2)}, 24);
  CHECK(std::abs(grid - std::sqrt(2.0)) < 1e-4);
}

TEST_CASE("exact distance is a pseudometric") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const int k = 1 + static_cast<int>(t % 16);
    const Matrix a = sample_gue(k, SeedSpec{t, {0}}), b = sample_gue(k, SeedSpec{t, {1}}), c = sample_gue(k, SeedSpec{t, {2}});
    CHECK(dorb_exact_herm1(a, b) == doctest::Approx(dorb_exact_herm1(b, a)));
    CHECK(dorb_exact_herm1(a, c) <= dorb_exact_herm1(a, b) + dorb_exact_herm1(b, c) + 1e-12);
  }
}

TEST_CASE("gradient matches finite differences") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 5, SeedSpec{2, {0}});
  const MatTuple b = sample_tuple(Ensemble::gue, 2, 5, SeedSpec{2, {1}});
  const Matrix u = sample_haar_unitary(5, SeedSpec{2, {2}});
  const Matrix g = orbit_gradient(a, b, u);
  CHECK((g + g.adjoint()).norm() < 1e-12);
  Matrix w = sample_ginibre(5, SeedSpec{2, {3}});
  w = (0.5 * (w - w.adjoint())).eval();
  const double h = 1e-6;
  auto expm = [](const Matrix& s) {
    const HermEig e = herm_eig(Matrix(Complex(0, -1) * s));  // s = i H
    return Matrix(e.vectors * (Complex(0, 1) * e.values.cast<Complex>()).array().exp().matrix().asDiagonal() * e.vectors.adjoint());
  };
  const double fd = (orbit_objective(a, b, expm(h * w) * u) - orbit_objective(a, b, expm(-h * w) * u)) / (2 * h);
  const double an = (g.adjoint() * w).trace().real();
  CHECK(fd == doctest::Approx(an).epsilon(1e-5));
}

TEST_CASE("upper bound matches the exact value on hermitian pairs") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const int k = 2 + static_cast<int>(t % 31);
    const Matrix a = sample_gue(k, SeedSpec{t, {10}}), b = sample_gue(k, SeedSpec{t, {11}});
    const OrbitResult r = dorb_upper(single(a), single(b));
    CHECK(std::abs(r.value - dorb_exact_herm1(a, b)) <= 1e-6);
    CHECK(r.certified == Certification::exact);
    CHECK((r.minimizer.adjoint() * r.minimizer - Matrix::Identity(k, k)).norm() <= 1e-10);
  }
}

TEST_CASE("conjugated tuples are recovered") {
  for (std::uint64_t t = 0; t < 5; ++t) {
    const MatTuple a = sample_tuple(Ensemble::gue, 2, 8, SeedSpec{t, {20}});
    const Matrix v = sample_haar_unitary(8, SeedSpec{t, {21}});
    const OrbitResult r = dorb_upper(a, conjugate(a, v));
    CHECK(r.value <= 1e-6);
    CHECK(r.certified == Certification::upper_bound);
  }
}

TEST_CASE("two-by-two tuples against a grid search") {
  for (std::uint64_t t = 0; t < 5; ++t) {
    const MatTuple a = sample_tuple(Ensemble::gue, 2, 2, SeedSpec{t, {30}});
    const MatTuple b = sample_tuple(Ensemble::gue, 2, 2, SeedSpec{t, {31}});
    const double grid = oracle::dorb_u2_grid({a[0], a[1]}, {b[0], b[1]}, 40);
    const OrbitResult r = dorb_upper(a, b);
    CHECK(r.value <= grid + 1e-9);
    CHECK(r.value >= grid - 0.05);
    CHECK(dorb_lower(a, b) <= r.value + 1e-8);
  }
}

TEST_CASE("lower bounds") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 6, SeedSpec{40, {}});
  CHECK(dorb_lower(a, a) == doctest::Approx(0).epsilon(1e-12));
  const Matrix x = sample_gue(6, SeedSpec{41, {}}), y = sample_gue(6, SeedSpec{42, {}});
  CHECK(dorb_lower(single(x), single(y)) == doctest::Approx(dorb_exact_herm1(x, y)));
  const MatTuple p(std::vector<Matrix>{diag({0, 2}), diag({1, 1})});
  const MatTuple q(std::vector<Matrix>{Matrix::Zero(2, 2), diag({1, 1})});
  CHECK(dorb_lower(p, q) >= std::sqrt(2.0) - 1e-12);

  for (std::uint64_t t = 0; t < 10; ++t) {
    std::vector<Matrix> ma{sample_gue(5, SeedSpec{t, {50}}), sample_ginibre(5, SeedSpec{t, {51}})};
    std::vector<Matrix> mb{sample_gue(5, SeedSpec{t, {52}}), sample_ginibre(5, SeedSpec{t, {53}})};
    const MatTuple ta(ma), tb(mb);
    OrbitOptions o;
    o.restarts = 3;
    const OrbitResult r = dorb_upper(ta, tb, o);
    CHECK(dorb_lower(ta, tb) <= r.value + 1e-8);
  }
}

TEST_CASE("conjugation invariance") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 6, SeedSpec{60, {0}});
  const MatTuple b = sample_tuple(Ensemble::gue, 2, 6, SeedSpec{60, {1}});
  const Matrix w = sample_haar_unitary(6, SeedSpec{60, {2}});
  OrbitOptions o;
  o.restarts = 12;
  const double v1 = dorb_upper(a, b, o).value;
  const double v2 = dorb_upper(conjugate(a, w), b, o).value;
  CHECK(std::abs(v1 - v2) <= 1e-6);
}

TEST_CASE("shape mismatches are rejected") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 4, SeedSpec{1, {}});
  const MatTuple b = sample_tuple(Ensemble::gue, 1, 4, SeedSpec{1, {}});
  const MatTuple c = sample_tuple(Ensemble::gue, 2, 5, SeedSpec{1, {}});
  CHECK_THROWS_AS(dorb_upper(a, b), std::invalid_argument);
  CHECK_THROWS_AS(dorb_upper(a, c), std::invalid_argument);
}

TEST_CASE("covering numbers") {
  const Matrix x = sample_gue(8, SeedSpec{70, {}});
  const std::vector<MatTuple> same(5, single(x));
  CHECK(covering_number(same, 0.1, CoverDistance::exact_herm1).cover_size == 1);

  std::vector<MatTuple> gue;
  for (std::uint64_t s = 0; s < 100; ++s) gue.push_back(single(sample_gue(32, SeedSpec{s, {71}})));
  CHECK(covering_number(gue, 0.0, CoverDistance::exact_herm1).cover_size == 100);
  const EntropyProbe p = covering_number(gue, 0.5, CoverDistance::exact_herm1);
  CHECK(p.cover_size <= 5);
  CHECK(p.h_estimate == doctest::Approx(std::log(p.cover_size) / (32.0 * 32.0)));

  int prev = 1 << 30;
  for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
    const int c = covering_number(gue, eps, CoverDistance::exact_herm1).cover_size;
    CHECK(c <= prev);
    CHECK(c <= 100);
    prev = c;
  }

  std::vector<MatTuple> pairs;
  for (std::uint64_t s = 0; s < 6; ++s) pairs.push_back(sample_tuple(Ensemble::gue, 2, 4, SeedSpec{s, {72}}));
  OrbitOptions o;
  o.restarts = 2;
  const EntropyProbe q = covering_number(pairs, 10.0, CoverDistance::dorb_upper, o);
  CHECK(q.cover_size == 1);
  CHECK_THROWS(covering_number(std::vector<MatTuple>{}, 0.1, CoverDistance::exact_herm1));
}
