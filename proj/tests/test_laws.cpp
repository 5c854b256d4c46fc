#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "strongconv/ensembles.hpp"
#include "strongconv/laws.hpp"

using namespace strongconv;

TEST_CASE("star words") {
  CHECK(star_words(1, 0).size() == 1);
  CHECK(star_words(2, 2).size() == 1 + 4 + 16);
  CHECK(star_words(2, 4).size() == 341);
}

TEST_CASE("empirical laws of explicit tuples") {
  const Law id = empirical_law(MatTuple(std::vector<Matrix>{Matrix::Identity(3, 3)}), 2);
  for (const auto& [w, m] : id.moments()) CHECK(std::abs(m - Complex(1, 0)) < 1e-15);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1, -1;
  const Law l = empirical_law(MatTuple(std::vector<Matrix>{d}), 2);
  CHECK(std::abs(l(parse_word("T1"))) < 1e-15);
  CHECK(std::abs(l(parse_word("T1 T1")) - Complex(1, 0)) < 1e-15);
  CHECK_THROWS_AS(l(parse_word("T1 T1 T1")), std::out_of_range);
}

TEST_CASE("empirical law values and traciality") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 8, SeedSpec{1, {}});
  std::vector<Matrix> mats(a.matrices().begin(), a.matrices().end());
  mats[1] = sample_ginibre(8, SeedSpec{2, {}});
  const MatTuple b{mats};
  const Law l = empirical_law(b, 4);
  for (const auto& [w, m] : l.moments()) {
    const Matrix e = evaluate(w, b.matrices());
    CHECK(std::abs(m - e.trace() / 8.0) < 1e-12);
    if (!w.empty()) {
      Word rot(w.begin() + 1, w.end());
      rot.push_back(w.front());
      CHECK(std::abs(l(rot) - m) <= 1e-10);
    }
    CHECK(std::abs(l(adjoint(w)) - std::conj(m)) < 1e-10);
  }
}

TEST_CASE("gue law near the semicircle") {
  const Law l = empirical_law(sample_tuple(Ensemble::gue, 1, 64, SeedSpec{3, {}}), 4);
  CHECK(std::abs(l(parse_word("T1 T1 T1 T1")) - Complex(2, 0)) < 0.5);

  const Law center = oracle_law(GeneratorSpec::semicircular(2), 4);
  int close = 0;
  for (std::uint64_t s = 0; s < 20; ++s)
    if (law_distance(empirical_law(sample_tuple(Ensemble::gue, 2, 256, SeedSpec{s, {}}), 4), center, 4) < 0.2) ++close;
  CHECK(close >= 19);
}

TEST_CASE("oracle laws") {
  const Law s = oracle_law(GeneratorSpec::semicircular(2), 4);
  CHECK(s(Word{}) == Complex(1, 0));
  CHECK(s(parse_word("T1 T2 T1 T2")) == Complex(0, 0));
  CHECK(s(parse_word("T1 T1 T2 T2")) == Complex(1, 0));
  CHECK(s(parse_word("T1 T1' T1 T1")) == Complex(2, 0));
  CHECK(s.radii() == std::vector<double>{2.0, 2.0});
  const Law h = oracle_law(GeneratorSpec::haar(2), 4);
  CHECK(h(parse_word("T1 T2 T2' T1'")) == Complex(1, 0));
  CHECK(h(parse_word("T1 T1")) == Complex(0, 0));
}

TEST_CASE("law invariants are enforced") {
  Law::MomentMap m;
  m[Word{}] = Complex(2, 0);
  CHECK_THROWS(Law(1, 0, {1.0}, m));
  Law::MomentMap bad;
  bad[Word{}] = Complex(1, 0);
  bad[parse_word("T1")] = Complex(0, 1);
  bad[parse_word("T1'")] = Complex(0, 1);
  CHECK_THROWS(Law(1, 1, {10.0}, bad));
  Law::MomentMap big;
  big[Word{}] = Complex(1, 0);
  big[parse_word("T1")] = Complex(3, 0);
  big[parse_word("T1'")] = Complex(3, 0);
  CHECK_THROWS(Law(1, 1, {2.0}, big));
}

TEST_CASE("law distance") {
  const Law a = empirical_law(sample_tuple(Ensemble::gue, 2, 6, SeedSpec{4, {}}), 3);
  const Law b = empirical_law(sample_tuple(Ensemble::gue, 2, 6, SeedSpec{5, {}}), 3);
  CHECK(law_distance(a, a, 3) == 0.0);
  CHECK(law_distance(a, b, 3) == law_distance(b, a, 3));
  CHECK(law_distance(a, b, 3) > 0.0);
  const Law c = empirical_law(sample_tuple(Ensemble::gue, 1, 6, SeedSpec{5, {}}), 3);
  CHECK_THROWS(law_distance(a, c, 3));
}

TEST_CASE("microstates") {
  const MatTuple a = sample_tuple(Ensemble::gue, 2, 16, SeedSpec{6, {}});
  const Law self = Law(2, 3, {10.0, 10.0}, empirical_law(a, 3).moments());
  CHECK(is_microstate(a, {self, 1e-12}));

  CHECK_THROWS(Law(2, 3, {0.1, 10.0}, self.moments()));
  std::vector<Matrix> scaled(a.matrices().begin(), a.matrices().end());
  scaled[0] *= 6.0;
  CHECK_FALSE(is_microstate(MatTuple(scaled), {self, 1e9}));

  const Law center = oracle_law(GeneratorSpec::semicircular(2), 3, {kGueRadius, kGueRadius});
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MatTuple x = sample_tuple(Ensemble::gue, 2, 128, SeedSpec{s, {7}});
    const bool in = is_microstate(x, {center, 0.3});
    hits += in;
    const Matrix u = sample_haar_unitary(128, SeedSpec{s, {8}});
    CHECK(is_microstate(conjugate(x, u), {center, 0.3}) == in);
    if (is_microstate(x, {center, 0.1})) CHECK(in);
  }
  CHECK(hits >= 18);
}

TEST_CASE("microstates in the presence of an extension") {
  const MatTuple a = sample_tuple(Ensemble::gue, 1, 64, SeedSpec{9, {0}});
  const MatTuple b = sample_tuple(Ensemble::gue, 1, 64, SeedSpec{9, {1}});
  const Law center = oracle_law(GeneratorSpec::semicircular(2), 2, {kGueRadius, kGueRadius});
  CHECK(is_microstate_in_presence(a, b, {center, 0.3}));
  // B = A is far from free.
  CHECK_FALSE(is_microstate_in_presence(a, a, {center, 0.3}));
}

TEST_CASE("json round trip") {
  const Law a = empirical_law(sample_tuple(Ensemble::haar, 2, 5, SeedSpec{10, {}}), 3);
  const Law b = law_from_json(to_json(a));
  CHECK(b.degree_cap() == 3);
  CHECK(b.generators() == 2);
  CHECK(law_distance(a, b, 3) == 0.0);
  const Law o = oracle_law(GeneratorSpec::semicircular(1), 2);
  CHECK(law_from_json(to_json(o)).radii() == o.radii());
  const Law inf = empirical_law(sample_tuple(Ensemble::gue, 1, 4, SeedSpec{1, {}}), 2);
  CHECK(std::isinf(law_from_json(to_json(inf)).radii()[0]));
}

TEST_CASE("strong discrepancy") {
  const MatTuple x = sample_tuple(Ensemble::gue, 1, 512, SeedSpec{11, {}});
  const std::vector<NcPoly> polys{parse_poly("1"), parse_poly("T1")};
  const auto rows = strong_discrepancy(x, GeneratorSpec::semicircular(1), polys, 12);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].moment_gap < 1e-12);
  CHECK(std::abs(rows[0].norm_gap) < 1e-9);
  CHECK(std::abs(rows[1].norm_gap) < 0.15);
  CHECK(rows[1].error.empty());

  const MatTuple y = sample_tuple(Ensemble::gue, 1, 256, SeedSpec{12, {0}});
  const MatTuple z = sample_tuple(Ensemble::gue, 1, 256, SeedSpec{12, {1}});
  const std::vector<NcPoly> tp{parse_poly("T1 + T2")};
  const auto trows = strong_discrepancy(y, z, GeneratorSpec::semicircular(1), tp, 8);
  CHECK(std::abs(trows[0].finite_norm - 4.0) < 0.3);

  const std::vector<NcPoly> heavy{parse_poly("T1 T1 T1 T1")};
  const auto hrows = strong_discrepancy(x, GeneratorSpec::semicircular(1), heavy, 8);
  CHECK_FALSE(hrows[0].error.empty());
}
