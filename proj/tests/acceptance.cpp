#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "strongconv/concentration.hpp"
#include "strongconv/ensembles.hpp"
#include "strongconv/experiments.hpp"
#include "strongconv/freeprob.hpp"
#include "strongconv/orbit.hpp"
#include "strongconv/tensorops.hpp"

using namespace strongconv;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome oracle_exactness() {
  for (int m = 0; m <= 8; ++m) {
    const std::vector<int> w(static_cast<std::size_t>(2 * m), 1);
    if (semicircular_moment(w) != oracle::catalan(m)) return {false, "catalan mismatch at m=" + std::to_string(m)};
  }
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> idx(1, 3), sign(0, 1), len(0, 8);
  int trivial = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<int> s;
    const int l = len(rng);
    for (int i = 0; i < l; ++i) s.push_back(idx(rng) * (sign(rng) ? 1 : -1));
    if (t % 2) {
      std::vector<int> tail(s.rbegin(), s.rend());
      for (int& x : tail) x = -x;
      std::shuffle(tail.begin(), tail.begin() + std::min<std::ptrdiff_t>(2, std::ssize(tail)), rng);
      s.insert(s.end(), tail.begin(), tail.end());
    }
    std::vector<UnitaryLetter> w;
    for (int x : s) w.push_back({std::abs(x), x > 0 ? 1 : -1});
    const int expect = oracle::free_word_is_trivial(s) ? 1 : 0;
    trivial += expect;
    if (haar_unitary_moment(w) != expect) return {false, "free reduction mismatch on word " + std::to_string(t)};
  }
  return {true, "catalan m<=8 exact; 10000 words agree (" + std::to_string(trivial) + " trivial)"};
}

Outcome asymptotic_freeness() {
  const RunRecord r = run_scenario(spec_from_json("asym-free", json{{"ks", {64}}, {"reps", 200}, {"degree_cap", 4}}));
  const auto& row = r.tables.at("asym_free_summary").rows.at(0);
  const double gap = row[1].get<double>();
  return {gap <= 0.05, "max |mc - oracle| = " + fmt("%.4f", gap) + " at " + row[2].get<std::string>()};
}

Outcome single_tuple_strong() {
  const RunRecord r = run_scenario(spec_from_json(
      "ht-strong", json{{"ks", {64, 128, 256, 512}}, {"r", 1}, {"reps", 20}, {"polys", {"T1"}}, {"q_max", 8}}));
  int good = 0;
  for (const auto& row : r.tables.at("ht_strong").rows)
    if (row[0] == 512 && row[9].get<double>() < 0.2) ++good;
  std::vector<double> med;
  for (const auto& row : r.tables.at("ht_strong_summary").rows) med.push_back(row[4].get<double>());
  bool decreasing = med.size() == 4;
  for (std::size_t i = 1; i < med.size(); ++i) decreasing = decreasing && med[i] < med[i - 1];
  std::string d = std::to_string(good) + "/20 below 0.2 at k=512; medians";
  for (double m : med) d += " " + fmt("%.4f", m);
  return {good >= 18 && decreasing, d};
}

Outcome limit_norm_estimator() {
  const LimitNormResult r = limit_norm(parse_poly("T1"), GeneratorSpec::semicircular(1), 12);
  const bool raw_ok = std::all_of(r.raw_lower_bounds.begin(), r.raw_lower_bounds.end(),
                                  [](double b) { return b <= 2.0 + 1e-9; });
  return {r.extrapolated >= 1.95 && r.extrapolated <= 2.05 && raw_ok,
          "rho = " + fmt("%.6f", r.extrapolated) + ", max raw = " + fmt("%.6f", r.max_raw_bound())};
}

Outcome tensor_dense_oracle() {
  double worst_norm = 0.0, worst_action = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const int k = 1 + static_cast<int>(t % 6);
    TensorOp x(k);
    GaussianStream g(SeedSpec{t, {1}});
    Matrix dense = Matrix::Zero(k * k, k * k);
    for (std::uint64_t j = 0; j < 1 + t % 3; ++j) {
      const Matrix l = sample_ginibre(k, SeedSpec{t, {2, j}}), rt = sample_ginibre(k, SeedSpec{t, {3, j}});
      const Complex c = g.complex_normal();
      x.add_term(l, rt, c);
      dense += c * oracle::kron_action(l, rt);
    }
    const double n = oracle::dense_op_norm(dense);
    worst_norm = std::max(worst_norm, std::abs(tensor_norm(x).value - n));
    const Matrix c = sample_ginibre(k, SeedSpec{t, {4}});
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(c.data(), c.size());
    const Matrix expect = oracle::unvec(dense * v, k);
    worst_action = std::max(worst_action, (sharp_apply(x, c) - expect).norm() / (1.0 + expect.norm()));
  }
  return {worst_norm <= 1e-8 && worst_action <= 1e-12,
          "max norm error " + fmt("%.2e", worst_norm) + ", max action error " + fmt("%.2e", worst_action)};
}

Outcome orbit_oracle() {
  double worst_exact = 0.0, worst_conj = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const int k = 1 + static_cast<int>(t % 32);
    const Matrix a = sample_gue(k, SeedSpec{t, {1}}), b = sample_gue(k, SeedSpec{t, {2}});
    const MatTuple ta(std::vector<Matrix>{a}), tb(std::vector<Matrix>{b});
    worst_exact = std::max(worst_exact, std::abs(dorb_upper(ta, tb).value - dorb_exact_herm1(a, b)));

    const MatTuple x = sample_tuple(Ensemble::gue, 2, 8, SeedSpec{t, {3}});
    const Matrix u = sample_haar_unitary(8, SeedSpec{t, {4}});
    worst_conj = std::max(worst_conj, dorb_upper(x, conjugate(x, u)).value);
  }
  return {worst_exact <= 1e-6 && worst_conj <= 1e-6,
          "max |upper - exact| " + fmt("%.2e", worst_exact) + ", max conjugate residual " + fmt("%.2e", worst_conj)};
}

Outcome collapse_probe() {
  std::vector<double> med;
  for (std::uint64_t k : {32, 64, 128, 256}) {
    std::vector<double> d;
    for (std::uint64_t i = 0; i < 50; ++i)
      d.push_back(dorb_exact_herm1(sample_gue(static_cast<Eigen::Index>(k), SeedSpec{7, {k, i, 0}}),
                                   sample_gue(static_cast<Eigen::Index>(k), SeedSpec{7, {k, i, 1}})));
    med.push_back(median(d));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < med.size(); ++i) decreasing = decreasing && med[i] < med[i - 1];
  std::string d = "medians";
  for (double m : med) d += " " + fmt("%.4f", m);
  return {decreasing && med.back() < 0.1, d};
}

Outcome expansion_inequality() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> size(1, 8), dims(1, 3);
  for (int t = 0; t < 10000; ++t) {
    const int n = size(rng), dim = dims(rng);
    Eigen::MatrixXd pts(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) pts(i, j) = t % 2 ? u(rng) : std::round(4 * u(rng)) / 4;
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist(i, j) = (pts.row(i) - pts.row(j)).norm();
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = 0.01 + u(rng);
    w /= w.sum();
    const FiniteMMSpace s(dist, w);
    const auto omega = static_cast<std::uint32_t>(rng() & ((1U << n) - 1));
    if (!expansion_check(s, omega, 0.02 + u(rng))) return {false, "counterexample at trial " + std::to_string(t)};
  }
  return {true, "10000 spaces, no counterexample"};
}

Outcome kernel_identity() {
  double worst = 0.0;
  for (int k : {8, 32})
    for (std::uint64_t s = 0; s < 3; ++s) {
      const MatTuple x = sample_tuple(Ensemble::gue, 2, k, SeedSpec{s, {static_cast<std::uint64_t>(k)}});
      const std::vector<double> w{0.5, 0.5};
      worst = std::max(worst, nonamen_laplacian(x, w).lambda_min);
    }
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1;
  const MatTuple x(std::vector<Matrix>{d});
  const std::vector<double> one{1.0};
  const double gap = nonamen_laplacian(x, one).lambda_gap;
  Matrix dense = Matrix::Zero(4, 4);
  const TensorOp op = nonamen_operator(x, one);
  for (const auto& t : op.terms()) dense += t.coeff * oracle::kron_action(t.left, t.right);
  const Eigen::VectorXd ev = herm_eigenvalues(dense);
  double dense_gap = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-10) {
      dense_gap = ev(i);
      break;
    }
  return {worst <= 1e-10 && std::abs(gap - 1.0) <= 1e-9 && std::abs(dense_gap - 1.0) <= 1e-12,
          "max lambda_min " + fmt("%.2e", worst) + ", diag(0,1) gap " + fmt("%.12f", gap)};
}

Outcome witness() {
  double worst_fixed = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const MatTuple u = sample_tuple(Ensemble::haar, 2 + static_cast<int>(s % 2), 32, SeedSpec{s, {9}});
    worst_fixed = std::max(worst_fixed, std::abs(haagerup_witness(u, u).value - 1.0));
  }
  const MatTuple u = sample_tuple(Ensemble::haar, 2, 128, SeedSpec{10, {0}});
  const MatTuple v = sample_tuple(Ensemble::haar, 2, 128, SeedSpec{10, {1}});
  const double w = haagerup_witness(u, v).value;
  const double r = 2.0;
  const double analytic = 2.0 * std::sqrt(r - 1.0) / r;
  return {worst_fixed <= 1e-8 && w <= 1.0 + 1e-6,
          "fixed point error " + fmt("%.2e", worst_fixed) + "; independent r=2 k=128 witness " + fmt("%.6f", w) +
              " vs free limit " + fmt("%.6f", analytic)};
}

json tiny_config(const std::string& id) {
  json c{{"reps", 2}};
  if (id == "ht-strong") c.update({{"ks", {16, 32}}, {"q_max", 6}});
  if (id == "asym-free") c.update({{"ks", {16}}, {"degree_cap", 3}});
  if (id == "tensor-probe") c.update({{"ks", {4, 8}}, {"q_max", 6}});
  if (id == "collapse") c.update({{"ks", {4, 8}}, {"restarts", 2}, {"max_iters", 100}});
  if (id == "entropy-probe") c.update({{"ks", {4, 8}}, {"reps", 10}});
  if (id == "concentration") c.update({{"ks", {8, 16}}, {"reps", 20}});
  if (id == "nonamen-gap") c.update({{"ks", {3, 5}}});
  if (id == "haar-variant")
    c.update({{"ks", {4, 8}}, {"q_max", 4}, {"restarts", 2}, {"max_iters", 100}, {"degree_cap", 2}});
  if (id == "witness") c.update({{"ks", {4, 8}}, {"q_max", 5}});
  c["seed"] = 20260101;
  return c;
}

Outcome determinism() {
  std::string bad;
  for (const auto& id : scenario_ids()) {
    const ScenarioSpec spec = spec_from_json(id, tiny_config(id));
    const RunRecord a = run_scenario(spec, 1), b = run_scenario(spec, 4), c = run_scenario(spec, 1);
    if (!(a.tables == b.tables && a.tables == c.tables)) bad += " " + id;
  }
  return {bad.empty(), bad.empty() ? "9 scenarios identical across 1 and 4 threads" : "differs:" + bad};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle exactness", oracle_exactness},
      {"asymptotic freeness", asymptotic_freeness},
      {"single-tuple strong convergence", single_tuple_strong},
      {"limit-norm estimator", limit_norm_estimator},
      {"tensor dense-oracle equivalence", tensor_dense_oracle},
      {"orbit oracle", orbit_oracle},
      {"collapse probe", collapse_probe},
      {"expansion inequality brute force", expansion_inequality},
      {"kernel identity", kernel_identity},
      {"witness fixed point", witness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
