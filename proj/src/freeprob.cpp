#include "strongconv/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace strongconv {

GeneratorSpec GeneratorSpec::semicircular(int r, double mean, double variance) {
  GeneratorSpec s{Kind::semicircular, r, mean, variance};
  s.validate();
  return s;
}

GeneratorSpec GeneratorSpec::haar(int r) {
  GeneratorSpec s{Kind::haar_unitary, r, 0.0, 1.0};
  s.validate();
  return s;
}

void GeneratorSpec::validate() const {
  if (count < 1) throw std::invalid_argument("GeneratorSpec: count must be >= 1");
  if (kind == Kind::semicircular && !(variance > 0.0))
    throw std::invalid_argument("GeneratorSpec: semicircular variance must be > 0");
}

GeneratorSpec::Kind parse_generator_kind(const std::string& name) {
  if (name == "semicircular") return GeneratorSpec::Kind::semicircular;
  if (name == "haar") return GeneratorSpec::Kind::haar_unitary;
  throw std::invalid_argument("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorSpec::Kind kind) {
  return kind == GeneratorSpec::Kind::semicircular ? "semicircular" : "haar";
}

double semicircular_moment(std::span<const int> word) {
  return semicircular_moment(word, 0.0, 1.0);
}

double semicircular_moment(std::span<const int> word, double mean, double variance) {
  const std::size_t n = word.size();
  if (n == 0) return 1.0;
  if (mean == 0.0 && n % 2 == 1) return 0.0;
  // g(i, j) = moment of the half-open subword [i, j). The first letter either
  // contributes the mean or pairs with a later equal index m, which splits
  // the word into the independent intervals (i, m) and (m, j).
  const std::size_t w = n + 1;
  std::vector<double> g(w * w, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return g[i * w + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, i) = 1.0;
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      double acc = (mean != 0.0) ? mean * at(i + 1, j) : 0.0;
      for (std::size_t m = i + 1; m < j; ++m) {
        if (word[m] != word[i]) continue;
        acc += variance * at(i + 1, m) * at(m + 1, j);
      }
      at(i, j) = acc;
    }
  }
  return at(0, n);
}

std::vector<UnitaryLetter> reduce_free_word(std::span<const UnitaryLetter> word) {
  std::vector<UnitaryLetter> stack;
  for (const auto& l : word) {
    if (l.exponent != 1 && l.exponent != -1)
      throw std::invalid_argument("haar_unitary_moment: exponents must be +1 or -1");
    if (!stack.empty() && stack.back().index == l.index && stack.back().exponent == -l.exponent)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return stack;
}

int haar_unitary_moment(std::span<const UnitaryLetter> word) {
  return reduce_free_word(word).empty() ? 1 : 0;
}

Complex single_leg_moment(const OracleWord& word, const GeneratorSpec& spec) {
  for (const auto& l : word)
    if (l.index < 1 || l.index > spec.count)
      throw std::out_of_range("oracle: generator index " + std::to_string(l.index) +
                              " outside 1.." + std::to_string(spec.count));
  if (spec.kind == GeneratorSpec::Kind::semicircular) {
    std::vector<int> idx;
    idx.reserve(word.size());
    for (const auto& l : word) idx.push_back(l.index);
    return {semicircular_moment(idx, spec.mean, spec.variance), 0.0};
  }
  std::vector<UnitaryLetter> u;
  u.reserve(word.size());
  for (const auto& l : word) u.push_back({l.index, l.starred ? -1 : 1});
  return {static_cast<double>(haar_unitary_moment(u)), 0.0};
}

Complex tensor_moment(const OracleWord& word, const GeneratorSpec& spec) {
  OracleWord left, right;
  for (const auto& l : word) (l.leg == Leg::right ? right : left).push_back(l);
  const Complex ml = single_leg_moment(left, spec);
  if (ml == Complex(0.0, 0.0)) return ml;
  return ml * single_leg_moment(right, spec);
}

OracleWord to_oracle_word(const Word& word, int r) {
  OracleWord out;
  out.reserve(word.size());
  for (const auto& l : word) {
    if (l.index <= r)
      out.push_back({Leg::left, l.index, l.starred});
    else if (l.index <= 2 * r)
      out.push_back({Leg::right, l.index - r, l.starred});
    else
      throw std::out_of_range("oracle: generator T" + std::to_string(l.index) +
                              " outside the 2r = " + std::to_string(2 * r) + " tensor generators");
  }
  return out;
}

Complex poly_moment(const NcPoly& p, const GeneratorSpec& spec) {
  spec.validate();
  Complex acc(0.0, 0.0);
  for (const auto& [w, c] : p.terms()) acc += c * tensor_moment(to_oracle_word(w, spec.count), spec);
  return acc;
}

double LimitNormResult::max_raw_bound() const {
  return raw_lower_bounds.empty() ? 0.0
                                  : *std::max_element(raw_lower_bounds.begin(), raw_lower_bounds.end());
}

LimitNormResult extrapolate_norm(std::vector<double> moments) {
  LimitNormResult out;
  const int q_max = static_cast<int>(moments.size());
  for (int q = 1; q <= q_max; ++q) {
    const double m = moments[static_cast<std::size_t>(q - 1)];
    out.raw_lower_bounds.push_back(m > 0.0 ? std::pow(m, 1.0 / (2.0 * q)) : 0.0);
  }
  out.moments = std::move(moments);

  int first = q_max / 2 + 1;
  first = std::max(1, std::min(first, q_max - 2));
  out.fit_first_q = first;

  std::vector<int> qs;
  for (int q = first; q <= q_max; ++q)
    if (out.moments[static_cast<std::size_t>(q - 1)] > 0.0) qs.push_back(q);
  if (qs.size() < 3) {
    out.extrapolated = out.max_raw_bound();
    return out;
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(qs.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(qs.size()));
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double q = qs[i];
    const auto row = static_cast<Eigen::Index>(i);
    a(row, 0) = 2.0 * q;
    a(row, 1) = -std::log(q);
    a(row, 2) = 1.0;
    b(row) = std::log(out.moments[static_cast<std::size_t>(qs[i] - 1)]);
  }
  const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
  out.extrapolated = std::exp(x(0));
  out.edge_exponent = x(1);
  return out;
}

LimitNormResult limit_norm(const NcPoly& p, const GeneratorSpec& spec, int q_max,
                           const LimitNormOptions& opts) {
  spec.validate();
  if (q_max < 1) throw std::invalid_argument("limit_norm: q_max must be >= 1");
  if (p.degree() * 2 * q_max > opts.max_letters)
    throw std::length_error("limit_norm: degree " + std::to_string(p.degree()) + " with q_max " +
                            std::to_string(q_max) + " exceeds the letter budget of " +
                            std::to_string(opts.max_letters));
  const NcPoly gram = adjoint(p) * p;
  NcPoly power(Complex(1.0, 0.0));
  std::vector<double> moments;
  for (int q = 1; q <= q_max; ++q) {
    power = power * gram;
    if (power.size() > opts.max_terms)
      throw std::length_error("limit_norm: (P*P)^" + std::to_string(q) + " has " +
                              std::to_string(power.size()) + " terms, over the budget of " +
                              std::to_string(opts.max_terms));
    double scale = 0.0;
    for (const auto& [w, c] : power.terms()) scale += std::abs(c);
    const double m = poly_moment(power, spec).real();
    if (m < -1e-9 * (1.0 + scale))
      throw std::logic_error("limit_norm: negative moment tau((P*P)^" + std::to_string(q) +
                             ") = " + std::to_string(m));
    moments.push_back(std::max(m, 0.0));
  }
  return extrapolate_norm(std::move(moments));
}

}  // namespace strongconv
