#pragma once

// Exact moment oracles for free semicircular families, free Haar unitaries and
// their two-leg tensor products, plus the limit-norm estimator built on them.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "strongconv/ncpoly.hpp"

namespace strongconv {

enum class Leg { none, left, right };

struct OracleLetter {
  Leg leg = Leg::none;
  int index = 1;
  bool starred = false;  // adjoint; exponent -1 for unitaries

  friend bool operator==(const OracleLetter&, const OracleLetter&) = default;
};

using OracleWord = std::vector<OracleLetter>;

struct GeneratorSpec {
  enum class Kind { semicircular, haar_unitary };

  Kind kind = Kind::semicircular;
  int count = 1;
  double mean = 0.0;
  double variance = 1.0;

  static GeneratorSpec semicircular(int r, double mean = 0.0, double variance = 1.0);
  static GeneratorSpec haar(int r);

  /// Throws std::invalid_argument on count < 1 or variance <= 0.
  void validate() const;
};

GeneratorSpec::Kind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorSpec::Kind kind);

/// Number of non-crossing pair partitions of `word` whose blocks join equal
/// indices, i.e. tau(s_{i1} ... s_{in}) for a centered variance-1 free
/// semicircular family. Zero for odd length.
double semicircular_moment(std::span<const int> word);

/// tau of the product of (mean + sqrt(variance) s_i) over the word.
double semicircular_moment(std::span<const int> word, double mean, double variance);

struct UnitaryLetter {
  int index = 1;
  int exponent = 1;  // +1 or -1
};

/// 1 iff the word reduces to the identity in the free group, else 0.
int haar_unitary_moment(std::span<const UnitaryLetter> word);

/// Free-group reduced form of the word (exposed for diagnostics).
std::vector<UnitaryLetter> reduce_free_word(std::span<const UnitaryLetter> word);

/// Moment of a word with every letter on a single leg (legs ignored).
Complex single_leg_moment(const OracleWord& word, const GeneratorSpec& spec);

/// tau (x) tau of a two-leg word: the left and right subsequences (order kept
/// inside each leg) are evaluated separately and multiplied.
Complex tensor_moment(const OracleWord& word, const GeneratorSpec& spec);

/// Generators 1..r go to the left leg, r+1..2r to the right leg (r = spec.count).
OracleWord to_oracle_word(const Word& word, int r);

/// Linear extension of tensor_moment over the terms of p.
Complex poly_moment(const NcPoly& p, const GeneratorSpec& spec);

struct LimitNormOptions {
  int max_letters = 28;              // deg(P) * 2 * q_max must not exceed this
  std::size_t max_terms = 5'000'000;  // per symbolic power (P^*P)^q
};

struct LimitNormResult {
  std::vector<double> moments;             // m_q = tau((P^*P)^q), q = 1..q_max
  std::vector<double> raw_lower_bounds;    // m_q^{1/2q}
  double extrapolated = 0.0;               // rho from the edge-model fit
  double edge_exponent = 0.0;              // fitted alpha
  int fit_first_q = 0;                     // fit window [fit_first_q, q_max]
  double max_raw_bound() const;
};

/// Norm of P in the limit algebra from the moments of (P^*P)^q.
///
/// Raw bounds m_q^{1/2q} are certified lower bounds. The extrapolation fits
/// log m_q = 2q log(rho) - alpha log(q) + c by least squares over the upper
/// half of the q-range and reports rho. Throws std::length_error when the
/// letter or term budget is exceeded and std::logic_error on a negative m_q.
LimitNormResult limit_norm(const NcPoly& p, const GeneratorSpec& spec, int q_max,
                           const LimitNormOptions& opts = {});

/// Fit used by limit_norm, exposed so it can be checked on exact sequences.
/// moments[i] belongs to q = i + 1.
LimitNormResult extrapolate_norm(std::vector<double> moments);

}  // namespace strongconv
