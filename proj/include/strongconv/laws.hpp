#pragma once

// Truncated tracial laws, empirical laws of matrix tuples, weak* distances,
// microstate membership, and strong-convergence discrepancy tables.

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "strongconv/freeprob.hpp"
#include "strongconv/mattuple.hpp"
#include "strongconv/ncpoly.hpp"

namespace strongconv {

/// All *-monomials in generators 1..r of length <= degree_cap, shortest first.
std::vector<Word> star_words(int r, int degree_cap);

/// Moments of all *-monomials of degree <= D in r generators, with radii.
///
/// Construction checks l(1) = 1, l(w^*) = conj(l(w)) and, for finite radii,
/// |l(w)| <= prod of the radii over the letters of w (slack 1e-9).
class Law {
 public:
  using MomentMap = std::map<Word, Complex, WordLess>;

  Law(int generators, int degree_cap, std::vector<double> radii, MomentMap moments);

  int generators() const { return generators_; }
  int degree_cap() const { return degree_cap_; }
  const std::vector<double>& radii() const { return radii_; }
  const MomentMap& moments() const { return moments_; }

  /// Throws std::out_of_range for words beyond the cap.
  Complex operator()(const Word& w) const;

 private:
  int generators_;
  int degree_cap_;
  std::vector<double> radii_;
  MomentMap moments_;
};

/// l_A(w) = tr(w(A)) with tr = Tr / k.
Law empirical_law(const MatTuple& a, int degree_cap);

/// Law of a free family from the moment oracle (single algebra, spec.count
/// generators). Radii default to the support bound |mean| + 2 sqrt(variance)
/// for semicirculars and 1 for unitaries.
Law oracle_law(const GeneratorSpec& spec, int degree_cap);
Law oracle_law(const GeneratorSpec& spec, int degree_cap, std::vector<double> radii);

/// max over *-monomials of degree <= cap of |l1(w) - l2(w)|.
double law_distance(const Law& a, const Law& b, int degree_cap);

struct NeighborhoodSpec {
  Law center;
  double epsilon;
};

/// law_distance(empirical_law(A), center) < epsilon and ||A_j|| <= R_j.
bool is_microstate(const MatTuple& a, const NeighborhoodSpec& nbhd);

/// Joint membership of (A, B) where B is an explicit extension tuple; the
/// center law is over A's generators followed by B's.
bool is_microstate_in_presence(const MatTuple& a, const MatTuple& extension,
                               const NeighborhoodSpec& nbhd);

nlohmann::json to_json(const Law& law);
Law law_from_json(const nlohmann::json& j);

struct DiscrepancyRow {
  std::string poly;
  double finite_moment = 0.0;   // real part of tr-moment at finite k
  double oracle_moment = 0.0;
  double moment_gap = 0.0;      // |finite - oracle| (complex modulus)
  double finite_norm = 0.0;
  double limit_norm = 0.0;      // extrapolated oracle norm
  double limit_lower = 0.0;     // best certified raw lower bound
  double norm_gap = 0.0;        // finite_norm - limit_norm
  std::string error;            // non-empty when the oracle budget was exceeded
};

/// Plain tuple: P over generators 1..r = a.size().
std::vector<DiscrepancyRow> strong_discrepancy(const MatTuple& a, const GeneratorSpec& spec,
                                               std::span<const NcPoly> polys, int q_max,
                                               const LimitNormOptions& opts = {});

/// Tensor legs: P over 2r generators evaluated at (X (x) 1, 1 (x) Y).
std::vector<DiscrepancyRow> strong_discrepancy(const MatTuple& x, const MatTuple& y,
                                               const GeneratorSpec& spec,
                                               std::span<const NcPoly> polys, int q_max,
                                               const LimitNormOptions& opts = {});

}  // namespace strongconv
