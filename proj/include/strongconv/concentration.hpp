#pragma once

// Concentration functions of finite metric-measure spaces and empirical
// deviation profiles for matrix ensembles.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strongconv/ensembles.hpp"
#include "strongconv/ncpoly.hpp"

namespace strongconv {

/// n points with a pseudometric and a probability vector.
class FiniteMMSpace {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Validates symmetry, zero diagonal, nonnegativity, the triangle
  /// inequality (within kTolerance) and that the weights sum to 1.
  FiniteMMSpace(Eigen::MatrixXd dist, Eigen::VectorXd weights);

  int size() const { return static_cast<int>(weights_.size()); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Mass of a subset given as a bitmask over the points.
  double mass(std::uint32_t subset) const;

  /// Points at distance < eps from some point of the subset.
  std::uint32_t neighborhood(std::uint32_t subset, double eps) const;

 private:
  Eigen::MatrixXd dist_;
  Eigen::VectorXd weights_;
};

inline constexpr int kMaxExactPoints = 16;

/// alpha(eps) = sup { mu(N_eps(E)^c) : mu(E) >= 1/2 } over all 2^n subsets,
/// with open neighborhoods. n <= 16.
double alpha_exact(const FiniteMMSpace& space, double eps);

/// If mu(omega) > alpha(eps), checks mu(N_{2 eps}(omega)) >= 1 - alpha(eps).
bool expansion_check(const FiniteMMSpace& space, std::uint32_t omega, double eps);

enum class Statistic { trace_moment, op_norm };

Statistic parse_statistic(const std::string& name);
std::string to_string(Statistic s);

struct DeviationRow {
  int k = 0;
  double epsilon = 0.0;
  double tail_prob = 0.0;
  double neg_log_tail_over_k2 = 0.0;
  bool censored = false;  // no exceedances; the tail is reported at 1/reps
};

struct DeviationProfile {
  std::vector<DeviationRow> rows;  // k-major, then epsilon
  std::vector<double> medians;     // per k
  /// Per epsilon: -log(p)/k^2 nondecreasing along the k grid.
  std::vector<bool> nondecreasing;
};

struct DeviationOptions {
  Ensemble kind = Ensemble::gue;
  Statistic statistic = Statistic::trace_moment;
  std::vector<int> ks;
  std::vector<double> epsilons;
  int reps = 100;
  SeedSpec seed;
  int threads = 1;
};

/// Value of the observable on one sample: Re tr P(X) or ||P(X)||.
double observable(const NcPoly& p, Statistic s, const std::vector<Matrix>& x);

/// Replica i at size k draws its tuple from seed.child(k).child(i).
DeviationProfile deviation_profile(const NcPoly& p, const DeviationOptions& opts);

}  // namespace strongconv
