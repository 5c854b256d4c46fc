#include "strongconv/concentration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "strongconv/parallel.hpp"
#include "strongconv/spectral.hpp"

namespace strongconv {

FiniteMMSpace::FiniteMMSpace(Eigen::MatrixXd dist, Eigen::VectorXd weights)
    : dist_(std::move(dist)), weights_(std::move(weights)) {
  const Eigen::Index n = weights_.size();
  if (n < 1) throw std::invalid_argument("FiniteMMSpace: no points");
  if (dist_.rows() != n || dist_.cols() != n)
    throw std::invalid_argument("FiniteMMSpace: distance matrix has wrong shape");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) throw std::invalid_argument("FiniteMMSpace: nonzero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(dist_(i, j) >= 0.0) || !std::isfinite(dist_(i, j)))
        throw std::invalid_argument("FiniteMMSpace: distances must be finite and nonnegative");
      if (dist_(i, j) != dist_(j, i)) throw std::invalid_argument("FiniteMMSpace: distance not symmetric");
      for (Eigen::Index m = 0; m < n; ++m)
        if (dist_(i, j) > dist_(i, m) + dist_(m, j) + kTolerance)
          throw std::invalid_argument("FiniteMMSpace: triangle inequality violated");
    }
  }
  if ((weights_.array() < 0.0).any()) throw std::invalid_argument("FiniteMMSpace: negative weight");
  if (std::abs(weights_.sum() - 1.0) > kTolerance)
    throw std::invalid_argument("FiniteMMSpace: weights must sum to 1");
}

// Summed from the highest index down, matching the incremental table below.
double FiniteMMSpace::mass(std::uint32_t subset) const {
  double m = 0.0;
  for (int i = size() - 1; i >= 0; --i)
    if (subset >> i & 1U) m += weights_(i);
  return m;
}

std::uint32_t FiniteMMSpace::neighborhood(std::uint32_t subset, double eps) const {
  std::uint32_t out = 0;
  for (int x = 0; x < size(); ++x)
    for (int e = 0; e < size(); ++e)
      if ((subset >> e & 1U) && dist_(x, e) < eps) {
        out |= 1U << x;
        break;
      }
  return out;
}

namespace {

void require_small(const FiniteMMSpace& space) {
  if (space.size() > kMaxExactPoints)
    throw std::invalid_argument("alpha_exact: exact enumeration needs n <= 16");
}

}  // namespace

double alpha_exact(const FiniteMMSpace& space, double eps) {
  require_small(space);
  const int n = space.size();
  const std::uint32_t full = n == 32 ? ~0U : (1U << n) - 1U;
  std::vector<std::uint32_t> ball(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) ball[static_cast<std::size_t>(e)] = space.neighborhood(1U << e, eps);

  const std::size_t count = std::size_t{1} << n;
  std::vector<double> mass(count, 0.0);
  std::vector<std::uint32_t> nbhd(count, 0);
  for (std::size_t s = 1; s < count; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t rest = s & (s - 1);
    mass[s] = mass[rest] + space.weights()(static_cast<Eigen::Index>(low));
    nbhd[s] = nbhd[rest] | ball[low];
  }
  double alpha = 0.0;
  for (std::size_t s = 1; s < count; ++s)
    if (mass[s] >= 0.5 - FiniteMMSpace::kTolerance) alpha = std::max(alpha, mass[full & ~nbhd[s]]);
  return alpha;
}

bool expansion_check(const FiniteMMSpace& space, std::uint32_t omega, double eps) {
  require_small(space);
  const double alpha = alpha_exact(space, eps);
  if (!(space.mass(omega) > alpha + FiniteMMSpace::kTolerance)) return true;
  return space.mass(space.neighborhood(omega, 2.0 * eps)) >= 1.0 - alpha - FiniteMMSpace::kTolerance;
}

Statistic parse_statistic(const std::string& name) {
  if (name == "trace_moment") return Statistic::trace_moment;
  if (name == "op_norm") return Statistic::op_norm;
  throw std::invalid_argument("unknown statistic: " + name);
}

std::string to_string(Statistic s) { return s == Statistic::trace_moment ? "trace_moment" : "op_norm"; }

double observable(const NcPoly& p, Statistic s, const std::vector<Matrix>& x) {
  const Matrix v = evaluate(p, std::span<const Matrix>(x));
  if (s == Statistic::op_norm) return op_norm(v);
  return v.trace().real() / static_cast<double>(v.rows());
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DeviationProfile deviation_profile(const NcPoly& p, const DeviationOptions& opts) {
  if (opts.ks.empty()) throw std::invalid_argument("deviation_profile: empty k grid");
  if (opts.epsilons.empty()) throw std::invalid_argument("deviation_profile: empty epsilon grid");
  if (opts.reps < 1) throw std::invalid_argument("deviation_profile: reps must be >= 1");
  const int r = std::max(p.max_index(), 1);

  DeviationProfile out;
  std::vector<std::vector<double>> scores(opts.epsilons.size());
  for (int k : opts.ks) {
    if (k < 1) throw std::invalid_argument("deviation_profile: k must be >= 1");
    const SeedSpec at_k = opts.seed.child(static_cast<std::uint64_t>(k));
    const auto values = parallel_map<double>(static_cast<std::size_t>(opts.reps), opts.threads, [&](std::size_t i) {
      const MatTuple x = sample_tuple(opts.kind, r, k, at_k.child(i));
      return observable(p, opts.statistic, std::vector<Matrix>(x.matrices().begin(), x.matrices().end()));
    });
    const double med = median(values);
    out.medians.push_back(med);
    const double k2 = static_cast<double>(k) * k;
    for (std::size_t e = 0; e < opts.epsilons.size(); ++e) {
      const double eps = opts.epsilons[e];
      const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return std::abs(v - med) > eps; });
      DeviationRow row;
      row.k = k;
      row.epsilon = eps;
      row.tail_prob = static_cast<double>(hits) / opts.reps;
      row.censored = hits == 0;
      const double p_eff = row.censored ? 1.0 / opts.reps : row.tail_prob;
      row.neg_log_tail_over_k2 = -std::log(p_eff) / k2;
      scores[e].push_back(row.neg_log_tail_over_k2);
      out.rows.push_back(row);
    }
  }
  for (const auto& s : scores) out.nondecreasing.push_back(std::is_sorted(s.begin(), s.end()));
  return out;
}

}  // namespace strongconv
