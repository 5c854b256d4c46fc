#pragma once

// Seeded samplers for GUE and Haar-unitary matrices.
//
// Seed -> value map (fixed; tests depend on it):
//   key   = splitmix64(master_seed)
//   key   = splitmix64(key ^ (splitmix64(p) + 0x9e3779b97f4a7c15)) for p in stream_path
//   bits  = std::mt19937_64(key)
//   U(0,1) from the top 53 bits; N(0,1) by Box-Muller, both outputs used in order.
// GUE entries are drawn in row-major order over the upper triangle:
// X_ii = N / sqrt(k); X_ij = (N_re + i N_im) / sqrt(2k) for i < j.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "strongconv/mattuple.hpp"

namespace strongconv {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> stream_path;

  SeedSpec child(std::uint64_t index) const;
  std::uint64_t key() const;

  /// "master/p0.p1.p2"; "master/" for an empty path.
  std::string to_string() const;
  static SeedSpec parse(std::string_view text);

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

class GaussianStream {
 public:
  explicit GaussianStream(const SeedSpec& seed);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

enum class Ensemble { gue, haar };

Ensemble parse_ensemble(std::string_view name);
std::string to_string(Ensemble e);

Matrix sample_gue(Eigen::Index k, const SeedSpec& seed);
Matrix sample_haar_unitary(Eigen::Index k, const SeedSpec& seed);

/// Matrix of i.i.d. complex Gaussians with E|z|^2 = 1.
Matrix sample_ginibre(Eigen::Index k, const SeedSpec& seed);

/// Coordinate j is drawn from seed.child(j). Radii are left unbounded.
MatTuple sample_tuple(Ensemble kind, int r, Eigen::Index k, const SeedSpec& seed);

struct BoundedSample {
  MatTuple tuple;
  int rejections = 0;
};

/// Discard-and-resample until every coordinate has operator norm <= radius.
/// Attempt a uses seed.child(a). Throws after max_attempts rejections.
BoundedSample sample_tuple_bounded(Ensemble kind, int r, Eigen::Index k, const SeedSpec& seed,
                                   double radius, int max_attempts = 100);

/// Default declared radius for GUE experiments: edge 2 plus margin 0.5.
inline constexpr double kGueRadius = 2.5;

}  // namespace strongconv
