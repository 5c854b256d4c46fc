#pragma once

#include <limits>
#include <span>
#include <vector>

#include "strongconv/ncpoly.hpp"

namespace strongconv {

/// A tuple of k x k complex matrices with declared operator-norm radii.
///
/// Radii default to +infinity. When a finite radius is declared, the
/// coordinate's operator norm must not exceed it by more than kRadiusSlack.
class MatTuple {
 public:
  static constexpr double kRadiusSlack = 1e-8;
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  MatTuple() = default;
  explicit MatTuple(std::vector<Matrix> entries);
  MatTuple(std::vector<Matrix> entries, std::vector<double> radii);

  std::size_t size() const { return entries_.size(); }
  Eigen::Index dim() const { return entries_.empty() ? 0 : entries_.front().rows(); }

  const Matrix& operator[](std::size_t j) const { return entries_[j]; }
  std::span<const Matrix> matrices() const { return entries_; }
  const std::vector<double>& radii() const { return radii_; }

  /// Same matrices with a common declared radius; throws if violated.
  MatTuple with_radius(double radius) const;

  bool is_hermitian(std::size_t j, double tol = 1e-10) const;

 private:
  std::vector<Matrix> entries_;
  std::vector<double> radii_;
};

/// Concatenation (A_1..A_r, B_1..B_s).
MatTuple join(const MatTuple& a, const MatTuple& b);

/// Coordinate-wise unitary conjugation U A_j U^*.
MatTuple conjugate(const MatTuple& a, const Matrix& u);

inline Matrix evaluate(const NcPoly& p, const MatTuple& a) {
  return evaluate(p, a.matrices());
}

}  // namespace strongconv
