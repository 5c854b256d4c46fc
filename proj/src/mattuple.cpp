#include "strongconv/mattuple.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "strongconv/spectral.hpp"

namespace strongconv {

MatTuple::MatTuple(std::vector<Matrix> entries)
    : MatTuple(std::move(entries), std::vector<double>{}) {}

MatTuple::MatTuple(std::vector<Matrix> entries, std::vector<double> radii)
    : entries_(std::move(entries)), radii_(std::move(radii)) {
  if (entries_.empty()) throw std::invalid_argument("MatTuple: empty tuple");
  const Eigen::Index k = entries_.front().rows();
  if (k < 1) throw std::invalid_argument("MatTuple: dimension must be >= 1");
  for (const auto& m : entries_)
    if (m.rows() != k || m.cols() != k)
      throw std::invalid_argument("MatTuple: matrices must be square of common dimension");
  if (radii_.empty()) radii_.assign(entries_.size(), kUnbounded);
  if (radii_.size() != entries_.size())
    throw std::invalid_argument("MatTuple: radii length does not match tuple length");
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (!(radii_[j] >= 0.0)) throw std::invalid_argument("MatTuple: negative radius");
    if (std::isfinite(radii_[j]) && op_norm(entries_[j]) > radii_[j] + kRadiusSlack)
      throw std::invalid_argument("MatTuple: coordinate " + std::to_string(j + 1) +
                                  " exceeds its declared radius");
  }
}

MatTuple MatTuple::with_radius(double radius) const {
  return MatTuple(entries_, std::vector<double>(entries_.size(), radius));
}

bool MatTuple::is_hermitian(std::size_t j, double tol) const {
  return hermitian_defect(entries_.at(j)) <= tol;
}

MatTuple join(const MatTuple& a, const MatTuple& b) {
  std::vector<Matrix> mats(a.matrices().begin(), a.matrices().end());
  mats.insert(mats.end(), b.matrices().begin(), b.matrices().end());
  std::vector<double> radii = a.radii();
  radii.insert(radii.end(), b.radii().begin(), b.radii().end());
  return MatTuple(std::move(mats), std::move(radii));
}

MatTuple conjugate(const MatTuple& a, const Matrix& u) {
  std::vector<Matrix> mats;
  mats.reserve(a.size());
  for (const auto& m : a.matrices()) mats.push_back(u * m * u.adjoint());
  return MatTuple(std::move(mats), a.radii());
}

}  // namespace strongconv
