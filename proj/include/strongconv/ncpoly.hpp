#pragma once

// Noncommutative *-polynomials over indexed generators T1, T2, ...

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace strongconv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A generator T_n (n >= 1), optionally adjointed.
struct Letter {
  int index = 1;
  bool starred = false;

  Letter adjoint() const { return {index, !starred}; }
  auto operator<=>(const Letter&) const = default;
};

/// Words are stored verbatim; the empty word is the unit.
using Word = std::vector<Letter>;

/// Length-lexicographic order on words, comparing letters by (index, star).
struct WordLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

Word adjoint(const Word& w);
Word concat(const Word& a, const Word& b);

/// "T1 T2' T1"; the empty word formats as "1".
std::string to_string(const Word& w);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Polynomial with complex double coefficients in the free *-algebra.
///
/// Coefficients are pruned after every arithmetic operation: exact zeros and
/// anything with modulus below kPruneRelative * max|coeff| are dropped.
class NcPoly {
 public:
  using TermMap = std::map<Word, Complex, WordLess>;
  static constexpr double kPruneRelative = 1e-15;

  NcPoly() = default;
  NcPoly(Complex scalar);  // NOLINT: scalars promote to constants
  explicit NcPoly(double scalar) : NcPoly(Complex(scalar, 0.0)) {}
  explicit NcPoly(int scalar) : NcPoly(Complex(scalar, 0.0)) {}

  static NcPoly generator(int index, bool starred = false);
  static NcPoly monomial(Word word, Complex coefficient = 1.0);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Maximum word length with a nonzero coefficient (0 for constants and 0).
  int degree() const;
  /// Largest generator index appearing, 0 if none.
  int max_index() const;
  Complex coefficient(const Word& word) const;

  NcPoly& operator+=(const NcPoly& other);
  NcPoly& operator-=(const NcPoly& other);
  NcPoly& operator*=(const NcPoly& other);
  NcPoly& operator*=(Complex scalar);

  friend NcPoly operator+(NcPoly a, const NcPoly& b) { return a += b; }
  friend NcPoly operator-(NcPoly a, const NcPoly& b) { return a -= b; }
  friend NcPoly operator*(const NcPoly& a, const NcPoly& b);
  friend NcPoly operator*(NcPoly a, Complex s) { return a *= s; }
  friend NcPoly operator*(Complex s, NcPoly a) { return a *= s; }
  friend NcPoly operator-(NcPoly a) { return a *= Complex(-1.0, 0.0); }

  friend bool operator==(const NcPoly& a, const NcPoly& b) {
    return a.terms_ == b.terms_;
  }

 private:
  void add_term(const Word& word, Complex c);
  void prune();

  TermMap terms_;
};

NcPoly adjoint(const NcPoly& p);
NcPoly pow(const NcPoly& p, int exponent);

/// Repeated multiplication that throws std::length_error once the term count
/// exceeds `max_terms`.
NcPoly pow_bounded(const NcPoly& p, int exponent, std::size_t max_terms);

/// Parses the polynomial grammar: generators `T<n>`, postfix adjoint `'`,
/// `+ - *`, juxtaposition as product, `^p`, real and imaginary literals
/// (`2.5`, `3i`, `i`), and parentheses.
NcPoly parse_poly(std::string_view text);

/// Parses a single monomial such as "T1 T2' T1" (or "1" for the unit).
Word parse_word(std::string_view text);

/// Canonical text form; parse_poly(to_string(p)) == p.
std::string to_string(const NcPoly& p);

/// Product of the letters of `word` with T_j -> mats[j-1], T_j' -> mats[j-1]^*.
Matrix evaluate(const Word& word, std::span<const Matrix> mats);
Matrix evaluate(const NcPoly& p, std::span<const Matrix> mats);

}  // namespace strongconv
