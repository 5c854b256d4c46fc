#include "strongconv/ncpoly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace strongconv {

Word adjoint(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->adjoint());
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += 'T';
    out += std::to_string(w[i].index);
    if (w[i].starred) out += '\'';
  }
  return out;
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      position_(position) {}

// ---------------------------------------------------------------------------

NcPoly::NcPoly(Complex scalar) {
  if (scalar != Complex(0.0, 0.0)) terms_.emplace(Word{}, scalar);
}

NcPoly NcPoly::generator(int index, bool starred) {
  if (index < 1) throw std::invalid_argument("generator index must be >= 1");
  return monomial(Word{Letter{index, starred}});
}

NcPoly NcPoly::monomial(Word word, Complex coefficient) {
  for (const auto& l : word) {
    if (l.index < 1) throw std::invalid_argument("generator index must be >= 1");
  }
  NcPoly p;
  if (coefficient != Complex(0.0, 0.0)) p.terms_.emplace(std::move(word), coefficient);
  return p;
}

int NcPoly::degree() const {
  // Map is length-ordered, so the last key is a longest word.
  return terms_.empty() ? 0 : static_cast<int>(terms_.rbegin()->first.size());
}

int NcPoly::max_index() const {
  int m = 0;
  for (const auto& [w, c] : terms_)
    for (const auto& l : w) m = std::max(m, l.index);
  return m;
}

Complex NcPoly::coefficient(const Word& word) const {
  auto it = terms_.find(word);
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

void NcPoly::add_term(const Word& word, Complex c) {
  auto [it, inserted] = terms_.try_emplace(word, c);
  if (!inserted) it->second += c;
}

void NcPoly::prune() {
  double max_abs = 0.0;
  for (const auto& [w, c] : terms_) max_abs = std::max(max_abs, std::abs(c));
  const double cut = kPruneRelative * max_abs;
  std::erase_if(terms_, [cut](const auto& kv) {
    const double a = std::abs(kv.second);
    return a == 0.0 || a < cut;
  });
}

NcPoly& NcPoly::operator+=(const NcPoly& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  prune();
  return *this;
}

NcPoly& NcPoly::operator-=(const NcPoly& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, -c);
  prune();
  return *this;
}

NcPoly& NcPoly::operator*=(const NcPoly& other) { return *this = *this * other; }

NcPoly& NcPoly::operator*=(Complex scalar) {
  for (auto& [w, c] : terms_) c *= scalar;
  prune();
  return *this;
}

NcPoly operator*(const NcPoly& a, const NcPoly& b) {
  NcPoly out;
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) out.add_term(concat(wa, wb), ca * cb);
  out.prune();
  return out;
}

NcPoly adjoint(const NcPoly& p) {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) out += NcPoly::monomial(adjoint(w), std::conj(c));
  return out;
}

NcPoly pow_bounded(const NcPoly& p, int exponent, std::size_t max_terms) {
  if (exponent < 0) throw std::invalid_argument("negative polynomial power");
  NcPoly out(1.0);
  for (int i = 0; i < exponent; ++i) {
    out = out * p;
    if (out.size() > max_terms)
      throw std::length_error("polynomial power exceeds term budget of " +
                              std::to_string(max_terms));
  }
  return out;
}

NcPoly pow(const NcPoly& p, int exponent) {
  return pow_bounded(p, exponent, static_cast<std::size_t>(-1));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NcPoly parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    NcPoly p = expr();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return p;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool starts_factor() const {
    const char c = peek();
    return c == 'T' || c == 'i' || c == '(' || c == '.' || c == '-' || c == '+' ||
           std::isdigit(static_cast<unsigned char>(c));
  }
  bool starts_juxtaposed_factor() const {
    // Signs only start a factor after an explicit '*'.
    const char c = peek();
    return c != '-' && c != '+' && starts_factor();
  }

  NcPoly expr() {
    NcPoly acc = term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      NcPoly rhs = term();
      if (c == '+')
        acc += rhs;
      else
        acc -= rhs;
    }
  }

  NcPoly term() {
    NcPoly acc = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (!starts_factor()) throw ParseError("expected factor after '*'", pos_);
        acc = acc * factor();
      } else if (starts_juxtaposed_factor()) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  NcPoly factor() {
    skip_ws();
    const char c = peek();
    if (c == '-' || c == '+') {
      ++pos_;
      NcPoly f = factor();
      return c == '-' ? -f : f;
    }
    NcPoly base = primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (start == pos_) throw ParseError("expected integer exponent", start);
      int e = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
      if (ec != std::errc()) throw ParseError("exponent out of range", start);
      base = pow(base, e);
    }
    return base;
  }

  NcPoly primary() {
    skip_ws();
    const std::size_t start = pos_;
    const char c = peek();
    NcPoly out;
    if (c == 'T') {
      ++pos_;
      const std::size_t dstart = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (dstart == pos_) throw ParseError("expected generator index after 'T'", dstart);
      int idx = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + dstart, text_.data() + pos_, idx);
      if (ec != std::errc()) throw ParseError("generator index out of range", dstart);
      if (idx == 0) throw ParseError("generator index 0 is not allowed", dstart);
      out = NcPoly::generator(idx);
    } else if (c == 'i') {
      ++pos_;
      out = NcPoly(Complex(0.0, 1.0));
    } else if (c == '(') {
      ++pos_;
      out = expr();
      skip_ws();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
    } else if (c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      out = number();
    } else if (at_end()) {
      throw ParseError("unexpected end of input", start);
    } else {
      throw ParseError(std::string("unexpected '") + c + "'", start);
    }
    while (peek() == '\'') {
      ++pos_;
      out = adjoint(out);
    }
    return out;
  }

  NcPoly number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc()) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (peek() == 'i') {
      ++pos_;
      return NcPoly(Complex(0.0, value));
    }
    return NcPoly(Complex(value, 0.0));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_coefficient(Complex c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "i";
  std::string im = format_double(c.imag());
  if (im.front() != '-') im = "+" + im;
  return "(" + format_double(c.real()) + im + "i)";
}

}  // namespace

NcPoly parse_poly(std::string_view text) { return Parser(text).parse(); }

Word parse_word(std::string_view text) {
  const NcPoly p = parse_poly(text);
  if (p.size() != 1 || p.terms().begin()->second != Complex(1.0, 0.0))
    throw ParseError("expected a single monomial with coefficient 1", 0);
  return p.terms().begin()->first;
}

std::string to_string(const NcPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    if (!first) out += " + ";
    first = false;
    if (w.empty()) {
      out += format_coefficient(c);
    } else if (c == Complex(1.0, 0.0)) {
      out += to_string(w);
    } else {
      out += format_coefficient(c) + "*" + to_string(w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Matrix evaluate(const Word& word, std::span<const Matrix> mats) {
  if (mats.empty()) throw std::invalid_argument("evaluate: empty matrix tuple");
  const Eigen::Index k = mats.front().rows();
  Matrix acc = Matrix::Identity(k, k);
  for (const auto& l : word) {
    if (l.index < 1 || static_cast<std::size_t>(l.index) > mats.size())
      throw std::out_of_range("evaluate: generator T" + std::to_string(l.index) +
                              " exceeds tuple length " + std::to_string(mats.size()));
    const Matrix& m = mats[static_cast<std::size_t>(l.index - 1)];
    if (l.starred)
      acc = (acc * m.adjoint()).eval();
    else
      acc = (acc * m).eval();
  }
  return acc;
}

Matrix evaluate(const NcPoly& p, std::span<const Matrix> mats) {
  if (mats.empty()) throw std::invalid_argument("evaluate: empty matrix tuple");
  if (static_cast<std::size_t>(p.max_index()) > mats.size())
    throw std::out_of_range("evaluate: generator T" + std::to_string(p.max_index()) +
                            " exceeds tuple length " + std::to_string(mats.size()));
  const Eigen::Index k = mats.front().rows();
  Matrix out = Matrix::Zero(k, k);
  for (const auto& [w, c] : p.terms()) out += c * evaluate(w, mats);
  return out;
}

}  // namespace strongconv
