#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/linalg.hpp"
#include "ncmontel/nc_points.hpp"

namespace ncmontel {

/// A monomial in noncommuting variables: a finite sequence of 1-based
/// variable indices. The empty sequence is the identity word.
struct Word {
  std::vector<int> letters;

  static Word identity() { return {}; }
  static Word variable(int index) { return Word{{index}}; }

  int length() const { return static_cast<int>(letters.size()); }

  int max_variable() const {
    int m = 0;
    for (int l : letters) m = std::max(m, l);
    return m;
  }

  /// Concatenation; words multiply like the monomials they name.
  friend Word operator*(const Word& a, const Word& b) {
    Word w = a;
    w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
    return w;
  }

  friend bool operator==(const Word& a, const Word& b) { return a.letters == b.letters; }

  std::string to_string() const {
    if (letters.empty()) return "1";
    std::string out;
    for (size_t i = 0; i < letters.size(); ++i) {
      if (i > 0) out += "*";
      out += "x" + std::to_string(letters[i]);
    }
    return out;
  }
};

/// Graded lexicographic order: by length, then letterwise. This is the
/// canonical term order used for serialization and iteration.
struct GradedLexLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
  }
};

/// A free polynomial: finite coefficient map over words. Zero coefficients
/// are never stored.
class FreePoly {
public:
  using TermMap = std::map<Word, Complex, GradedLexLess>;

  FreePoly() = default;

  static FreePoly zero() { return {}; }

  static FreePoly constant(Complex c) {
    FreePoly p;
    p.add_term(Word::identity(), c);
    return p;
  }

  static FreePoly variable(int index) {
    if (index < 1) throw InvalidInputError("FreePoly::variable: index must be >= 1");
    FreePoly p;
    p.add_term(Word::variable(index), 1.0);
    return p;
  }

  void add_term(const Word& w, Complex c) {
    if (c == Complex(0.0)) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex(0.0)) terms_.erase(it);
    }
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int deg = 0;
    for (const auto& [w, c] : terms_) deg = std::max(deg, w.length());
    return deg;
  }

  int max_variable() const {
    int m = 0;
    for (const auto& [w, c] : terms_) m = std::max(m, w.max_variable());
    return m;
  }

  FreePoly& operator+=(const FreePoly& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }

  FreePoly& operator-=(const FreePoly& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }

  FreePoly& operator*=(Complex s) {
    if (s == Complex(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }

  friend FreePoly operator+(FreePoly a, const FreePoly& b) { return a += b; }
  friend FreePoly operator-(FreePoly a, const FreePoly& b) { return a -= b; }
  friend FreePoly operator*(FreePoly a, Complex s) { return a *= s; }
  friend FreePoly operator*(Complex s, FreePoly a) { return a *= s; }

  /// Noncommutative product: words concatenate.
  friend FreePoly operator*(const FreePoly& a, const FreePoly& b) {
    FreePoly out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) out.add_term(wa * wb, ca * cb);
    return out;
  }

  friend bool operator==(const FreePoly& a, const FreePoly& b) { return a.terms_ == b.terms_; }

private:
  TermMap terms_;
};

/// A J x L matrix of free polynomials in d noncommuting variables.
class FreePolyMatrix {
public:
  FreePolyMatrix(int d, int j_rows, int l_cols, std::vector<FreePoly> entries)
      : d_(d), j_(j_rows), l_(l_cols), entries_(std::move(entries)) {
    if (d_ < 1) throw InvalidInputError("FreePolyMatrix: d must be positive");
    if (j_ < 1 || l_ < 1) throw InvalidInputError("FreePolyMatrix: dimensions must be positive");
    if (static_cast<int>(entries_.size()) != j_ * l_) {
      throw InvalidInputError("FreePolyMatrix: entry count != J*L");
    }
    for (const FreePoly& p : entries_) {
      if (p.max_variable() > d_) {
        throw InvalidInputError("FreePolyMatrix: entry uses variable index beyond d");
      }
    }
  }

  int d() const { return d_; }
  int j_rows() const { return j_; }
  int l_cols() const { return l_; }
  const FreePoly& at(int j, int l) const { return entries_[static_cast<size_t>(j) * l_ + l]; }
  const std::vector<FreePoly>& entries() const { return entries_; }

  friend bool operator==(const FreePolyMatrix& a, const FreePolyMatrix& b) {
    return a.d_ == b.d_ && a.j_ == b.j_ && a.l_ == b.l_ && a.entries_ == b.entries_;
  }

private:
  int d_;
  int j_;
  int l_;
  std::vector<FreePoly> entries_;
};

namespace detail {

/// Prefix-product memo for word evaluation at a fixed point.
class WordEvaluator {
public:
  explicit WordEvaluator(const MatrixTuple& point) : point_(point) {
    cache_.emplace(Word::identity(), ComplexMatrix::identity(point.grading()));
  }

  const ComplexMatrix& value(const Word& w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    Word prefix = w;
    const int last = prefix.letters.back();
    prefix.letters.pop_back();
    if (last < 1 || last > point_.d()) {
      throw InvalidInputError("word evaluation: variable index out of range");
    }
    ComplexMatrix v = value(prefix) * point_.coordinate(last - 1);
    auto [ins, ok] = cache_.emplace(w, std::move(v));
    return ins->second;
  }

private:
  const MatrixTuple& point_;
  std::map<Word, ComplexMatrix, GradedLexLess> cache_;
};

}  // namespace detail

/// Value of a single word at a point (empty word gives the identity).
inline ComplexMatrix evaluate_word(const Word& w, const MatrixTuple& point) {
  detail::WordEvaluator ev(point);
  return ev.value(w);
}

/// Value of a scalar free polynomial at a point: an n x n matrix.
inline ComplexMatrix evaluate(const FreePoly& p, const MatrixTuple& point) {
  detail::WordEvaluator ev(point);
  ComplexMatrix out(point.grading(), point.grading());
  for (const auto& [w, c] : p.terms()) out += c * ev.value(w);
  return out;
}

/// Block evaluation of a polynomial matrix: the (j,l) block of the
/// (J n) x (L n) result is the entry polynomial evaluated at the point.
inline ComplexMatrix evaluate(const FreePolyMatrix& p, const MatrixTuple& point) {
  if (point.d() != p.d()) {
    throw InvalidInputError("evaluate: point has wrong number of variables");
  }
  const int n = point.grading();
  detail::WordEvaluator ev(point);
  ComplexMatrix out(p.j_rows() * n, p.l_cols() * n);
  for (int j = 0; j < p.j_rows(); ++j) {
    for (int l = 0; l < p.l_cols(); ++l) {
      ComplexMatrix blockv(n, n);
      for (const auto& [w, c] : p.at(j, l).terms()) blockv += c * ev.value(w);
      out.set_block(j * n, l * n, blockv);
    }
  }
  return out;
}

/// 1 - ||delta(point)||; positive exactly when the point lies inside the
/// polynomial polyhedron cut out by delta.
inline double polyhedron_margin(const FreePolyMatrix& delta, const MatrixTuple& point) {
  return 1.0 - operator_norm(evaluate(delta, point));
}

// ---- text grammar ----------------------------------------------------------
//
//   matrix := "[" row ("," row)* "]"
//   row    := "[" poly ("," poly)* "]"
//   poly   := ("+"|"-")? term (("+"|"-") term)*
//   term   := coeff? ("*"? factor)*
//   factor := "x" INTEGER | "(" poly ")"
//   coeff  := REAL | "(" REAL ("+"|"-") REAL "i" ")"
//
// Whitespace-insensitive. A term must contain a coefficient or at least one
// factor.

namespace detail {

class PolyParser {
public:
  PolyParser(std::string_view src, int d) : src_(src), d_(d) {}

  FreePolyMatrix parse_matrix() {
    std::vector<std::vector<FreePoly>> rows;
    expect('[');
    rows.push_back(parse_row());
    skip_ws();
    while (peek() == ',') {
      ++pos_;
      rows.push_back(parse_row());
      skip_ws();
    }
    expect(']');
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    const size_t cols = rows.front().size();
    std::vector<FreePoly> entries;
    for (const auto& r : rows) {
      if (r.size() != cols) fail("rows have different lengths");
      entries.insert(entries.end(), r.begin(), r.end());
    }
    return FreePolyMatrix(d_, static_cast<int>(rows.size()), static_cast<int>(cols),
                          std::move(entries));
  }

private:
  std::vector<FreePoly> parse_row() {
    std::vector<FreePoly> row;
    expect('[');
    row.push_back(parse_poly());
    skip_ws();
    while (peek() == ',') {
      ++pos_;
      row.push_back(parse_poly());
      skip_ws();
    }
    expect(']');
    return row;
  }

  FreePoly parse_poly() {
    skip_ws();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      if (src_[pos_] == '-') sign = -1.0;
      ++pos_;
    }
    FreePoly sum = parse_term() * Complex(sign);
    skip_ws();
    while (peek() == '+' || peek() == '-') {
      const double s = (src_[pos_] == '-') ? -1.0 : 1.0;
      ++pos_;
      sum += parse_term() * Complex(s);
      skip_ws();
    }
    return sum;
  }

  FreePoly parse_term() {
    skip_ws();
    bool have_any = false;
    Complex coeff = 1.0;
    if (auto c = try_parse_complex_coeff()) {
      coeff = *c;
      have_any = true;
    } else if (auto r = try_scan_real()) {
      coeff = *r;
      have_any = true;
    }
    FreePoly acc = FreePoly::constant(coeff);
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '*') {
        ++pos_;
        skip_ws();
        c = peek();
        if (c != 'x' && c != '(') fail("expected factor after '*'");
      } else if (c != 'x' && c != '(') {
        break;
      }
      acc = acc * parse_factor();
      have_any = true;
    }
    if (!have_any) fail("expected a term");
    return acc;
  }

  FreePoly parse_factor() {
    skip_ws();
    if (peek() == 'x') {
      ++pos_;
      const int idx = scan_integer();
      if (idx < 1) fail("variable index must be at least 1");
      if (idx > d_) fail("variable index x" + std::to_string(idx) + " exceeds d=" +
                         std::to_string(d_));
      return FreePoly::variable(idx);
    }
    expect('(');
    FreePoly inner = parse_poly();
    expect(')');
    return inner;
  }

  // "(re +/- im i)". Backtracks and returns nullopt when the parenthesis
  // actually opens a polynomial factor.
  std::optional<Complex> try_parse_complex_coeff() {
    skip_ws();
    if (peek() != '(') return std::nullopt;
    const size_t saved = pos_;
    ++pos_;
    auto re = try_scan_real();
    if (!re) {
      pos_ = saved;
      return std::nullopt;
    }
    skip_ws();
    char op = peek();
    if (op != '+' && op != '-') {
      pos_ = saved;
      return std::nullopt;
    }
    ++pos_;
    auto im = try_scan_real();
    if (!im) {
      pos_ = saved;
      return std::nullopt;
    }
    skip_ws();
    if (peek() != 'i') {
      pos_ = saved;
      return std::nullopt;
    }
    ++pos_;
    skip_ws();
    if (peek() != ')') {
      pos_ = saved;
      return std::nullopt;
    }
    ++pos_;
    return Complex(*re, op == '-' ? -*im : *im);
  }

  std::optional<double> try_scan_real() {
    skip_ws();
    size_t p = pos_;
    if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
    size_t digits_start = p;
    while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
    bool have_int = p > digits_start;
    bool have_frac = false;
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      size_t frac_start = p;
      while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
      have_frac = p > frac_start;
    }
    if (!have_int && !have_frac) return std::nullopt;
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      size_t exp_start = q;
      while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
      if (q > exp_start) p = q;
    }
    const std::string slice(src_.substr(pos_, p - pos_));
    pos_ = p;
    return std::stod(slice);
  }

  int scan_integer() {
    skip_ws();
    size_t p = pos_;
    while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
    if (p == pos_) fail("expected an integer");
    int value = 0;
    for (size_t q = pos_; q < p; ++q) {
      value = value * 10 + (src_[q] - '0');
      if (value > 1'000'000) fail("integer too large");
    }
    pos_ = p;
    return value;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInputError("free polynomial parse error at position " + std::to_string(pos_) +
                            ": " + msg);
  }

  std::string_view src_;
  size_t pos_ = 0;
  int d_;
};

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_coeff(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string out = "(" + format_real(c.real());
  out += (c.imag() < 0.0) ? " - " : " + ";
  out += format_real(std::abs(c.imag()));
  out += "i)";
  return out;
}

inline std::string format_poly(const FreePoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    Complex coeff = c;
    if (first) {
      if (coeff.imag() == 0.0 && coeff.real() < 0.0) {
        out += "-";
        coeff = -coeff;
      }
    } else {
      if (coeff.imag() == 0.0 && coeff.real() < 0.0) {
        out += " - ";
        coeff = -coeff;
      } else {
        out += " + ";
      }
    }
    if (w.length() == 0) {
      out += format_coeff(coeff);
    } else if (coeff == Complex(1.0)) {
      out += w.to_string();
    } else {
      out += format_coeff(coeff) + "*" + w.to_string();
    }
    first = false;
  }
  return out;
}

}  // namespace detail

inline FreePolyMatrix parse_free_poly_matrix(std::string_view src, int d) {
  if (d < 1) throw InvalidInputError("parse_free_poly_matrix: d must be positive");
  detail::PolyParser parser(src, d);
  return parser.parse_matrix();
}

/// Canonical text form; parsing it back recovers an equal FreePolyMatrix.
inline std::string format(const FreePolyMatrix& p) {
  std::string out = "[";
  for (int j = 0; j < p.j_rows(); ++j) {
    if (j > 0) out += ", ";
    out += "[";
    for (int l = 0; l < p.l_cols(); ++l) {
      if (l > 0) out += ", ";
      out += detail::format_poly(p.at(j, l));
    }
    out += "]";
  }
  out += "]";
  return out;
}

}  // namespace ncmontel
