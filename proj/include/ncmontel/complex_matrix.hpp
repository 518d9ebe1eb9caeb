#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "ncmontel/errors.hpp"

namespace ncmontel {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense complex matrix with row-major storage and value semantics.
///
/// This is the one concrete container every other header works with. It keeps
/// arithmetic deliberately naive (triple loops); the sizes in this library are
/// desk scale, at most a few hundred rows. Decompositions live in linalg.hpp.
class ComplexMatrix {
public:
  ComplexMatrix() : rows_(0), cols_(0) {}

  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) {
      throw InvalidInputError("ComplexMatrix: negative dimensions");
    }
  }

  /// Row-major brace construction, used heavily in tests:
  ///   ComplexMatrix A{{1.0, 2.0}, {3.0, 4.0}};
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    entries_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) {
        throw InvalidInputError("ComplexMatrix: ragged initializer");
      }
      entries_.insert(entries_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(int n) {
    ComplexMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  /// Column vector from a ComplexVector.
  static ComplexMatrix column(const ComplexVector& v) {
    ComplexMatrix c(static_cast<int>(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) c.entries_[i] = v[i];
    return c;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(int i, int j) { return entries_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const {
    return entries_[static_cast<size_t>(i) * cols_ + j];
  }

  const std::vector<Complex>& entries() const { return entries_; }

  bool is_finite() const {
    for (const Complex& z : entries_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  /// Entrywise complex conjugate (no transpose).
  ComplexMatrix conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = std::conj(entries_[k]);
    return out;
  }

  ComplexMatrix block(int i0, int j0, int r, int c) const {
    if (i0 < 0 || j0 < 0 || r < 0 || c < 0 || i0 + r > rows_ || j0 + c > cols_) {
      throw InvalidInputError("ComplexMatrix::block: out of range");
    }
    ComplexMatrix out(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
  }

  void set_block(int i0, int j0, const ComplexMatrix& m) {
    if (i0 < 0 || j0 < 0 || i0 + m.rows() > rows_ || j0 + m.cols() > cols_) {
      throw InvalidInputError("ComplexMatrix::set_block: out of range");
    }
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) (*this)(i0 + i, j0 + j) = m(i, j);
  }

  ComplexVector col(int j) const {
    ComplexVector v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(int j, const ComplexVector& v) {
    if (static_cast<int>(v.size()) != rows_) {
      throw InvalidInputError("ComplexMatrix::set_col: length mismatch");
    }
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "+=");
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "-=");
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (Complex& z : entries_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw InvalidInputError("ComplexMatrix: product shape mismatch (" +
                              std::to_string(a.rows_) + "x" + std::to_string(a.cols_) + " * " +
                              std::to_string(b.rows_) + "x" + std::to_string(b.cols_) + ")");
    }
    ComplexMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

private:
  void require_same_shape(const ComplexMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw InvalidInputError(std::string("ComplexMatrix: shape mismatch in ") + op);
    }
  }

  int rows_;
  int cols_;
  std::vector<Complex> entries_;
};

inline ComplexMatrix blkdiag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

inline ComplexMatrix blkdiag(const std::vector<ComplexMatrix>& blocks) {
  int r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  ComplexMatrix out(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return out;
}

/// id_n (x) U: block diagonal with n copies of U. With the H-fastest layout
/// used throughout, this is exactly how a Hilbert-space unitary acts on values
/// of a graded function at a grading-n point.
inline ComplexMatrix left_identity_kron(int n, const ComplexMatrix& u) {
  ComplexMatrix out(n * u.rows(), n * u.cols());
  for (int s = 0; s < n; ++s) out.set_block(s * u.rows(), s * u.cols(), u);
  return out;
}

/// S (x) id_m in the same layout (first factor slow, second fast).
inline ComplexMatrix right_identity_kron(const ComplexMatrix& s, int m) {
  ComplexMatrix out(s.rows() * m, s.cols() * m);
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = 0; j < s.cols(); ++j) {
      const Complex sij = s(i, j);
      if (sij == Complex(0.0)) continue;
      for (int k = 0; k < m; ++k) out(i * m + k, j * m + k) = sij;
    }
  }
  return out;
}

// ---- small vector helpers -------------------------------------------------

/// Inner product, linear in the first argument.
inline Complex inner_product(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) {
    throw InvalidInputError("inner_product: length mismatch");
  }
  Complex s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

inline double vec_norm(const ComplexVector& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline ComplexVector matvec(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != static_cast<int>(v.size())) {
    throw InvalidInputError("matvec: shape mismatch");
  }
  ComplexVector out(m.rows(), Complex(0.0));
  for (int i = 0; i < m.rows(); ++i) {
    Complex s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline ComplexVector unit_vector(int dim, int index) {
  ComplexVector v(dim, Complex(0.0));
  v[index] = 1.0;
  return v;
}

}  // namespace ncmontel
