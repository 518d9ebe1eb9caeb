#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/free_poly.hpp"
#include "ncmontel/linalg.hpp"
#include "ncmontel/nc_points.hpp"
#include "ncmontel/wandering.hpp"

namespace ncmontel {

/// Deterministic random source. Draws raw 64-bit words from mt19937_64 and
/// derives uniforms by hand so the stream is identical across standard
/// library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53 bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {
    const int span = hi - lo + 1;
    int v = lo + static_cast<int>(uniform() * span);
    return std::min(v, hi);
  }

  /// Real and imaginary parts uniform in [-1, 1].
  Complex complex_in_square() { return Complex(uniform(-1.0, 1.0), uniform(-1.0, 1.0)); }

private:
  std::mt19937_64 engine_;
};

inline ComplexMatrix random_matrix(Rng& rng, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_in_square();
  return m;
}

/// Random matrix rescaled to the exact operator norm requested.
inline ComplexMatrix random_matrix_with_norm(Rng& rng, int rows, int cols, double norm) {
  ComplexMatrix m = random_matrix(rng, rows, cols);
  const double current = operator_norm(m);
  if (current == 0.0) {
    m(0, 0) = norm;
    return m;
  }
  return m * Complex(norm / current);
}

inline MatrixTuple random_tuple(Rng& rng, int d, int n, double coordinate_norm = 1.0) {
  std::vector<ComplexMatrix> coords;
  coords.reserve(d);
  for (int j = 0; j < d; ++j) {
    coords.push_back(random_matrix_with_norm(rng, n, n, coordinate_norm * rng.uniform(0.3, 1.0)));
  }
  return MatrixTuple(std::move(coords));
}

inline ComplexMatrix random_unitary(Rng& rng, int n) {
  std::vector<ComplexVector> basis;
  while (static_cast<int>(basis.size()) < n) {
    ComplexVector candidate(n);
    for (int i = 0; i < n; ++i) candidate[i] = rng.complex_in_square();
    auto inc = orthonormal_increment(basis, {candidate}, 1e-8);
    for (auto& v : inc) basis.push_back(std::move(v));
  }
  ComplexMatrix u(n, n);
  for (int j = 0; j < n; ++j) u.set_col(j, basis[j]);
  return u;
}

/// Random invertible matrix with condition number at most cond_max: two
/// random unitaries around a controlled diagonal of singular values.
inline ComplexMatrix random_similarity(Rng& rng, int n, double cond_max) {
  if (cond_max < 1.0) throw InvalidInputError("random_similarity: cond_max must be >= 1");
  const ComplexMatrix q1 = random_unitary(rng, n);
  const ComplexMatrix q2 = random_unitary(rng, n);
  const double half_log = 0.5 * std::log(cond_max);
  ComplexMatrix diag(n, n);
  for (int i = 0; i < n; ++i) diag(i, i) = std::exp(rng.uniform(-half_log, half_log));
  return q1 * diag * q2;
}

inline FreePoly random_free_poly(Rng& rng, int d, int max_degree, int term_count,
                                 double coeff_scale = 1.0) {
  FreePoly p;
  for (int t = 0; t < term_count; ++t) {
    const int len = rng.uniform_int(0, max_degree);
    Word w;
    for (int l = 0; l < len; ++l) w.letters.push_back(rng.uniform_int(1, d));
    p.add_term(w, rng.complex_in_square() * coeff_scale);
  }
  return p;
}

inline FreePolyMatrix random_free_poly_matrix(Rng& rng, int d, int j_rows, int l_cols,
                                              int max_degree, int term_count,
                                              double coeff_scale = 1.0) {
  std::vector<FreePoly> entries;
  entries.reserve(static_cast<size_t>(j_rows) * l_cols);
  for (int e = 0; e < j_rows * l_cols; ++e) {
    entries.push_back(random_free_poly(rng, d, max_degree, term_count, coeff_scale));
  }
  return FreePolyMatrix(d, j_rows, l_cols, std::move(entries));
}

/// Scales a tuple until it sits inside the polyhedron with at least the
/// requested margin. Fails when delta has a constant part that already
/// violates the margin at zero.
inline MatrixTuple scale_into_polyhedron(const FreePolyMatrix& delta, MatrixTuple point,
                                         double min_margin) {
  for (int attempt = 0; attempt < 80; ++attempt) {
    if (polyhedron_margin(delta, point) >= min_margin) return point;
    std::vector<ComplexMatrix> halved;
    halved.reserve(point.d());
    for (int j = 0; j < point.d(); ++j) halved.push_back(point.coordinate(j) * Complex(0.5));
    point = MatrixTuple(std::move(halved));
  }
  throw InvalidInputError(
      "scale_into_polyhedron: cannot reach the requested margin; delta is at least " +
      std::to_string(1.0 - min_margin) + " in norm at 0");
}

/// The basis-walking sequence: at the single scalar point 0.5 the k-th
/// function takes the value a*e_k. Raw values are pairwise |a|*sqrt(2) apart
/// yet all land on a*e_1 after the wandering unitaries.
inline SequenceSamples make_shifting_sequence(int k_total, int truncation, Complex a) {
  if (k_total < 1) throw InvalidInputError("make_shifting_sequence: need K >= 1");
  if (k_total > truncation) {
    throw InvalidInputError("make_shifting_sequence: K exceeds the truncation dimension");
  }
  SampleSet points({MatrixTuple::scalar_point({Complex(0.5)})}, SampleRole::DenseGrid);
  std::vector<std::vector<ComplexMatrix>> values(k_total);
  for (int k = 0; k < k_total; ++k) {
    ComplexMatrix v(truncation, 1);
    v(k, 0) = a;
    values[k] = {std::move(v)};
  }
  return SequenceSamples(std::move(points), truncation, std::move(values), std::abs(a));
}

/// Cyclic H-slot shift by `step`; unitary, and a pure shift as long as the
/// occupied slots stay below the truncation.
inline ComplexMatrix cyclic_shift(int truncation, int step) {
  ComplexMatrix s(truncation, truncation);
  for (int i = 0; i < truncation; ++i) s((i + step) % truncation, i) = 1.0;
  return s;
}

/// Drifting-isometry sequence: function k is the base value table pushed up k
/// H-slots. Every function has the same Gram kernel, while the raw values
/// wander off in H.
inline SequenceSamples make_drifting_isometry_sequence(const SampleSet& points,
                                                       const std::vector<ComplexMatrix>& base,
                                                       int base_slots, int k_total,
                                                       int truncation) {
  if (base_slots + k_total > truncation) {
    throw InvalidInputError(
        "make_drifting_isometry_sequence: base_slots + K must not exceed the truncation");
  }
  if (static_cast<int>(base.size()) != points.size()) {
    throw InvalidInputError("make_drifting_isometry_sequence: base table misaligned with points");
  }
  double bound = 0.0;
  for (const ComplexMatrix& v : base) bound = std::max(bound, operator_norm(v));
  std::vector<std::vector<ComplexMatrix>> values(k_total);
  for (int k = 0; k < k_total; ++k) {
    const ComplexMatrix shift = cyclic_shift(truncation, k + 1);
    values[k].reserve(points.size());
    for (int i = 0; i < points.size(); ++i) {
      values[k].push_back(left_identity_kron(points.point(i).grading(), shift) * base[i]);
    }
  }
  return SequenceSamples(points, truncation, std::move(values), bound * (1.0 + 1e-12));
}

/// Random bounded sample table: independent values with operator norms
/// spread in (0, bound].
inline SequenceSamples random_bounded_samples(Rng& rng, const SampleSet& points, int k_total,
                                              int truncation, double bound) {
  std::vector<std::vector<ComplexMatrix>> values(k_total);
  for (int k = 0; k < k_total; ++k) {
    values[k].reserve(points.size());
    for (int i = 0; i < points.size(); ++i) {
      const int n = points.point(i).grading();
      values[k].push_back(
          random_matrix_with_norm(rng, n * truncation, n, bound * rng.uniform(0.2, 0.999)));
    }
  }
  return SequenceSamples(points, truncation, std::move(values), bound);
}

}  // namespace ncmontel
