#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/linalg.hpp"

namespace ncmontel {

/// Condition-number guard for similarity matrices. Conjugating past this
/// leaves no meaningful digits in double precision.
inline constexpr double kMaxSimilarityCondition = 1e12;

/// A point of the matrix universe: a d-tuple of n x n complex matrices.
/// n is the grading of the point.
class MatrixTuple {
public:
  explicit MatrixTuple(std::vector<ComplexMatrix> matrices)
      : matrices_(std::move(matrices)) {
    if (matrices_.empty()) {
      throw InvalidInputError("MatrixTuple: need at least one coordinate");
    }
    const int n = matrices_.front().rows();
    for (const ComplexMatrix& m : matrices_) {
      if (m.rows() != n || m.cols() != n) {
        throw InvalidInputError("MatrixTuple: coordinates must be square matrices of equal size");
      }
      if (!m.is_finite()) {
        throw InvalidInputError("MatrixTuple: non-finite entries");
      }
    }
    grading_ = n;
  }

  /// Grading-1 point from plain scalars.
  static MatrixTuple scalar_point(const std::vector<Complex>& coords) {
    std::vector<ComplexMatrix> ms;
    ms.reserve(coords.size());
    for (Complex z : coords) {
      ComplexMatrix m(1, 1);
      m(0, 0) = z;
      ms.push_back(std::move(m));
    }
    return MatrixTuple(std::move(ms));
  }

  int d() const { return static_cast<int>(matrices_.size()); }
  int grading() const { return grading_; }
  const ComplexMatrix& coordinate(int j) const { return matrices_[j]; }
  const std::vector<ComplexMatrix>& coordinates() const { return matrices_; }

  friend bool operator==(const MatrixTuple& a, const MatrixTuple& b) {
    return a.matrices_ == b.matrices_;
  }

private:
  std::vector<ComplexMatrix> matrices_;
  int grading_;
};

/// Coordinate-wise block diagonal; the grading adds.
inline MatrixTuple direct_sum(const MatrixTuple& a, const MatrixTuple& b) {
  if (a.d() != b.d()) {
    throw InvalidInputError("direct_sum: tuples have different numbers of variables");
  }
  std::vector<ComplexMatrix> ms;
  ms.reserve(a.d());
  for (int j = 0; j < a.d(); ++j) {
    ms.push_back(blkdiag(a.coordinate(j), b.coordinate(j)));
  }
  return MatrixTuple(std::move(ms));
}

/// Coordinate-wise S . S^{-1}.
inline MatrixTuple conjugate(const MatrixTuple& a, const ComplexMatrix& s) {
  if (s.rows() != a.grading() || s.cols() != a.grading()) {
    throw InvalidInputError("conjugate: similarity matrix size does not match grading");
  }
  if (condition_estimate(s) > kMaxSimilarityCondition) {
    throw PreconditionError("conjugate: similarity matrix is numerically singular");
  }
  const ComplexMatrix s_inv = inverse(s);
  std::vector<ComplexMatrix> ms;
  ms.reserve(a.d());
  for (int j = 0; j < a.d(); ++j) {
    ms.push_back(s * a.coordinate(j) * s_inv);
  }
  return MatrixTuple(std::move(ms));
}

enum class SampleRole { DenseGrid, UniquenessSet, ExhaustionLevel };

inline const char* to_string(SampleRole role) {
  switch (role) {
    case SampleRole::DenseGrid: return "dense-grid";
    case SampleRole::UniquenessSet: return "uniqueness-set";
    case SampleRole::ExhaustionLevel: return "exhaustion-level";
  }
  return "unknown";
}

/// Finite ordered list of points sharing d; gradings may differ.
class SampleSet {
public:
  SampleSet(std::vector<MatrixTuple> points, SampleRole role)
      : points_(std::move(points)), role_(role) {
    if (points_.empty()) {
      throw InvalidInputError("SampleSet: empty point list");
    }
    const int d = points_.front().d();
    for (const MatrixTuple& p : points_) {
      if (p.d() != d) {
        throw InvalidInputError("SampleSet: points disagree on number of variables");
      }
    }
  }

  int d() const { return points_.front().d(); }
  int size() const { return static_cast<int>(points_.size()); }
  const MatrixTuple& point(int i) const { return points_[i]; }
  const std::vector<MatrixTuple>& points() const { return points_; }
  SampleRole role() const { return role_; }

  /// Duplicates are permitted but worth surfacing in reports.
  bool has_duplicates() const {
    for (size_t i = 0; i < points_.size(); ++i)
      for (size_t j = i + 1; j < points_.size(); ++j)
        if (points_[i] == points_[j]) return true;
    return false;
  }

private:
  std::vector<MatrixTuple> points_;
  SampleRole role_;
};

/// Nested sample levels standing in for a compact exhaustion, with summable
/// per-level weights. The true exhaustion is infinite; truncating to finitely
/// many levels makes the metric below a pseudometric that cannot distinguish
/// functions differing only beyond the last level.
class ExhaustionGrid {
public:
  explicit ExhaustionGrid(std::vector<SampleSet> levels, std::vector<double> weights = {})
      : levels_(std::move(levels)), weights_(std::move(weights)) {
    if (levels_.empty()) {
      throw InvalidInputError("ExhaustionGrid: no levels");
    }
    if (weights_.empty()) {
      double w = 0.5;
      for (size_t i = 0; i < levels_.size(); ++i, w /= 2.0) weights_.push_back(w);
    }
    if (weights_.size() != levels_.size()) {
      throw InvalidInputError("ExhaustionGrid: weight count != level count");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (w <= 0.0) throw InvalidInputError("ExhaustionGrid: weights must be positive");
      total += w;
    }
    if (total > 1.0 + 1e-12) {
      throw InvalidInputError("ExhaustionGrid: weights must sum to at most 1");
    }
    for (size_t k = 0; k + 1 < levels_.size(); ++k) {
      for (const MatrixTuple& p : levels_[k].points()) {
        bool found = false;
        for (const MatrixTuple& q : levels_[k + 1].points()) {
          if (p == q) {
            found = true;
            break;
          }
        }
        if (!found) {
          throw InvalidInputError("ExhaustionGrid: level " + std::to_string(k + 2) +
                                  " does not contain level " + std::to_string(k + 1));
        }
      }
    }
  }

  int level_count() const { return static_cast<int>(levels_.size()); }
  const SampleSet& level(int k) const { return levels_[k]; }
  double weight(int k) const { return weights_[k]; }

private:
  std::vector<SampleSet> levels_;
  std::vector<double> weights_;
};

/// Per-level tables of sampled values, aligned with an ExhaustionGrid.
using LevelValueTables = std::vector<std::vector<ComplexMatrix>>;

/// d(f,g) = sum_k w_k * s_k / (1 + s_k) with s_k the max sampled deviation on
/// level k. Always < 1; zero exactly when all sampled values agree.
inline double metric_distance(const LevelValueTables& f_values, const LevelValueTables& g_values,
                              const ExhaustionGrid& grid) {
  if (static_cast<int>(f_values.size()) != grid.level_count() ||
      static_cast<int>(g_values.size()) != grid.level_count()) {
    throw InvalidInputError("metric_distance: table level count does not match grid");
  }
  double total = 0.0;
  for (int k = 0; k < grid.level_count(); ++k) {
    const int m = grid.level(k).size();
    if (static_cast<int>(f_values[k].size()) != m || static_cast<int>(g_values[k].size()) != m) {
      throw InvalidInputError("metric_distance: table misaligned with level " +
                              std::to_string(k + 1));
    }
    double sup = 0.0;
    for (int i = 0; i < m; ++i) {
      const ComplexMatrix& fa = f_values[k][i];
      const ComplexMatrix& ga = g_values[k][i];
      if (fa.rows() != ga.rows() || fa.cols() != ga.cols()) {
        throw InvalidInputError("metric_distance: value shape mismatch at level " +
                                std::to_string(k + 1));
      }
      sup = std::max(sup, operator_norm(fa - ga));
    }
    total += grid.weight(k) * sup / (1.0 + sup);
  }
  return total;
}

}  // namespace ncmontel
