#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/linalg.hpp"
#include "ncmontel/nc_points.hpp"

namespace ncmontel {

/// A table of sampled values for a finite sequence of graded functions:
/// values[k][i] is the value of function k at sample point i, an
/// (n_i * M) x n_i matrix, with a declared uniform bound on operator norms.
class SequenceSamples {
public:
  SequenceSamples(SampleSet points, int truncation,
                  std::vector<std::vector<ComplexMatrix>> values, double bound)
      : points_(std::move(points)), truncation_(truncation), values_(std::move(values)),
        bound_(bound) {
    if (truncation_ < 1) throw InvalidInputError("SequenceSamples: truncation must be positive");
    if (values_.empty()) throw InvalidInputError("SequenceSamples: no functions");
    if (bound_ < 0.0 || !std::isfinite(bound_)) {
      throw InvalidInputError("SequenceSamples: bound must be finite and nonnegative");
    }
    const int m = points_.size();
    for (const auto& row : values_) {
      if (static_cast<int>(row.size()) != m) {
        throw InvalidInputError("SequenceSamples: value row length != number of points");
      }
      for (int i = 0; i < m; ++i) {
        const int n = points_.point(i).grading();
        if (row[i].rows() != n * truncation_ || row[i].cols() != n) {
          throw InvalidInputError("SequenceSamples: value shape mismatch at point " +
                                  std::to_string(i));
        }
        const double norm = operator_norm(row[i]);
        if (norm > bound_ * (1.0 + 1e-10) + 1e-300) {
          throw InvalidInputError("SequenceSamples: value at point " + std::to_string(i) +
                                  " exceeds declared bound (" + std::to_string(norm) + " > " +
                                  std::to_string(bound_) + ")");
        }
      }
    }
  }

  int sequence_length() const { return static_cast<int>(values_.size()); }
  int point_count() const { return points_.size(); }
  int truncation() const { return truncation_; }
  double bound() const { return bound_; }
  const SampleSet& points() const { return points_; }
  const ComplexMatrix& value(int k, int i) const { return values_[k][i]; }
  const std::vector<std::vector<ComplexMatrix>>& values() const { return values_; }

  std::vector<int> gradings() const {
    std::vector<int> g(points_.size());
    for (int i = 0; i < points_.size(); ++i) g[i] = points_.point(i).grading();
    return g;
  }

private:
  SampleSet points_;
  int truncation_;
  std::vector<std::vector<ComplexMatrix>> values_;
  double bound_;
};

/// Sum of squared gradings: the number of H-dimensions the construction
/// consumes, and the minimum admissible truncation.
inline int required_truncation(const std::vector<int>& gradings) {
  int total = 0;
  for (int n : gradings) total += n * n;
  return total;
}

/// Splits an (n*M) x n value into its n^2 H-coefficient vectors x_{r,s},
/// ordered (r,s)-lexicographically: column r of the value is
/// sum_s e_s (x) x_{r,s}.
inline std::vector<ComplexVector> coefficient_vectors(const ComplexMatrix& value) {
  const int n = value.cols();
  if (n < 1 || value.rows() % n != 0) {
    throw InvalidInputError("coefficient_vectors: shape is not (n*M) x n");
  }
  const int truncation = value.rows() / n;
  std::vector<ComplexVector> out;
  out.reserve(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      ComplexVector x(truncation);
      for (int m = 0; m < truncation; ++m) x[m] = value(s * truncation + m, r);
      out.push_back(std::move(x));
    }
  }
  return out;
}

/// Inverse of coefficient_vectors; exact by construction.
inline ComplexMatrix reassemble_value(const std::vector<ComplexVector>& vectors) {
  const int count = static_cast<int>(vectors.size());
  int n = 0;
  while (n * n < count) ++n;
  if (n * n != count || count == 0) {
    throw InvalidInputError("reassemble_value: need a nonzero square number of vectors");
  }
  const int truncation = static_cast<int>(vectors.front().size());
  ComplexMatrix value(n * truncation, n);
  int idx = 0;
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      const ComplexVector& x = vectors[idx++];
      if (static_cast<int>(x.size()) != truncation) {
        throw InvalidInputError("reassemble_value: vectors have different lengths");
      }
      for (int m = 0; m < truncation; ++m) value(s * truncation + m, r) = x[m];
    }
  }
  return value;
}

/// Builds the wandering unitary for one function of the sequence.
///
/// The coefficient vectors of the values at points 1..m are orthonormalized
/// cumulatively; the orthogonal increment contributed by point i is sent onto
/// the standard basis slots reserved for point i (slots D_{i-1}+1 .. D_i with
/// D_i the running sum of squared gradings). The result is a unitary U such
/// that id_{n_i} (x) U moves the value at point i into the first D_i
/// H-coordinates of each layout block.
inline ComplexMatrix build_unitary(const std::vector<ComplexMatrix>& values_k, int truncation,
                                   double rank_tol = kDefaultRankTol) {
  std::vector<int> gradings;
  gradings.reserve(values_k.size());
  for (const ComplexMatrix& v : values_k) {
    const int n = v.cols();
    if (n < 1 || v.rows() != n * truncation) {
      throw InvalidInputError("build_unitary: value shape inconsistent with truncation");
    }
    gradings.push_back(n);
  }
  const int needed = required_truncation(gradings);
  if (truncation < needed) {
    throw CapacityError("build_unitary: truncation " + std::to_string(truncation) +
                            " is too small; need at least " + std::to_string(needed) +
                            " (sum of squared gradings)",
                        needed);
  }

  std::vector<ComplexVector> basis;           // cumulative span of all coefficient vectors
  std::vector<std::pair<ComplexVector, ComplexVector>> pairs;
  int slot_base = 0;
  for (size_t i = 0; i < values_k.size(); ++i) {
    const auto increment = orthonormal_increment(basis, coefficient_vectors(values_k[i]), rank_tol);
    for (size_t j = 0; j < increment.size(); ++j) {
      pairs.emplace_back(increment[j], unit_vector(truncation, slot_base + static_cast<int>(j)));
    }
    basis.insert(basis.end(), increment.begin(), increment.end());
    slot_base += gradings[i] * gradings[i];
  }
  return complete_to_unitary(pairs, truncation, std::max(rank_tol, 1e-13));
}

/// Norm of the part of a transformed value living beyond H-slot `allowed`
/// in each layout block; the containment certificate for one (k, i).
inline double block_escape_norm(const ComplexMatrix& value, int allowed) {
  const int n = value.cols();
  const int truncation = value.rows() / n;
  if (allowed >= truncation) return 0.0;
  ComplexMatrix escape(n * (truncation - allowed), n);
  for (int s = 0; s < n; ++s) {
    for (int m = allowed; m < truncation; ++m) {
      for (int r = 0; r < n; ++r) {
        escape((s * (truncation - allowed)) + (m - allowed), r) = value(s * truncation + m, r);
      }
    }
  }
  return operator_norm(escape);
}

/// Finite diagonal argument: processes the points in order; at each point the
/// surviving indices are greedily covered with balls of radius eps_i/2 around
/// the first unassigned value, the largest cluster is kept (earliest cluster
/// wins ties), and the survivors move on to the next point. Every kept pair
/// is within eps_i at point i by the triangle inequality.
inline std::vector<int> extract_cauchy_subsequence(
    const std::vector<std::vector<ComplexMatrix>>& values_by_point,
    const std::vector<double>& eps) {
  if (values_by_point.empty()) {
    throw InvalidInputError("extract_cauchy_subsequence: no points");
  }
  if (eps.size() != values_by_point.size()) {
    throw InvalidInputError("extract_cauchy_subsequence: tolerance count != point count");
  }
  const int k_total = static_cast<int>(values_by_point.front().size());
  if (k_total < 1) throw InvalidInputError("extract_cauchy_subsequence: empty sequence");
  for (const auto& column : values_by_point) {
    if (static_cast<int>(column.size()) != k_total) {
      throw InvalidInputError("extract_cauchy_subsequence: ragged value table");
    }
  }

  std::vector<int> selected(k_total);
  std::iota(selected.begin(), selected.end(), 0);

  for (size_t i = 0; i < values_by_point.size(); ++i) {
    const auto& column = values_by_point[i];
    std::vector<std::vector<int>> clusters;
    for (int k : selected) {
      bool placed = false;
      for (auto& cluster : clusters) {
        if (operator_norm(column[k] - column[cluster.front()]) <= eps[i] / 2.0) {
          cluster.push_back(k);
          placed = true;
          break;
        }
      }
      if (!placed) clusters.push_back({k});
    }
    size_t best = 0;
    for (size_t c = 1; c < clusters.size(); ++c) {
      if (clusters[c].size() > clusters[best].size()) best = c;
    }
    selected = clusters[best];
  }
  return selected;
}

/// Output of the wandering construction over a finite sample table.
///
/// With finitely many functions "converged" is a residual certificate about
/// the selected subsequence, never a claim about infinite tails.
struct WanderingResult {
  std::vector<ComplexMatrix> unitaries;                 // one M x M unitary per function
  std::vector<int> subsequence;                         // selected indices, 0-based, increasing
  std::vector<ComplexMatrix> limits;                    // per-point mean of selected values
  std::vector<std::vector<ComplexMatrix>> transformed;  // (id (x) U^k) values[k][i]
  double cauchy_residual = 0.0;      // max over points of selected pairwise diameter
  double containment_residual = 0.0; // max violation of the block-containment certificate
  bool converged = false;
};

/// Full pipeline: per-function unitaries, block-containment certificate,
/// subsequence extraction, per-point limit estimates. The commutative
/// theorem is the special case where every grading is 1.
inline WanderingResult run_wandering(const SequenceSamples& samples, double eps,
                                     double rank_tol = kDefaultRankTol) {
  const int k_total = samples.sequence_length();
  const int m = samples.point_count();
  const std::vector<int> gradings = samples.gradings();
  const int truncation = samples.truncation();

  WanderingResult result;
  result.unitaries.reserve(k_total);
  result.transformed.resize(k_total);

  // Allowed H-slot budget after each point: D_i = n_1^2 + ... + n_i^2.
  std::vector<int> budget(m);
  {
    int acc = 0;
    for (int i = 0; i < m; ++i) {
      acc += gradings[i] * gradings[i];
      budget[i] = acc;
    }
  }

  for (int k = 0; k < k_total; ++k) {
    const ComplexMatrix u_k = build_unitary(samples.values()[k], truncation, rank_tol);
    result.transformed[k].reserve(m);
    for (int i = 0; i < m; ++i) {
      ComplexMatrix moved = left_identity_kron(gradings[i], u_k) * samples.value(k, i);
      result.containment_residual =
          std::max(result.containment_residual, block_escape_norm(moved, budget[i]));
      result.transformed[k].push_back(std::move(moved));
    }
    result.unitaries.push_back(u_k);
  }

  std::vector<std::vector<ComplexMatrix>> by_point(m);
  for (int i = 0; i < m; ++i) {
    by_point[i].reserve(k_total);
    for (int k = 0; k < k_total; ++k) by_point[i].push_back(result.transformed[k][i]);
  }
  result.subsequence = extract_cauchy_subsequence(by_point, std::vector<double>(m, eps));

  result.limits.reserve(m);
  for (int i = 0; i < m; ++i) {
    ComplexMatrix mean(gradings[i] * truncation, gradings[i]);
    for (int k : result.subsequence) mean += by_point[i][k];
    mean *= Complex(1.0 / static_cast<double>(result.subsequence.size()));
    result.limits.push_back(std::move(mean));

    for (size_t a = 0; a < result.subsequence.size(); ++a) {
      for (size_t b = a + 1; b < result.subsequence.size(); ++b) {
        const double dist =
            operator_norm(by_point[i][result.subsequence[a]] - by_point[i][result.subsequence[b]]);
        result.cauchy_residual = std::max(result.cauchy_residual, dist);
      }
    }
  }

  result.converged = result.subsequence.size() >= 2 && result.cauchy_residual <= eps;
  return result;
}

}  // namespace ncmontel
