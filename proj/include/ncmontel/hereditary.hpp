#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/free_poly.hpp"
#include "ncmontel/graded_function.hpp"
#include "ncmontel/linalg.hpp"
#include "ncmontel/nc_points.hpp"
#include "ncmontel/wandering.hpp"

namespace ncmontel {

/// A hereditary function sampled through an evaluator: defined on pairs of
/// same-grading points, returning a (g*n) x (g*n) matrix where g is 1 for
/// plain Gram kernels and J for model-cone elements.
class HereditaryKernel {
public:
  using Evaluator = std::function<ComplexMatrix(const MatrixTuple&, const MatrixTuple&)>;

  HereditaryKernel(int d, int multiplier, Evaluator evaluator, std::string descriptor)
      : d_(d), multiplier_(multiplier), evaluator_(std::move(evaluator)),
        descriptor_(std::move(descriptor)) {
    if (d_ < 1 || multiplier_ < 1) {
      throw InvalidInputError("HereditaryKernel: bad dimensions");
    }
    if (!evaluator_) throw InvalidInputError("HereditaryKernel: missing evaluator");
  }

  int d() const { return d_; }
  int multiplier() const { return multiplier_; }
  const std::string& descriptor() const { return descriptor_; }

  ComplexMatrix evaluate(const MatrixTuple& lambda, const MatrixTuple& mu) const {
    if (lambda.d() != d_ || mu.d() != d_) {
      throw InvalidInputError("HereditaryKernel: point has wrong number of variables");
    }
    if (lambda.grading() != mu.grading()) {
      throw InvalidInputError("HereditaryKernel: defined only on same-grading pairs");
    }
    ComplexMatrix value = evaluator_(lambda, mu);
    const int expected = multiplier_ * lambda.grading();
    if (value.rows() != expected || value.cols() != expected) {
      throw Error("HereditaryKernel: evaluator returned wrong shape");
    }
    return value;
  }

private:
  int d_;
  int multiplier_;
  Evaluator evaluator_;
  std::string descriptor_;
};

/// The Gram kernel A(lambda, mu) = u(mu)^* u(lambda); positive semidefinite
/// on the diagonal by construction.
inline HereditaryKernel kernel_from_function(const GradedFunction& u) {
  auto evaluator = [u](const MatrixTuple& lambda, const MatrixTuple& mu) {
    return u.evaluate(mu).adjoint() * u.evaluate(lambda);
  };
  return HereditaryKernel(u.d(), 1, std::move(evaluator),
                          "gram-kernel(" + u.descriptor() + ")");
}

namespace detail {

/// Model-cone value from raw value matrices and the evaluated polynomial
/// matrix at both points. Shared by the kernel constructor and the
/// table-driven recovery below.
inline ComplexMatrix model_cone_value(const ComplexMatrix& value_lambda,
                                      const ComplexMatrix& value_mu,
                                      const ComplexMatrix& delta_lambda,
                                      const ComplexMatrix& delta_mu, int j_legs) {
  const int n = value_lambda.cols();
  const int truncation = value_lambda.rows() / n;
  const ComplexMatrix gram = delta_mu.adjoint() * delta_lambda;  // (J n) x (J n), needs J == L
  ComplexMatrix middle = ComplexMatrix::identity(j_legs * n * truncation);
  middle -= right_identity_kron(gram, truncation);
  const ComplexMatrix x_lambda = left_identity_kron(j_legs, value_lambda);
  const ComplexMatrix x_mu = left_identity_kron(j_legs, value_mu);
  return x_mu.adjoint() * (middle * x_lambda);
}

}  // namespace detail

/// Model-cone element over the polyhedron cut out by delta:
///   (id_J (x) u(mu)^*) (id - delta(mu)^* delta(lambda) (x) id_H) (id_J (x) u(lambda)).
/// delta must be square (same leg count on both tensor sides). The evaluator
/// does not itself require points to lie inside the polyhedron; membership is
/// the caller's concern and is what makes the diagonal values PSD.
inline HereditaryKernel model_cone_element(const FreePolyMatrix& delta, const GradedFunction& u) {
  if (delta.d() != u.d()) {
    throw InvalidInputError("model_cone_element: delta and u disagree on variable count");
  }
  if (delta.j_rows() != delta.l_cols()) {
    throw InvalidInputError("model_cone_element: delta must be square (J == L)");
  }
  const int j_legs = delta.j_rows();
  auto evaluator = [delta, u, j_legs](const MatrixTuple& lambda, const MatrixTuple& mu) {
    return detail::model_cone_value(u.evaluate(lambda), u.evaluate(mu),
                                    evaluate(delta, lambda), evaluate(delta, mu), j_legs);
  };
  return HereditaryKernel(u.d(), j_legs, std::move(evaluator),
                          "model-cone(" + u.descriptor() + ")");
}

/// All ordered same-grading index pairs of a sample set, in row-major order.
inline std::vector<std::pair<int, int>> same_grading_pairs(const SampleSet& grid) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j)
      if (grid.point(i).grading() == grid.point(j).grading()) pairs.emplace_back(i, j);
  return pairs;
}

/// Max deviation of two kernels over all same-grading pairs from the grid;
/// the finite surrogate for hereditary-space distance.
inline double kernel_distance(const HereditaryKernel& a, const HereditaryKernel& b,
                              const SampleSet& grid) {
  if (a.d() != b.d() || a.multiplier() != b.multiplier()) {
    throw InvalidInputError("kernel_distance: kernels are not comparable");
  }
  const auto pairs = same_grading_pairs(grid);
  if (pairs.empty()) throw InvalidInputError("kernel_distance: no same-grading pairs in grid");
  double dist = 0.0;
  for (const auto& [i, j] : pairs) {
    dist = std::max(dist, operator_norm(a.evaluate(grid.point(i), grid.point(j)) -
                                        b.evaluate(grid.point(i), grid.point(j))));
  }
  return dist;
}

enum class ConeMode { ConeP, ModelCone };

inline const char* to_string(ConeMode mode) {
  return mode == ConeMode::ConeP ? "cone-P" : "model-cone";
}

struct ClosureRecoverResult {
  WanderingResult wandering;
  std::vector<ComplexMatrix> limits;       // per-point recovered values
  double residual = 0.0;                   // recovered kernel vs mean of selected kernels
  double invariance_residual = 0.0;        // kernels before vs after the unitaries
  std::vector<std::pair<int, int>> pairs;  // same-grading pairs evaluated
  std::vector<double> pair_distances;      // per-pair distance behind `residual`
};

/// Recovers a cone element from a sampled sequence whose kernels converge.
///
/// Runs the wandering pipeline on the raw samples, reads off per-point limits,
/// and certifies that the kernel built from the limits matches the mean of the
/// selected functions' kernels on every same-grading grid pair. Also certifies
/// the mechanism itself: applying the constructed unitaries leaves each
/// function's kernel unchanged.
inline ClosureRecoverResult closure_recover(const SequenceSamples& samples,
                                            const SampleSet& grid, ConeMode mode,
                                            const std::optional<FreePolyMatrix>& delta,
                                            double eps, double rank_tol = kDefaultRankTol) {
  if (samples.point_count() != grid.size()) {
    throw InvalidInputError("closure_recover: samples are not aligned with the grid");
  }
  for (int i = 0; i < grid.size(); ++i) {
    if (!(samples.points().point(i) == grid.point(i))) {
      throw InvalidInputError("closure_recover: samples are not aligned with the grid");
    }
  }
  int j_legs = 1;
  std::vector<ComplexMatrix> delta_values;
  if (mode == ConeMode::ModelCone) {
    if (!delta) throw InvalidInputError("closure_recover: model-cone mode needs delta");
    if (delta->j_rows() != delta->l_cols()) {
      throw InvalidInputError("closure_recover: delta must be square (J == L)");
    }
    j_legs = delta->j_rows();
    delta_values.reserve(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      if (polyhedron_margin(*delta, grid.point(i)) <= 0.0) {
        throw PreconditionError("closure_recover: grid point " + std::to_string(i) +
                                " lies outside the polyhedron (margin <= 0)");
      }
      delta_values.push_back(evaluate(*delta, grid.point(i)));
    }
  }

  ClosureRecoverResult result;
  result.wandering = run_wandering(samples, eps, rank_tol);
  result.limits = result.wandering.limits;
  result.pairs = same_grading_pairs(grid);
  if (result.pairs.empty()) {
    throw InvalidInputError("closure_recover: no same-grading pairs in grid");
  }

  const auto kernel_value = [&](const ComplexMatrix& v_lambda, const ComplexMatrix& v_mu, int i,
                                int j) {
    if (mode == ConeMode::ConeP) return v_mu.adjoint() * v_lambda;
    return detail::model_cone_value(v_lambda, v_mu, delta_values[i], delta_values[j], j_legs);
  };

  const auto& selected = result.wandering.subsequence;
  result.pair_distances.reserve(result.pairs.size());
  for (const auto& [i, j] : result.pairs) {
    const ComplexMatrix recovered = kernel_value(result.limits[i], result.limits[j], i, j);
    ComplexMatrix mean(recovered.rows(), recovered.cols());
    for (int k : selected) mean += kernel_value(samples.value(k, i), samples.value(k, j), i, j);
    mean *= Complex(1.0 / static_cast<double>(selected.size()));
    const double dist = operator_norm(recovered - mean);
    result.pair_distances.push_back(dist);
    result.residual = std::max(result.residual, dist);

    for (int k : selected) {
      const ComplexMatrix raw = kernel_value(samples.value(k, i), samples.value(k, j), i, j);
      const ComplexMatrix moved = kernel_value(result.wandering.transformed[k][i],
                                               result.wandering.transformed[k][j], i, j);
      result.invariance_residual =
          std::max(result.invariance_residual, operator_norm(raw - moved));
    }
  }
  return result;
}

}  // namespace ncmontel
