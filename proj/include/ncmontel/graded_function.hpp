#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/free_poly.hpp"
#include "ncmontel/linalg.hpp"
#include "ncmontel/nc_points.hpp"

namespace ncmontel {

/// Truncated Hilbert-space-valued graded function.
///
/// At a grading-n point the value is an (n*M) x n matrix: column r holds the
/// image of e_r in C^n (x) C^M. Tensor coordinates are stored H-fastest: the
/// pair (s, m) with s in 1..n and m in 1..M lives at row (s-1)*M + m. Under
/// this layout id_n (x) U acts as a block diagonal of n copies of U and
/// S (x) id_H as right_identity_kron(S, M).
class GradedFunction {
public:
  using Evaluator = std::function<ComplexMatrix(const MatrixTuple&)>;

  GradedFunction(int d, int truncation, Evaluator evaluator, std::string descriptor)
      : d_(d), m_(truncation), evaluator_(std::move(evaluator)),
        descriptor_(std::move(descriptor)) {
    if (d_ < 1) throw InvalidInputError("GradedFunction: d must be positive");
    if (m_ < 1) throw InvalidInputError("GradedFunction: truncation must be positive");
    if (!evaluator_) throw InvalidInputError("GradedFunction: missing evaluator");
  }

  int d() const { return d_; }
  int truncation() const { return m_; }
  const std::string& descriptor() const { return descriptor_; }

  ComplexMatrix evaluate(const MatrixTuple& point) const {
    if (point.d() != d_) {
      throw InvalidInputError("GradedFunction::evaluate: point has wrong number of variables");
    }
    ComplexMatrix value = evaluator_(point);
    const int n = point.grading();
    if (value.rows() != n * m_ || value.cols() != n) {
      throw Error("GradedFunction::evaluate: evaluator returned shape " +
                  std::to_string(value.rows()) + "x" + std::to_string(value.cols()) +
                  ", expected " + std::to_string(n * m_) + "x" + std::to_string(n));
    }
    return value;
  }

private:
  int d_;
  int m_;
  Evaluator evaluator_;
  std::string descriptor_;
};

/// Builds a genuinely nc function from M scalar free polynomials: H-component
/// m of the value at a point is the m-th polynomial evaluated there. Zero
/// polynomials are fine as entries.
inline GradedFunction from_scalar_polys(const std::vector<FreePoly>& qs) {
  if (qs.empty()) throw InvalidInputError("from_scalar_polys: empty polynomial list");
  int d = 1;
  for (const FreePoly& q : qs) d = std::max(d, q.max_variable());
  const int truncation = static_cast<int>(qs.size());
  auto evaluator = [qs, truncation](const MatrixTuple& point) {
    const int n = point.grading();
    ComplexMatrix value(n * truncation, n);
    for (int m = 0; m < truncation; ++m) {
      if (qs[m].is_zero()) continue;
      const ComplexMatrix qv = evaluate(qs[m], point);
      for (int s = 0; s < n; ++s)
        for (int r = 0; r < n; ++r) value(s * truncation + m, r) = qv(s, r);
    }
    return value;
  };
  return GradedFunction(d, truncation, std::move(evaluator),
                        "from_scalar_polys[" + std::to_string(truncation) + " components]");
}

/// U * u: post-compose every value with id_n (x) U for an M x M unitary U.
inline GradedFunction unitary_action(const ComplexMatrix& u_matrix, const GradedFunction& u) {
  if (u_matrix.rows() != u.truncation() || u_matrix.cols() != u.truncation()) {
    throw InvalidInputError("unitary_action: matrix size does not match truncation");
  }
  if (unitarity_defect(u_matrix) > 1e-8) {
    throw PreconditionError("unitary_action: matrix is not unitary within 1e-8");
  }
  auto evaluator = [u_matrix, u](const MatrixTuple& point) {
    return left_identity_kron(point.grading(), u_matrix) * u.evaluate(point);
  };
  return GradedFunction(u.d(), u.truncation(), std::move(evaluator),
                        "unitary_action(" + u.descriptor() + ")");
}

/// The canonical identification of values under direct sums: with the
/// H-fastest layout it is exactly the block diagonal.
inline ComplexMatrix direct_sum_embed(const ComplexMatrix& a, const ComplexMatrix& b) {
  return blkdiag(a, b);
}

struct NcCheckCase {
  std::string kind;      // "direct-sum" or "similarity"
  std::string detail;
  double residual = 0.0;
  std::string error;     // non-empty when the case could not be evaluated
};

struct NcCheckReport {
  double max_direct_sum_residual = 0.0;
  double max_similarity_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::vector<NcCheckCase> cases;
};

/// Samples the two nc-function axioms: values at direct sums must be block
/// diagonals of the summand values, and conjugating the point must conjugate
/// the value through S (x) id_H on the left and S^{-1} on the right.
/// A near-singular similarity is recorded as a case error, not a failure.
inline NcCheckReport check_nc_axioms(
    const GradedFunction& u,
    const std::vector<std::pair<MatrixTuple, MatrixTuple>>& direct_sum_pairs,
    const std::vector<std::pair<MatrixTuple, ComplexMatrix>>& similarity_cases, double tol) {
  NcCheckReport report;
  report.tolerance = tol;

  int case_index = 0;
  for (const auto& [lambda, mu] : direct_sum_pairs) {
    NcCheckCase c;
    c.kind = "direct-sum";
    c.detail = "pair " + std::to_string(case_index) + " (gradings " +
               std::to_string(lambda.grading()) + "," + std::to_string(mu.grading()) + ")";
    try {
      const ComplexMatrix lhs = u.evaluate(direct_sum(lambda, mu));
      const ComplexMatrix rhs = direct_sum_embed(u.evaluate(lambda), u.evaluate(mu));
      c.residual = operator_norm(lhs - rhs);
      report.max_direct_sum_residual = std::max(report.max_direct_sum_residual, c.residual);
    } catch (const Error& e) {
      c.error = e.what();
    }
    report.cases.push_back(std::move(c));
    ++case_index;
  }

  case_index = 0;
  for (const auto& [lambda, s] : similarity_cases) {
    NcCheckCase c;
    c.kind = "similarity";
    c.detail = "case " + std::to_string(case_index) + " (grading " +
               std::to_string(lambda.grading()) + ")";
    try {
      const MatrixTuple conjugated = conjugate(lambda, s);
      const ComplexMatrix lhs = u.evaluate(conjugated);
      const ComplexMatrix rhs =
          right_identity_kron(s, u.truncation()) * u.evaluate(lambda) * inverse(s);
      c.residual = operator_norm(lhs - rhs);
      report.max_similarity_residual = std::max(report.max_similarity_residual, c.residual);
    } catch (const Error& e) {
      c.error = e.what();
    }
    report.cases.push_back(std::move(c));
    ++case_index;
  }

  report.passed = report.max_direct_sum_residual <= tol && report.max_similarity_residual <= tol;
  return report;
}

}  // namespace ncmontel
