#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"

namespace ncmontel {

/// Default relative rank tolerance. Separates genuine rank from double
/// precision round-off at the scales this library works at.
inline constexpr double kDefaultRankTol = 1e-10;

namespace detail {

using EigenRowMajor =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline EigenRowMajor to_eigen(const ComplexMatrix& a) {
  EigenRowMajor m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline ComplexMatrix from_eigen(const EigenRowMajor& m) {
  ComplexMatrix a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

}  // namespace detail

/// Singular values of a dense complex matrix, descending.
inline std::vector<double> singular_values(const ComplexMatrix& a) {
  if (!a.is_finite()) {
    throw InvalidInputError("singular_values: non-finite entries");
  }
  if (a.rows() == 0 || a.cols() == 0) return {};
  Eigen::JacobiSVD<detail::EigenRowMajor> svd(detail::to_eigen(a));
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

/// Largest singular value. This is the norm used everywhere in this library.
inline double operator_norm(const ComplexMatrix& a) {
  if (!a.is_finite()) {
    throw InvalidInputError("operator_norm: non-finite entries");
  }
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const std::vector<double> sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

/// Eigenvalues of a (numerically) hermitian matrix, ascending. The input is
/// symmetrized first, so tiny hermiticity violations do not perturb the
/// spectrum estimate.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidInputError("hermitian_eigenvalues: matrix not square");
  }
  if (!a.is_finite()) {
    throw InvalidInputError("hermitian_eigenvalues: non-finite entries");
  }
  detail::EigenRowMajor m = detail::to_eigen(a);
  m = ((m + m.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<detail::EigenRowMajor> es(m);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

/// Ratio of extreme singular values; infinity for singular input.
inline double condition_estimate(const ComplexMatrix& a) {
  const std::vector<double> sv = singular_values(a);
  if (sv.empty() || sv.back() == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv.front() / sv.back();
}

inline ComplexMatrix inverse(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidInputError("inverse: matrix not square");
  }
  Eigen::PartialPivLU<detail::EigenRowMajor> lu(detail::to_eigen(a));
  return detail::from_eigen(lu.inverse().eval());
}

/// Orthonormal basis of span(existing + candidates) minus span(existing).
///
/// `existing` must already be pairwise orthonormal; candidates are swept in
/// order with modified Gram-Schmidt, re-orthogonalized once, and kept when the
/// residual norm exceeds rank_tol relative to the largest candidate norm. The
/// in-order sweep makes the output deterministic.
inline std::vector<ComplexVector> orthonormal_increment(
    const std::vector<ComplexVector>& existing, const std::vector<ComplexVector>& candidates,
    double rank_tol = kDefaultRankTol) {
  size_t dim = 0;
  if (!existing.empty()) {
    dim = existing.front().size();
  } else if (!candidates.empty()) {
    dim = candidates.front().size();
  }
  for (const auto& v : existing) {
    if (v.size() != dim) throw InvalidInputError("orthonormal_increment: dimension mismatch");
  }
  double scale = 0.0;
  for (const auto& v : candidates) {
    if (v.size() != dim) throw InvalidInputError("orthonormal_increment: dimension mismatch");
    scale = std::max(scale, vec_norm(v));
  }
  std::vector<ComplexVector> added;
  if (scale == 0.0) return added;
  const double threshold = rank_tol * scale;

  for (const ComplexVector& c : candidates) {
    ComplexVector v = c;
    // Two projection passes; one is not enough when a candidate is nearly in
    // the current span.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : existing) {
        const Complex coeff = inner_product(v, u);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= coeff * u[i];
      }
      for (const auto& u : added) {
        const Complex coeff = inner_product(v, u);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= coeff * u[i];
      }
    }
    const double n = vec_norm(v);
    if (n > threshold) {
      for (Complex& z : v) z /= n;
      added.push_back(std::move(v));
    }
  }
  return added;
}

/// Builds a dim x dim unitary U with U * source_j = target_j for every pair.
///
/// Both families are extended to full orthonormal bases of C^dim by sweeping
/// the standard basis in index order, then U is the composition of the two
/// basis changes. The standard-basis sweep keeps the result deterministic.
inline ComplexMatrix complete_to_unitary(
    const std::vector<std::pair<ComplexVector, ComplexVector>>& pairs, int dim,
    double tol = kDefaultRankTol) {
  if (dim <= 0) throw InvalidInputError("complete_to_unitary: dim must be positive");
  if (static_cast<int>(pairs.size()) > dim) {
    throw InvalidInputError("complete_to_unitary: more constraints than dimensions");
  }
  std::vector<ComplexVector> sources, targets;
  sources.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    if (static_cast<int>(s.size()) != dim || static_cast<int>(t.size()) != dim) {
      throw InvalidInputError("complete_to_unitary: vector length != dim");
    }
    sources.push_back(s);
    targets.push_back(t);
  }

  const auto check_orthonormal = [&](const std::vector<ComplexVector>& vs, const char* which) {
    for (size_t i = 0; i < vs.size(); ++i) {
      for (size_t j = 0; j <= i; ++j) {
        const Complex g = inner_product(vs[i], vs[j]);
        const Complex expected = (i == j) ? Complex(1.0) : Complex(0.0);
        if (std::abs(g - expected) > 100.0 * tol) {
          throw PreconditionError(std::string("complete_to_unitary: ") + which +
                                  " vectors not orthonormal within tolerance");
        }
      }
    }
  };
  check_orthonormal(sources, "source");
  check_orthonormal(targets, "target");

  const auto extend_to_basis = [&](std::vector<ComplexVector> base) {
    for (int j = 0; j < dim && static_cast<int>(base.size()) < dim; ++j) {
      auto inc = orthonormal_increment(base, {unit_vector(dim, j)}, tol);
      for (auto& v : inc) base.push_back(std::move(v));
    }
    if (static_cast<int>(base.size()) != dim) {
      throw PreconditionError("complete_to_unitary: failed to extend to a full basis");
    }
    return base;
  };

  const std::vector<ComplexVector> src_basis = extend_to_basis(sources);
  const std::vector<ComplexVector> tgt_basis = extend_to_basis(targets);

  // U = T * S^* where S, T have the bases as columns.
  ComplexMatrix s_mat(dim, dim), t_mat(dim, dim);
  for (int j = 0; j < dim; ++j) {
    s_mat.set_col(j, src_basis[j]);
    t_mat.set_col(j, tgt_basis[j]);
  }
  return t_mat * s_mat.adjoint();
}

/// || U^* U - I ||_op, a direct unitarity certificate.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return operator_norm(u.adjoint() * u - ComplexMatrix::identity(u.cols()));
}

}  // namespace ncmontel
