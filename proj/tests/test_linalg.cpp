#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "ncmontel/complex_matrix.hpp"
#include "ncmontel/errors.hpp"
#include "ncmontel/generators.hpp"
#include "ncmontel/linalg.hpp"

using namespace ncmontel;

TEST_CASE("operator_norm on fixed matrices") {
  CHECK(operator_norm(ComplexMatrix(2, 2)) == 0.0);

  ComplexMatrix diag(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  CHECK_THAT(operator_norm(diag), Catch::Matchers::WithinAbs(2.0, 1e-14));

  // Nilpotent [[0,2],[0,0]]: A^*A = diag(0,4), so the norm is exactly 2.
  ComplexMatrix nil(2, 2);
  nil(0, 1) = 2.0;
  CHECK_THAT(operator_norm(nil), Catch::Matchers::WithinAbs(2.0, 1e-14));
}

TEST_CASE("operator_norm rejects non-finite input") {
  ComplexMatrix bad(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(operator_norm(bad), InvalidInputError);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(operator_norm(bad), InvalidInputError);
}

TEST_CASE("operator_norm equals the norm of the adjoint") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_matrix(rng, rng.uniform_int(1, 6), rng.uniform_int(1, 6));
    CHECK_THAT(operator_norm(a), Catch::Matchers::WithinAbs(operator_norm(a.adjoint()), 1e-12));
  }
}

TEST_CASE("operator_norm of a block diagonal is the max of the blocks") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_matrix(rng, rng.uniform_int(1, 5), rng.uniform_int(1, 5));
    const ComplexMatrix b = random_matrix(rng, rng.uniform_int(1, 5), rng.uniform_int(1, 5));
    const double expected = std::max(operator_norm(a), operator_norm(b));
    CHECK_THAT(operator_norm(blkdiag(a, b)), Catch::Matchers::WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("orthonormal_increment on fixed inputs") {
  const ComplexVector e1 = unit_vector(3, 0);
  const ComplexVector e2 = unit_vector(3, 1);

  SECTION("a fresh unit vector passes through") {
    const auto out = orthonormal_increment({}, {e1});
    REQUIRE(out.size() == 1);
    CHECK(vec_norm(out[0]) == Catch::Approx(1.0).margin(1e-14));
    CHECK(std::abs(inner_product(out[0], e1)) == Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("one Gram-Schmidt step strips the e1 component") {
    ComplexVector v{1.0, 1.0, 0.0};
    const auto out = orthonormal_increment({e1}, {v});
    REQUIRE(out.size() == 1);
    CHECK(std::abs(inner_product(out[0], e1)) < 1e-14);
    CHECK(std::abs(inner_product(out[0], e2)) == Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("a candidate inside the span contributes nothing") {
    ComplexVector v{3.0, 0.0, 0.0};
    CHECK(orthonormal_increment({e1}, {v}).empty());
  }

  SECTION("dimension mismatch is rejected") {
    CHECK_THROWS_AS(orthonormal_increment({e1}, {ComplexVector{1.0, 0.0}}), InvalidInputError);
  }
}

TEST_CASE("orthonormal_increment output joins existing into an orthonormal family") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = rng.uniform_int(2, 12);
    std::vector<ComplexVector> existing;
    {
      ComplexVector seed(dim);
      for (int i = 0; i < dim; ++i) seed[i] = rng.complex_in_square();
      existing = orthonormal_increment({}, {seed});
    }
    std::vector<ComplexVector> candidates;
    const int count = rng.uniform_int(1, dim);
    for (int c = 0; c < count; ++c) {
      ComplexVector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = rng.complex_in_square();
      candidates.push_back(std::move(v));
    }
    auto family = existing;
    const auto added = orthonormal_increment(existing, candidates);
    family.insert(family.end(), added.begin(), added.end());

    for (size_t i = 0; i < family.size(); ++i) {
      for (size_t j = 0; j <= i; ++j) {
        const Complex g = inner_product(family[i], family[j]);
        const Complex expected = (i == j) ? Complex(1.0) : Complex(0.0);
        CHECK(std::abs(g - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("orthonormal_increment spans existing plus candidates") {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = rng.uniform_int(2, 10);
    std::vector<ComplexVector> candidates;
    for (int c = 0; c < rng.uniform_int(1, dim); ++c) {
      ComplexVector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = rng.complex_in_square();
      candidates.push_back(std::move(v));
    }
    const auto basis = orthonormal_increment({}, candidates);
    // Every candidate must be reproduced by its expansion in the basis.
    for (const auto& c : candidates) {
      ComplexVector residual = c;
      for (const auto& u : basis) {
        const Complex coeff = inner_product(c, u);
        for (size_t i = 0; i < residual.size(); ++i) residual[i] -= coeff * u[i];
      }
      CHECK(vec_norm(residual) < 1e-9 * std::max(1.0, vec_norm(c)));
    }
  }
}

TEST_CASE("complete_to_unitary on fixed inputs") {
  SECTION("no constraints gives the identity") {
    CHECK(complete_to_unitary({}, 3) == ComplexMatrix::identity(3));
  }

  SECTION("e2 -> e1 in dimension 2") {
    const auto u = complete_to_unitary({{unit_vector(2, 1), unit_vector(2, 0)}}, 2);
    CHECK(unitarity_defect(u) < 1e-14);
    const ComplexVector moved = matvec(u, unit_vector(2, 1));
    CHECK(std::abs(moved[0] - Complex(1.0)) < 1e-14);
    CHECK(std::abs(moved[1]) < 1e-14);
  }

  SECTION("non-orthonormal sources are a precondition error") {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ComplexVector mixed{inv_sqrt2, inv_sqrt2};
    CHECK_THROWS_AS(complete_to_unitary({{unit_vector(2, 0), unit_vector(2, 0)},
                                         {mixed, unit_vector(2, 1)}},
                                        2),
                    PreconditionError);
  }

  SECTION("more constraints than dimensions is invalid") {
    std::vector<std::pair<ComplexVector, ComplexVector>> pairs(
        3, {unit_vector(2, 0), unit_vector(2, 0)});
    CHECK_THROWS_AS(complete_to_unitary(pairs, 2), InvalidInputError);
  }
}

TEST_CASE("complete_to_unitary random constraint sets stay unitary and interpolate") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = rng.uniform_int(2, 16);
    const int count = rng.uniform_int(0, dim);
    const auto make_family = [&](int c) {
      std::vector<ComplexVector> family;
      while (static_cast<int>(family.size()) < c) {
        ComplexVector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = rng.complex_in_square();
        auto inc = orthonormal_increment(family, {v});
        for (auto& w : inc) family.push_back(std::move(w));
      }
      return family;
    };
    const auto sources = make_family(count);
    const auto targets = make_family(count);
    std::vector<std::pair<ComplexVector, ComplexVector>> pairs;
    for (int c = 0; c < count; ++c) pairs.emplace_back(sources[c], targets[c]);

    const ComplexMatrix u = complete_to_unitary(pairs, dim);
    CHECK(unitarity_defect(u) <= 1e-10);
    for (int c = 0; c < count; ++c) {
      ComplexVector moved = matvec(u, sources[c]);
      for (int i = 0; i < dim; ++i) moved[i] -= targets[c][i];
      CHECK(vec_norm(moved) <= 1e-9);
    }
  }
}
