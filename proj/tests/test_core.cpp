#include <doctest.h>

#include <cmath>
#include <limits>

#include "peereval/core.hpp"
#include "peereval/mechanisms.hpp"
#include "test_helpers.hpp"

using namespace peereval;
using testutil::error_code_of;

namespace {

const std::vector<std::vector<double>> kRawTeamOfThree = {{0, 2, 2}, {3, 0, 3}, {5, 5, 0}};

}  // namespace

TEST_CASE("validate_matrix accepts a well-formed zero-diagonal matrix") {
  auto A = EvaluationMatrix::from_rows(
      {{0, 2.0 / 3, 2.0 / 3}, {0.5, 0, 1.0 / 3}, {0.5, 1.0 / 3, 0}});
  CHECK(&validate_matrix(A, true) == &A);
}

TEST_CASE("validate_matrix rejects a nonzero diagonal when asked") {
  auto A = EvaluationMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(error_code_of([&] { validate_matrix(A, true); }) == ErrorCode::NonzeroDiagonal);
  CHECK(error_code_of([&] { validate_matrix(A, false); }) == std::nullopt);
}

TEST_CASE("validate_matrix rejects single-student teams") {
  EvaluationMatrix A(1);
  CHECK(error_code_of([&] { validate_matrix(A); }) == ErrorCode::TooSmall);
}

TEST_CASE("validate_matrix rejects negative entries") {
  auto A = EvaluationMatrix::from_rows({{0, -1}, {1, 0}});
  CHECK(error_code_of([&] { validate_matrix(A); }) == ErrorCode::NegativeEntry);
}

TEST_CASE("normalize_columns divides each column by its sum") {
  auto N = normalize_columns(EvaluationMatrix::from_rows(kRawTeamOfThree));
  // Column sums are 8, 7, 5.
  CHECK(N(0, 0) == 0.0);
  CHECK(N(1, 0) == doctest::Approx(3.0 / 8).epsilon(1e-15));
  CHECK(N(2, 0) == doctest::Approx(5.0 / 8).epsilon(1e-15));
  CHECK(N(0, 1) == doctest::Approx(2.0 / 7).epsilon(1e-15));
  CHECK(N(1, 1) == 0.0);
  CHECK(N(2, 1) == doctest::Approx(5.0 / 7).epsilon(1e-15));
  CHECK(N(0, 2) == doctest::Approx(2.0 / 5).epsilon(1e-15));
  CHECK(N(1, 2) == doctest::Approx(3.0 / 5).epsilon(1e-15));
  CHECK(N(2, 2) == 0.0);
}

TEST_CASE("normalize_columns keeps an exactly stochastic matrix bit-identical") {
  auto A = EvaluationMatrix::from_rows({{0.5, 0.25}, {0.5, 0.75}});
  CHECK(normalize_columns(A) == A);
}

TEST_CASE("normalize_columns is idempotent and column-scale invariant") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + rep % 6;
    auto A = testutil::random_matrix(rng, n, 0.0);
    auto N = normalize_columns(A);
    auto NN = normalize_columns(N);
    auto scaled = A;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = 0.25 + 4.0 * testutil::uniform01(rng);
      for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= c;
    }
    auto Nscaled = normalize_columns(scaled);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(NN(i, j) == doctest::Approx(N(i, j)).epsilon(1e-12));
        CHECK(Nscaled(i, j) == doctest::Approx(N(i, j)).epsilon(1e-12));
        if (A(i, j) == 0.0) CHECK(N(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("normalize_columns rejects an all-zero column") {
  auto A = EvaluationMatrix::from_rows({{0, 1, 0}, {1, 0, 0}, {1, 1, 0}});
  CHECK(error_code_of([&] { normalize_columns(A); }) == ErrorCode::ZeroColumn);
}

TEST_CASE("impute_missing fills one column with equal scores and zeroes the weight") {
  auto A = EvaluationMatrix::from_rows({{0, 2, 0}, {3, 0, 0}, {5, 5, 0}});
  A.set_submitted(2, false);
  auto [evals, weights] = impute_missing(A, {2}, InstructorWeights({1, 1, 1}));
  CHECK(evals(0, 2) == 1.0);
  CHECK(evals(1, 2) == 1.0);
  CHECK(evals(2, 2) == 0.0);
  CHECK_FALSE(evals.submitted(2));
  CHECK(weights.values() == std::vector<double>{1, 1, 0});
  // Untouched columns stay untouched.
  CHECK(evals(0, 0) == 0.0);
  CHECK(evals(1, 0) == 3.0);
  CHECK(evals(0, 1) == 2.0);
}

TEST_CASE("impute_missing with no missing students is the identity") {
  auto A = EvaluationMatrix::from_rows(kRawTeamOfThree);
  auto w = InstructorWeights({1, 2, 3});
  auto [evals, weights] = impute_missing(A, {}, w);
  CHECK(evals == A);
  CHECK(weights == w);
}

TEST_CASE("impute_missing rejects a fully missing team") {
  EvaluationMatrix A(3);
  CHECK(error_code_of([&] { impute_missing(A, {0, 1, 2}, InstructorWeights({1, 1, 1})); }) ==
        ErrorCode::AllMissing);
}

TEST_CASE("impute_missing never modifies unaffected columns") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rep % 5;
    auto A = testutil::random_matrix(rng, n);
    const std::size_t gone = rng() % n;
    auto [evals, weights] =
        impute_missing(A, {gone}, InstructorWeights(std::vector<double>(n, 2.0)));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == gone) continue;
      CHECK(weights[j] == 2.0);
      for (std::size_t i = 0; i < n; ++i) CHECK(evals(i, j) == A(i, j));
    }
  }
}

TEST_CASE("validate_matrix accepts every truthful matrix") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + rep % 8;
    ContributionVector t(testutil::random_shares(rng, n));
    CHECK(error_code_of([&] { validate_matrix(truthful_matrix(t), true); }) == std::nullopt);
  }
}

TEST_CASE("extended ratio classifies fractions by the sign pattern") {
  CHECK(ExtendedRatio::from_fraction(2, 4) == ExtendedRatio::finite(0.5));
  CHECK(ExtendedRatio::from_fraction(0, 3).is_zero());
  CHECK(ExtendedRatio::from_fraction(3, 0).is_infinite());
  CHECK(ExtendedRatio::from_fraction(0, 0).is_undefined());
  CHECK(ExtendedRatio::from_fraction(0, 3).is_finite());
  CHECK_FALSE(ExtendedRatio::from_fraction(3, 0).is_finite());
  CHECK(error_code_of([] { ExtendedRatio::finite(0.0); }) == ErrorCode::InvalidValue);
  CHECK(error_code_of([] { ExtendedRatio::finite(-1.0); }) == ErrorCode::InvalidValue);
  CHECK(error_code_of([] { ExtendedRatio::from_fraction(-1, 1); }) == ErrorCode::InvalidValue);
}

TEST_CASE("extended ratio reciprocals pair up") {
  CHECK(ExtendedRatio::finite(2.0).reciprocal() == ExtendedRatio::finite(0.5));
  CHECK(ExtendedRatio::zero().reciprocal().is_infinite());
  CHECK(ExtendedRatio::infinite().reciprocal().is_zero());
  CHECK(ExtendedRatio::undefined().reciprocal().is_undefined());
}

TEST_CASE("contribution vector enforces the simplex invariants") {
  CHECK(error_code_of([] { ContributionVector({0.5, 0.6}); }) == ErrorCode::InvalidValue);
  CHECK(error_code_of([] { ContributionVector({1.5, -0.5}); }) == ErrorCode::InvalidValue);
  CHECK(error_code_of([] { ContributionVector({0.5, 0.5}); }) == std::nullopt);
  auto normalized = ContributionVector::normalized({2, 3, 5});
  CHECK(normalized[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(normalized[2] == doctest::Approx(0.5).epsilon(1e-15));
}
