#include "peereval/core.hpp"

#include <cstdio>

namespace peereval {

namespace {

std::string cell_message(const char* what, std::size_t i, std::size_t j) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s at (%zu, %zu)", what, i, j);
  return buf;
}

}  // namespace

const EvaluationMatrix& validate_matrix(const EvaluationMatrix& A, bool require_zero_diagonal) {
  const std::size_t n = A.size();
  if (n < 2) {
    throw PeerEvalError(ErrorCode::TooSmall, "a team needs at least two students");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(A(i, j) >= 0.0)) {
        throw PeerEvalError(ErrorCode::NegativeEntry,
                            cell_message("evaluation is negative or NaN", i, j));
      }
    }
  }
  if (require_zero_diagonal) {
    for (std::size_t i = 0; i < n; ++i) {
      if (A(i, i) != 0.0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "self-evaluation must be zero (student %zu)", i);
        throw PeerEvalError(ErrorCode::NonzeroDiagonal, buf);
      }
    }
  }
  return A;
}

EvaluationMatrix normalize_columns(const EvaluationMatrix& A) {
  const std::size_t n = A.size();
  EvaluationMatrix out = A;
  for (std::size_t j = 0; j < n; ++j) {
    double sum = A.column_sum(j);
    if (!(sum > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "column %zu of the evaluation matrix is all zeros", j);
      throw PeerEvalError(ErrorCode::ZeroColumn, buf);
    }
    if (sum == 1.0) continue;  // already stochastic, keep entries bit-exact
    for (std::size_t i = 0; i < n; ++i) out(i, j) = A(i, j) / sum;
  }
  return out;
}

ImputationResult impute_missing(const EvaluationMatrix& A, const std::set<std::size_t>& missing,
                                const InstructorWeights& w) {
  const std::size_t n = A.size();
  if (w.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch,
                        "instructor weights and evaluation matrix size differ");
  }
  for (std::size_t j : missing) {
    if (j >= n) {
      throw PeerEvalError(ErrorCode::InvalidIndex, "missing-student index out of range");
    }
  }
  if (missing.size() == n) {
    throw PeerEvalError(ErrorCode::AllMissing, "every student failed to submit evaluations");
  }
  EvaluationMatrix evals = A;
  std::vector<double> weights = w.values();
  for (std::size_t j : missing) {
    // Equal scores for everyone else; the constant is arbitrary because the
    // ratio construction is scale-free per column.
    for (std::size_t i = 0; i < n; ++i) evals(i, j) = (i == j) ? 0.0 : 1.0;
    evals.set_submitted(j, false);
    weights[j] = 0.0;
  }
  return ImputationResult{std::move(evals), InstructorWeights(std::move(weights))};
}

}  // namespace peereval
