#pragma once

#include <set>

#include "peereval/types.hpp"

namespace peereval {

/// Checks entry nonnegativity, minimum team size, and optionally a zero
/// diagonal. Returns its argument untouched so calls can be chained.
const EvaluationMatrix& validate_matrix(const EvaluationMatrix& A,
                                        bool require_zero_diagonal = false);

/// Divides every column by its sum. Zero pattern is preserved; an all-zero
/// column is an error.
EvaluationMatrix normalize_columns(const EvaluationMatrix& A);

struct ImputationResult {
  EvaluationMatrix evaluations;
  InstructorWeights weights;
};

/// Fills each missing student's column with equal scores for everyone else
/// (self entry zero), clears the column's submitted flag, and forces the
/// student's instructor weight to zero so the imputed column carries no
/// weight downstream.
ImputationResult impute_missing(const EvaluationMatrix& A,
                                const std::set<std::size_t>& missing,
                                const InstructorWeights& w);

}  // namespace peereval
