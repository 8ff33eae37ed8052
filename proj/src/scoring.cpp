#include "peereval/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace peereval {

ScoreWeights::ScoreWeights(double mechanism, double report, double consistency)
    : mechanism_(mechanism), report_(report), consistency_(consistency) {
  if (!(mechanism >= 0.0) || !(report >= 0.0) || !(consistency >= 0.0)) {
    throw PeerEvalError(ErrorCode::InvalidValue, "score weights must be nonnegative");
  }
  const double sum = mechanism + report + consistency;
  if (std::abs(sum - 1.0) > kShareSumTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "score weights sum to %.17g, expected 1", sum);
    throw PeerEvalError(ErrorCode::InvalidValue, buf);
  }
}

double evaluation_error(const EvaluationMatrix& A_with_self, const ContributionVector& s,
                        std::size_t evaluator, ErrorFormula formula) {
  const std::size_t n = A_with_self.size();
  if (s.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch,
                        "shares and evaluation matrix size differ");
  }
  if (evaluator >= n) {
    throw PeerEvalError(ErrorCode::InvalidIndex, "evaluator index out of range");
  }
  const double column_sum = A_with_self.column_sum(evaluator);
  if (!(column_sum > 0.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "column %zu of the evaluation matrix is all zeros", evaluator);
    throw PeerEvalError(ErrorCode::ZeroColumn, buf);
  }

  if (formula == ErrorFormula::AsPrinted) {
    const double target = s[evaluator];
    if (!(target > 0.0)) {
      throw PeerEvalError(ErrorCode::NoComparableEntries,
                          "evaluator's own share is zero; relative error undefined");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = A_with_self(i, evaluator) / column_sum;
      acc += std::abs(c - target) / target;
    }
    return acc / static_cast<double>(n);
  }

  double acc = 0.0;
  std::size_t compared = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s[i] > 0.0)) continue;  // relative error is undefined against a zero share
    const double c = A_with_self(i, evaluator) / column_sum;
    acc += std::abs(c - s[i]) / s[i];
    ++compared;
  }
  if (compared == 0) {
    throw PeerEvalError(ErrorCode::NoComparableEntries, "every share is zero");
  }
  return acc / static_cast<double>(compared);
}

std::vector<StudentScore> compose_final_scores(const ContributionVector& s,
                                               const std::vector<double>& report_grades,
                                               const std::vector<double>& eval_errors,
                                               const ScoreWeights& weights) {
  const std::size_t n = s.size();
  if (report_grades.size() != n || eval_errors.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch,
                        "shares, grades, and error vectors must have equal length");
  }
  std::vector<StudentScore> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eval_errors[i] >= 0.0)) {
      throw PeerEvalError(ErrorCode::InvalidValue, "evaluation error must be nonnegative");
    }
    if (!(report_grades[i] >= 0.0) || report_grades[i] > 1.0) {
      throw PeerEvalError(ErrorCode::InvalidValue, "report grade must lie in [0, 1]");
    }
    const double consistency = 1.0 - std::min(1.0, eval_errors[i]);
    out[i].mechanism_share = s[i];
    out[i].report_grade = report_grades[i];
    out[i].eval_error = eval_errors[i];
    out[i].final_score = weights.mechanism_weight() * s[i] +
                         weights.report_weight() * report_grades[i] +
                         weights.consistency_weight() * consistency;
  }
  return out;
}

}  // namespace peereval
