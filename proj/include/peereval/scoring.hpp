#pragma once

#include <vector>

#include "peereval/types.hpp"

namespace peereval {

/// Final-score composition weights: mechanism share, instructor report
/// grade, evaluation consistency. Nonnegative, sum to one.
class ScoreWeights {
 public:
  ScoreWeights() : ScoreWeights(0.9, 0.05, 0.05) {}
  ScoreWeights(double mechanism, double report, double consistency);

  double mechanism_weight() const noexcept { return mechanism_; }
  double report_weight() const noexcept { return report_; }
  double consistency_weight() const noexcept { return consistency_; }

  bool operator==(const ScoreWeights& other) const = default;

 private:
  double mechanism_;
  double report_;
  double consistency_;
};

enum class ErrorFormula {
  // Compare entry i of the normalized column against share s_i; average over
  // entries with s_i > 0. Zero exactly when the column reproduces s.
  PerEntry,
  // Compatibility variant: compare every entry against the single scalar
  // s_j and divide by n, kept for audit.
  AsPrinted,
};

/// Mean relative deviation of evaluator j's normalized reported column from
/// the perceived shares s. The column should include j's self-evaluation.
double evaluation_error(const EvaluationMatrix& A_with_self, const ContributionVector& s,
                        std::size_t evaluator,
                        ErrorFormula formula = ErrorFormula::PerEntry);

struct StudentScore {
  double mechanism_share = 0.0;
  double report_grade = 0.0;  // normalized to [0, 1]
  double eval_error = 0.0;
  double final_score = 0.0;
};

/// final = wm * share + wr * grade + wc * (1 - min(1, error)), per student.
std::vector<StudentScore> compose_final_scores(const ContributionVector& s,
                                               const std::vector<double>& report_grades,
                                               const std::vector<double>& eval_errors,
                                               const ScoreWeights& weights);

}  // namespace peereval
