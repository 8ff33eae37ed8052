#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "peereval/types.hpp"

namespace peereval {

enum class MechanismKind { PieToAll, PieToOthers, AuxiliaryWeighted };

std::string_view to_string(MechanismKind kind) noexcept;
std::optional<MechanismKind> mechanism_from_string(std::string_view name) noexcept;

/// Each student splits one unit of credit across the whole team, self
/// included; shares are row averages of the column-normalized matrix.
/// Accurate, but rewards inflated self-evaluation.
ContributionVector pie_to_all(const EvaluationMatrix& A);

/// Same split, self excluded (zero diagonal required). Immune to
/// self-inflation but not accurate.
ContributionVector pie_to_others(const EvaluationMatrix& A);

/// Builds the matrix of pairwise contribution ratios. Entry (i, j) is the
/// instructor-weight-averaged ratio of i's to j's contribution as judged by
/// every evaluator other than i and j. Evaluators with zero weight or no
/// opinion on the pair contribute nothing; a pair nobody can compare is
/// undefined. Pass all-ones weights for the unweighted variant.
AuxiliaryMatrix auxiliary_matrix(const EvaluationMatrix& A, const InstructorWeights& w);
AuxiliaryMatrix auxiliary_matrix(const EvaluationMatrix& A);

/// Shares from a ratio matrix: every column without infinite or undefined
/// entries is normalized by its sum, qualifying columns are averaged
/// element-wise.
ContributionVector column_average_shares(const AuxiliaryMatrix& B);

enum class SelfEvaluation { Zero, Truthful };

/// Evaluation matrix produced when everyone reports the true shares t:
/// entry (i, j) is t_i / (1 - t_j), so each reported column is proportional
/// to t off its own row. The diagonal is zero, or the truthful self share
/// when requested.
EvaluationMatrix truthful_matrix(const ContributionVector& t,
                                 SelfEvaluation self = SelfEvaluation::Zero);

/// Dispatch facade; AuxiliaryWeighted composes auxiliary_matrix with
/// column_average_shares.
ContributionVector run_mechanism(MechanismKind kind, const EvaluationMatrix& A,
                                 const InstructorWeights& w);

/// Number of students whose reports the instructor trusts (positive weight)
/// and who scored every teammate. The accuracy guarantee of the weighted
/// ratio mechanism assumes at least three.
std::size_t count_credible_evaluators(const EvaluationMatrix& A, const InstructorWeights& w);

}  // namespace peereval
