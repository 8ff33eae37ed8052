#include "peereval/mechanisms.hpp"

#include <cstdio>

#include "peereval/core.hpp"

namespace peereval {

std::string_view to_string(MechanismKind kind) noexcept {
  switch (kind) {
    case MechanismKind::PieToAll: return "pie-to-all";
    case MechanismKind::PieToOthers: return "pie-to-others";
    case MechanismKind::AuxiliaryWeighted: return "auxiliary";
  }
  return "unknown";
}

std::optional<MechanismKind> mechanism_from_string(std::string_view name) noexcept {
  if (name == "pie-to-all") return MechanismKind::PieToAll;
  if (name == "pie-to-others") return MechanismKind::PieToOthers;
  if (name == "auxiliary") return MechanismKind::AuxiliaryWeighted;
  return std::nullopt;
}

namespace {

ContributionVector row_averages(const EvaluationMatrix& stochastic) {
  const std::size_t n = stochastic.size();
  std::vector<double> shares(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += stochastic(i, j);
    shares[i] = sum / static_cast<double>(n);
  }
  return ContributionVector(std::move(shares));
}

}  // namespace

ContributionVector pie_to_all(const EvaluationMatrix& A) {
  validate_matrix(A, false);
  return row_averages(normalize_columns(A));
}

ContributionVector pie_to_others(const EvaluationMatrix& A) {
  validate_matrix(A, true);
  return row_averages(normalize_columns(A));
}

AuxiliaryMatrix auxiliary_matrix(const EvaluationMatrix& A, const InstructorWeights& w) {
  const std::size_t n = A.size();
  if (n < 3) {
    throw PeerEvalError(ErrorCode::TeamTooSmall,
                        "pairwise ratios need a third student to judge each pair");
  }
  if (w.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch,
                        "instructor weights and evaluation matrix size differ");
  }
  validate_matrix(A, false);

  AuxiliaryMatrix B(n);
  bool any_defined_off_diagonal = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double numerator = 0.0;
      double denominator = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (w[k] <= 0.0) continue;
        const double a_ik = A(i, k);
        const double a_jk = A(j, k);
        const double combined = a_ik + a_jk;
        if (combined <= 0.0) continue;  // evaluator k has no opinion on this pair
        numerator += w[k] * a_ik / combined;
        denominator += w[k] * a_jk / combined;
      }
      ExtendedRatio b_ij = ExtendedRatio::from_fraction(numerator, denominator);
      B.set(i, j, b_ij);
      B.set(j, i, ExtendedRatio::from_fraction(denominator, numerator));
      if (!b_ij.is_undefined()) any_defined_off_diagonal = true;
    }
  }
  if (!any_defined_off_diagonal) {
    throw PeerEvalError(ErrorCode::NoInformedJudges,
                        "no pair of students has an evaluator with positive instructor weight "
                        "and a usable score for the pair");
  }
  return B;
}

AuxiliaryMatrix auxiliary_matrix(const EvaluationMatrix& A) {
  return auxiliary_matrix(A, InstructorWeights::all_ones(A.size()));
}

ContributionVector column_average_shares(const AuxiliaryMatrix& B) {
  const std::size_t n = B.size();
  std::vector<double> acc(n, 0.0);
  std::size_t qualifying = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!B.column_all_finite(j)) continue;
    double column_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) column_sum += B.at(i, j).value();
    for (std::size_t i = 0; i < n; ++i) acc[i] += B.at(i, j).value() / column_sum;
    ++qualifying;
  }
  if (qualifying == 0) {
    throw PeerEvalError(ErrorCode::NoValidColumns,
                        "every ratio column contains an infinite or undefined entry");
  }
  for (double& v : acc) v /= static_cast<double>(qualifying);
  return ContributionVector(std::move(acc));
}

EvaluationMatrix truthful_matrix(const ContributionVector& t, SelfEvaluation self) {
  const std::size_t n = t.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (1.0 - t[j] <= 0.0) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "student %zu holds the entire contribution", j);
      throw PeerEvalError(ErrorCode::DegenerateTruth, buf);
    }
  }
  EvaluationMatrix A(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double remainder = 1.0 - t[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) {
        A(i, j) = self == SelfEvaluation::Truthful ? t[j] / remainder : 0.0;
      } else {
        A(i, j) = t[i] / remainder;
      }
    }
  }
  return A;
}

ContributionVector run_mechanism(MechanismKind kind, const EvaluationMatrix& A,
                                 const InstructorWeights& w) {
  switch (kind) {
    case MechanismKind::PieToAll:
      return pie_to_all(A);
    case MechanismKind::PieToOthers:
      return pie_to_others(A);
    case MechanismKind::AuxiliaryWeighted:
      return column_average_shares(auxiliary_matrix(A, w));
  }
  throw PeerEvalError(ErrorCode::InvalidValue, "unknown mechanism");
}

std::size_t count_credible_evaluators(const EvaluationMatrix& A, const InstructorWeights& w) {
  const std::size_t n = A.size();
  if (w.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch,
                        "instructor weights and evaluation matrix size differ");
  }
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] <= 0.0) continue;
    bool scored_everyone = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k && !(A(i, k) > 0.0)) {
        scored_everyone = false;
        break;
      }
    }
    if (scored_everyone) ++count;
  }
  return count;
}

}  // namespace peereval
