#pragma once

#include <cstdint>
#include <vector>

#include "peereval/mechanisms.hpp"
#include "peereval/scoring.hpp"
#include "peereval/types.hpp"

namespace peereval {

struct TrialResult {
  std::uint64_t seed = 0;
  std::size_t team_size = 0;
  bool passed = false;
  double max_deviation = 0.0;
  std::vector<double> truth;
  std::vector<double> output;
};

/// One randomized accuracy check of the weighted ratio mechanism: draws true
/// shares from the simplex interior, positive instructor weights, builds the
/// truthful matrix, rescales every column by a random positive factor, and
/// compares mechanism output to the truth at 1e-9 per entry. Failure is a
/// diagnostic, not an exception.
TrialResult accuracy_trial(std::size_t team_size, std::uint64_t seed);

struct TrialSummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_deviation = 0.0;
  std::vector<TrialResult> failed;  // first few failures, for diagnostics
};

/// Runs `count` trials with team sizes cycling through [min_team, max_team],
/// per-trial seeds drawn from `seed`.
TrialSummary run_accuracy_trials(std::size_t count, std::size_t min_team,
                                 std::size_t max_team, std::uint64_t seed);

enum class Objective { MechanismShare, FinalScore };

std::string_view to_string(Objective objective) noexcept;

struct ManipulationOptions {
  MechanismKind mechanism = MechanismKind::AuxiliaryWeighted;
  Objective objective = Objective::MechanismShare;
  unsigned resolution = 60;
  ScoreWeights score_weights{};  // FinalScore objective only
};

struct ManipulationResult {
  std::size_t manipulator = 0;
  double honest_share = 0.0;  // objective value of the truthful report
  double best_share = 0.0;    // objective value of the best report found
  std::vector<double> best_report;  // full reported column, normalized to sum 1
  double gain = 0.0;          // best_share - honest_share, >= 0
  unsigned grid_resolution = 0;
  std::size_t points_evaluated = 0;
  std::size_t points_skipped = 0;  // grid points where the mechanism was undefined
};

/// Best response search for one deviating student while everyone else
/// reports truthfully and the instructor trusts all reports equally. The
/// deviator's column is enumerated over a simplex grid (the ratio
/// construction is scale-free per column, so the grid covers all reports up
/// to the stated resolution). The truthful report is always evaluated as a
/// candidate, so gain is never negative.
ManipulationResult manipulation_search(const ContributionVector& t, std::size_t manipulator,
                                       const ManipulationOptions& options);

struct IncentiveReport {
  ScoreWeights weights;
  unsigned resolution = 0;
  std::vector<ManipulationResult> per_student;
};

/// Runs the best-response search with the final-score objective for every
/// student in turn. Evidence for weight sweeps; asserts nothing.
IncentiveReport incentive_experiment(const ContributionVector& t, const ScoreWeights& weights,
                                     unsigned resolution);

}  // namespace peereval
