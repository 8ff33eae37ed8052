#include "peereval/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace peereval {

namespace {

constexpr double kAccuracyTolerance = 1e-9;
constexpr double kInteriorFloor = 1e-3;

// Uniform in [0, 1) from the top 53 bits; keeps trial streams identical
// across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_positive(std::mt19937_64& rng) { return 1.0 - uniform01(rng); }  // (0, 1]

// Uniform on the simplex via normalized exponentials, rejecting draws with
// any share below the floor so ratios stay well away from degeneracy.
std::vector<double> interior_simplex_point(std::mt19937_64& rng, std::size_t n) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> draw(n);
    double sum = 0.0;
    for (double& v : draw) {
      v = -std::log1p(-uniform01(rng));
      sum += v;
    }
    bool interior = true;
    for (double& v : draw) {
      v /= sum;
      if (v < kInteriorFloor) interior = false;
    }
    if (interior) return draw;
  }
  throw PeerEvalError(ErrorCode::InvalidValue, "simplex sampling failed to stay interior");
}

// Random positive factor in [1/4, 4], log-uniform.
double column_scale(std::mt19937_64& rng) {
  return std::exp((2.0 * uniform01(rng) - 1.0) * std::log(4.0));
}

// Visits every way to split `total` units across `cells` slots, in
// lexicographic order.
template <typename Fn>
void for_each_composition(unsigned total, std::size_t cells, std::vector<unsigned>& buf,
                          std::size_t cell, Fn&& fn) {
  if (cell + 1 == cells) {
    buf[cell] = total;
    fn(buf);
    return;
  }
  for (unsigned g = 0; g <= total; ++g) {
    buf[cell] = g;
    for_each_composition(total - g, cells, buf, cell + 1, fn);
  }
}

template <typename Fn>
void for_each_composition(unsigned total, std::size_t cells, Fn&& fn) {
  std::vector<unsigned> buf(cells, 0);
  for_each_composition(total, cells, buf, 0, std::forward<Fn>(fn));
}

}  // namespace

std::string_view to_string(Objective objective) noexcept {
  return objective == Objective::MechanismShare ? "mechanism_share" : "final_score";
}

TrialResult accuracy_trial(std::size_t team_size, std::uint64_t seed) {
  if (team_size < 3) {
    throw PeerEvalError(ErrorCode::TeamTooSmall, "accuracy trials need at least three students");
  }
  std::mt19937_64 rng(seed);
  ContributionVector truth(interior_simplex_point(rng, team_size));

  std::vector<double> weights(team_size);
  for (double& w : weights) w = uniform_positive(rng);

  EvaluationMatrix A = truthful_matrix(truth);
  for (std::size_t j = 0; j < team_size; ++j) {
    const double factor = column_scale(rng);
    for (std::size_t i = 0; i < team_size; ++i) A(i, j) *= factor;
  }

  ContributionVector shares =
      run_mechanism(MechanismKind::AuxiliaryWeighted, A, InstructorWeights(weights));

  double max_deviation = 0.0;
  for (std::size_t i = 0; i < team_size; ++i) {
    max_deviation = std::max(max_deviation, std::abs(shares[i] - truth[i]));
  }
  TrialResult result;
  result.seed = seed;
  result.team_size = team_size;
  result.max_deviation = max_deviation;
  result.passed = max_deviation < kAccuracyTolerance;
  result.truth = truth.values();
  result.output = shares.values();
  return result;
}

TrialSummary run_accuracy_trials(std::size_t count, std::size_t min_team, std::size_t max_team,
                                 std::uint64_t seed) {
  if (min_team < 3 || max_team < min_team) {
    throw PeerEvalError(ErrorCode::InvalidValue, "team size range must satisfy 3 <= min <= max");
  }
  std::mt19937_64 seeder(seed);
  TrialSummary summary;
  const std::size_t span = max_team - min_team + 1;
  for (std::size_t trial = 0; trial < count; ++trial) {
    const std::size_t team = min_team + trial % span;
    TrialResult result = accuracy_trial(team, seeder());
    ++summary.trials;
    summary.worst_deviation = std::max(summary.worst_deviation, result.max_deviation);
    if (!result.passed) {
      ++summary.failures;
      if (summary.failed.size() < 10) summary.failed.push_back(std::move(result));
    }
  }
  return summary;
}

namespace {

struct SearchContext {
  const ManipulationOptions& options;
  std::size_t manipulator;
  EvaluationMatrix base;       // everyone truthful
  InstructorWeights weights;   // all ones: equally trusted reports
};

// Objective value for one candidate column, or nothing when the mechanism
// cannot score that report.
std::optional<double> evaluate_report(const SearchContext& ctx, const std::vector<double>& column) {
  EvaluationMatrix A = ctx.base;
  for (std::size_t i = 0; i < A.size(); ++i) A(i, ctx.manipulator) = column[i];
  ContributionVector shares = run_mechanism(ctx.options.mechanism, A, ctx.weights);
  if (ctx.options.objective == Objective::MechanismShare) {
    return shares[ctx.manipulator];
  }
  const ScoreWeights& w = ctx.options.score_weights;
  const double error = evaluation_error(A, shares, ctx.manipulator);
  const double consistency = 1.0 - std::min(1.0, error);
  // Instructor grades are all equal here, so the normalized report grade is 1.
  return w.mechanism_weight() * shares[ctx.manipulator] + w.report_weight() * 1.0 +
         w.consistency_weight() * consistency;
}

std::optional<double> try_evaluate(const SearchContext& ctx, const std::vector<double>& column) {
  try {
    return evaluate_report(ctx, column);
  } catch (const PeerEvalError&) {
    return std::nullopt;
  }
}

}  // namespace

ManipulationResult manipulation_search(const ContributionVector& t, std::size_t manipulator,
                                       const ManipulationOptions& options) {
  const std::size_t n = t.size();
  if (manipulator >= n) {
    throw PeerEvalError(ErrorCode::InvalidIndex, "manipulator index out of range");
  }
  if (options.resolution < n - 1) {
    throw PeerEvalError(ErrorCode::ResolutionTooCoarse,
                        "grid resolution must be at least the number of teammates");
  }

  const bool pie_to_all = options.mechanism == MechanismKind::PieToAll;
  // The deviator also controls a self entry whenever it can matter: always
  // for pie-to-all (it enters the share), and for the final-score objective
  // (it enters the consistency error) unless the mechanism pins it to zero.
  const bool search_self = pie_to_all || (options.objective == Objective::FinalScore &&
                                          options.mechanism != MechanismKind::PieToOthers);

  SearchContext ctx{options, manipulator,
                    truthful_matrix(t, pie_to_all ? SelfEvaluation::Truthful : SelfEvaluation::Zero),
                    InstructorWeights::all_ones(n)};

  // Truthful report, normalized to sum one. With a self entry that is t
  // itself; without, the true shares of the teammates.
  std::vector<double> honest(n, 0.0);
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == manipulator && !search_self) continue;
      honest[i] = t[i];
      sum += t[i];
    }
    for (double& v : honest) v /= sum;
  }
  std::optional<double> honest_value = try_evaluate(ctx, honest);
  if (!honest_value) {
    throw PeerEvalError(ErrorCode::InvalidValue,
                        "mechanism cannot score the truthful report for this input");
  }

  ManipulationResult result;
  result.manipulator = manipulator;
  result.grid_resolution = options.resolution;
  result.honest_share = *honest_value;
  result.best_share = *honest_value;
  result.best_report = honest;

  const unsigned r = options.resolution;
  const std::size_t teammates = n - 1;
  std::vector<double> candidate(n, 0.0);

  auto consider = [&](const std::vector<double>& column) {
    if (std::optional<double> value = try_evaluate(ctx, column)) {
      ++result.points_evaluated;
      if (*value > result.best_share) {
        result.best_share = *value;
        result.best_report = column;
      }
    } else {
      ++result.points_skipped;
    }
  };

  auto fill_teammates = [&](const std::vector<unsigned>& grid, double mass) {
    std::size_t cell = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == manipulator) continue;
      candidate[i] = mass * static_cast<double>(grid[cell++]) / static_cast<double>(r);
    }
  };

  if (!search_self) {
    candidate[manipulator] = 0.0;
    for_each_composition(r, teammates, [&](const std::vector<unsigned>& grid) {
      fill_teammates(grid, 1.0);
      consider(candidate);
    });
  } else {
    // Product grid: self share in steps of 1/r, remaining mass split across
    // teammates on the composition grid. The zero-self slice coincides with
    // the teammates-only search.
    for (unsigned self_units = 0; self_units <= r; ++self_units) {
      const double self_share = static_cast<double>(self_units) / static_cast<double>(r);
      candidate[manipulator] = self_share;
      if (self_units == r) {
        for (std::size_t i = 0; i < n; ++i) {
          if (i != manipulator) candidate[i] = 0.0;
        }
        consider(candidate);
        break;
      }
      for_each_composition(r, teammates, [&](const std::vector<unsigned>& grid) {
        fill_teammates(grid, 1.0 - self_share);
        consider(candidate);
      });
    }
  }

  result.gain = result.best_share - result.honest_share;
  return result;
}

IncentiveReport incentive_experiment(const ContributionVector& t, const ScoreWeights& weights,
                                     unsigned resolution) {
  IncentiveReport report;
  report.weights = weights;
  report.resolution = resolution;
  ManipulationOptions options;
  options.mechanism = MechanismKind::AuxiliaryWeighted;
  options.objective = Objective::FinalScore;
  options.resolution = resolution;
  options.score_weights = weights;
  for (std::size_t j = 0; j < t.size(); ++j) {
    report.per_student.push_back(manipulation_search(t, j, options));
  }
  return report;
}

}  // namespace peereval
