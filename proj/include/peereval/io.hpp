#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "peereval/mechanisms.hpp"
#include "peereval/scoring.hpp"
#include "peereval/types.hpp"

namespace peereval {

struct Student {
  std::string id;
  std::string name;
};

/// Ordered student list; file order defines matrix index order.
class Roster {
 public:
  explicit Roster(std::vector<Student> students);

  std::size_t size() const noexcept { return students_.size(); }
  const Student& at(std::size_t i) const { return students_.at(i); }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<Student> students_;
};

enum class OutputFormat { Json, Csv, Text };

std::optional<OutputFormat> format_from_string(std::string_view name) noexcept;

struct RunConfig {
  MechanismKind mechanism = MechanismKind::AuxiliaryWeighted;
  ScoreWeights score_weights{};
  double max_report_grade = 0.0;  // 0: infer from the loaded grades
  unsigned grid_resolution = 60;
  OutputFormat format = OutputFormat::Json;
  ErrorFormula error_formula = ErrorFormula::PerEntry;
};

Roster load_roster(const std::filesystem::path& path);

struct LoadedEvaluations {
  EvaluationMatrix matrix;
  std::set<std::size_t> missing;  // students with no evaluator rows at all
};

/// Long-form CSV `evaluator,evaluatee,score`. Cells absent from the file stay
/// zero; students with no rows at all land in `missing`.
LoadedEvaluations load_evaluations(const std::filesystem::path& path, const Roster& roster);

/// CSV `id,grade`. Every roster id must appear unless `default_missing_to_zero`.
InstructorWeights load_instructor_grades(const std::filesystem::path& path, const Roster& roster,
                                         bool default_missing_to_zero = false);

struct ComputeResult {
  MechanismKind mechanism = MechanismKind::AuxiliaryWeighted;
  ScoreWeights weights;
  double max_report_grade = 1.0;
  std::vector<std::size_t> imputed;
  EvaluationMatrix evaluations;  // post-imputation, as consumed
  std::optional<AuxiliaryMatrix> auxiliary;
  std::vector<bool> qualifying_columns;
  ContributionVector shares;
  std::vector<double> raw_grades;
  std::vector<double> normalized_grades;
  std::vector<double> eval_errors;
  std::vector<StudentScore> scores;
  std::vector<std::string> notes;
};

/// Full pipeline: imputation, mechanism, evaluation errors, composition.
ComputeResult run_compute(const Roster& roster, const LoadedEvaluations& loaded,
                          const InstructorWeights& grades, const RunConfig& config);

nlohmann::ordered_json report_to_json(const Roster& roster, const ComputeResult& result);
std::string report_to_csv(const Roster& roster, const ComputeResult& result);
std::string report_to_text(const Roster& roster, const ComputeResult& result);

/// Reads the evaluation matrix back out of a JSON report.
EvaluationMatrix matrix_from_report(const nlohmann::json& report);

/// Runs the sections present in a scenario document (accuracy trials,
/// manipulation search, incentive sweep) and returns the combined report.
nlohmann::ordered_json run_scenario(const nlohmann::json& scenario);

nlohmann::json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

/// Rounds through "%.12g" so reported values carry 12 significant digits.
double round_to_12_digits(double value) noexcept;
std::string format_12_digits(double value);

}  // namespace peereval
