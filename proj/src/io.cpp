#include "peereval/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "peereval/core.hpp"
#include "peereval/simlab.hpp"

namespace peereval {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s:%zu: %s", path.string().c_str(), line, what.c_str());
  throw PeerEvalError(ErrorCode::ParseError, buf);
}

double parse_number(const std::filesystem::path& path, std::size_t line, const std::string& text) {
  const std::string trimmed = trim(text);
  if (trimmed.empty()) parse_fail(path, line, "empty numeric field");
  char* end = nullptr;
  const double value = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || std::isnan(value)) {
    parse_fail(path, line, "not a number: '" + trimmed + "'");
  }
  return value;
}

// Lines of the file with 1-based numbers, trailing CR stripped, blanks kept
// out of the way.
std::vector<std::pair<std::size_t, std::string>> read_csv_lines(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw PeerEvalError(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.emplace_back(number, line);
  }
  if (lines.empty()) {
    throw PeerEvalError(ErrorCode::ParseError, path.string() + ": file has no header row");
  }
  return lines;
}

std::size_t resolve_student(const Roster& roster, const std::string& id,
                            const std::filesystem::path& path, std::size_t line) {
  if (auto index = roster.index_of(id)) return *index;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s:%zu: unknown student '%s'", path.string().c_str(), line,
                id.c_str());
  throw PeerEvalError(ErrorCode::UnknownStudent, buf);
}

}  // namespace

Roster::Roster(std::vector<Student> students) : students_(std::move(students)) {
  if (students_.empty()) {
    throw PeerEvalError(ErrorCode::InvalidValue, "roster is empty");
  }
  for (std::size_t i = 0; i < students_.size(); ++i) {
    if (students_[i].id.empty()) {
      throw PeerEvalError(ErrorCode::InvalidValue, "roster contains an empty student id");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (students_[j].id == students_[i].id) {
        throw PeerEvalError(ErrorCode::InvalidValue,
                            "duplicate student id '" + students_[i].id + "'");
      }
    }
  }
}

std::optional<std::size_t> Roster::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < students_.size(); ++i) {
    if (students_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<OutputFormat> format_from_string(std::string_view name) noexcept {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "text") return OutputFormat::Text;
  return std::nullopt;
}

Roster load_roster(const std::filesystem::path& path) {
  const auto lines = read_csv_lines(path);
  const auto header = split_fields(lines.front().second);
  if (header.empty() || header[0] != "id") {
    parse_fail(path, lines.front().first, "roster header must start with 'id'");
  }
  std::vector<Student> students;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split_fields(lines[row].second);
    if (fields.empty() || fields[0].empty()) {
      parse_fail(path, lines[row].first, "missing student id");
    }
    Student student;
    student.id = fields[0];
    student.name = fields.size() > 1 && !fields[1].empty() ? fields[1] : fields[0];
    students.push_back(std::move(student));
  }
  try {
    return Roster(std::move(students));
  } catch (const PeerEvalError& e) {
    throw PeerEvalError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

LoadedEvaluations load_evaluations(const std::filesystem::path& path, const Roster& roster) {
  const auto lines = read_csv_lines(path);
  const auto header = split_fields(lines.front().second);
  if (header.size() < 3 || header[0] != "evaluator" || header[1] != "evaluatee" ||
      header[2] != "score") {
    parse_fail(path, lines.front().first, "expected header 'evaluator,evaluatee,score'");
  }

  const std::size_t n = roster.size();
  EvaluationMatrix matrix(n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::set<std::size_t> evaluators_present;

  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::size_t line = lines[row].first;
    const auto fields = split_fields(lines[row].second);
    if (fields.size() < 3) parse_fail(path, line, "expected 3 fields");
    const std::size_t evaluator = resolve_student(roster, fields[0], path, line);
    const std::size_t evaluatee = resolve_student(roster, fields[1], path, line);
    const double score = parse_number(path, line, fields[2]);
    if (score < 0.0) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s:%zu: negative score for '%s' by '%s'",
                    path.string().c_str(), line, fields[1].c_str(), fields[0].c_str());
      throw PeerEvalError(ErrorCode::NegativeScore, buf);
    }
    if (!seen.insert({evaluatee, evaluator}).second) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s:%zu: duplicate evaluation of '%s' by '%s'",
                    path.string().c_str(), line, fields[1].c_str(), fields[0].c_str());
      throw PeerEvalError(ErrorCode::DuplicateCell, buf);
    }
    matrix(evaluatee, evaluator) = score;
    evaluators_present.insert(evaluator);
  }

  LoadedEvaluations out{std::move(matrix), {}};
  for (std::size_t j = 0; j < n; ++j) {
    if (!evaluators_present.count(j)) {
      out.missing.insert(j);
      out.matrix.set_submitted(j, false);
    }
  }
  return out;
}

InstructorWeights load_instructor_grades(const std::filesystem::path& path, const Roster& roster,
                                         bool default_missing_to_zero) {
  const auto lines = read_csv_lines(path);
  const auto header = split_fields(lines.front().second);
  if (header.size() < 2 || header[0] != "id" || header[1] != "grade") {
    parse_fail(path, lines.front().first, "expected header 'id,grade'");
  }
  std::vector<double> grades(roster.size(), 0.0);
  std::vector<bool> present(roster.size(), false);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::size_t line = lines[row].first;
    const auto fields = split_fields(lines[row].second);
    if (fields.size() < 2) parse_fail(path, line, "expected 2 fields");
    const std::size_t index = resolve_student(roster, fields[0], path, line);
    if (present[index]) parse_fail(path, line, "duplicate grade for '" + fields[0] + "'");
    const double grade = parse_number(path, line, fields[1]);
    if (grade < 0.0) parse_fail(path, line, "negative grade for '" + fields[0] + "'");
    grades[index] = grade;
    present[index] = true;
  }
  if (!default_missing_to_zero) {
    for (std::size_t i = 0; i < roster.size(); ++i) {
      if (!present[i]) {
        throw PeerEvalError(ErrorCode::ParseError,
                            path.string() + ": no grade for '" + roster.at(i).id + "'");
      }
    }
  }
  return InstructorWeights(std::move(grades));
}

double round_to_12_digits(double value) noexcept {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return std::strtod(buf, nullptr);
}

std::string format_12_digits(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

ComputeResult run_compute(const Roster& roster, const LoadedEvaluations& loaded,
                          const InstructorWeights& grades, const RunConfig& config) {
  const std::size_t n = roster.size();
  if (loaded.matrix.size() != n || grades.size() != n) {
    throw PeerEvalError(ErrorCode::LengthMismatch, "roster, evaluations, and grades disagree");
  }

  ImputationResult imputed = impute_missing(loaded.matrix, loaded.missing, grades);
  validate_matrix(imputed.evaluations, false);

  // Self-evaluations feed only the consistency metric; every mechanism other
  // than pie-to-all discards them before computing shares.
  EvaluationMatrix mechanism_input = imputed.evaluations;
  if (config.mechanism != MechanismKind::PieToAll) {
    for (std::size_t i = 0; i < n; ++i) mechanism_input(i, i) = 0.0;
  }

  std::optional<AuxiliaryMatrix> auxiliary;
  std::vector<bool> qualifying;
  std::vector<std::string> notes;
  std::optional<ContributionVector> shares;
  if (config.mechanism == MechanismKind::AuxiliaryWeighted) {
    AuxiliaryMatrix B = auxiliary_matrix(mechanism_input, imputed.weights);
    qualifying.resize(n);
    for (std::size_t j = 0; j < n; ++j) qualifying[j] = B.column_all_finite(j);
    shares = column_average_shares(B);
    auxiliary = std::move(B);
    const std::size_t credible = count_credible_evaluators(mechanism_input, imputed.weights);
    if (credible < 3) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "only %zu evaluator(s) scored every teammate and hold a positive "
                    "instructor grade; accuracy is guaranteed from 3",
                    credible);
      notes.emplace_back(buf);
    }
  } else {
    shares = run_mechanism(config.mechanism, mechanism_input, imputed.weights);
  }

  std::vector<double> eval_errors(n);
  for (std::size_t j = 0; j < n; ++j) {
    eval_errors[j] = evaluation_error(imputed.evaluations, *shares, j, config.error_formula);
  }

  // Post-imputation grades: a silent student's report grade is zero.
  std::vector<double> raw_grades = imputed.weights.values();
  double max_grade = config.max_report_grade;
  if (max_grade <= 0.0) {
    max_grade = *std::max_element(raw_grades.begin(), raw_grades.end());
    if (max_grade <= 0.0) max_grade = 1.0;
  }
  std::vector<double> normalized_grades(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw_grades[i] > max_grade) {
      throw PeerEvalError(ErrorCode::InvalidValue,
                          "grade for '" + roster.at(i).id + "' exceeds the declared maximum");
    }
    normalized_grades[i] = raw_grades[i] / max_grade;
  }

  std::vector<StudentScore> scores =
      compose_final_scores(*shares, normalized_grades, eval_errors, config.score_weights);

  return ComputeResult{config.mechanism,
                       config.score_weights,
                       max_grade,
                       std::vector<std::size_t>(loaded.missing.begin(), loaded.missing.end()),
                       std::move(imputed.evaluations),
                       std::move(auxiliary),
                       std::move(qualifying),
                       std::move(*shares),
                       std::move(raw_grades),
                       std::move(normalized_grades),
                       std::move(eval_errors),
                       std::move(scores),
                       std::move(notes)};
}

namespace {

nlohmann::ordered_json ratio_to_json(const ExtendedRatio& r) {
  if (r.is_undefined()) return "undefined";
  if (r.is_infinite()) return "inf";
  return round_to_12_digits(r.value());
}

nlohmann::ordered_json matrix_to_json(const EvaluationMatrix& m, bool rounded) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.size(); ++j) {
      row.push_back(rounded ? round_to_12_digits(m(i, j)) : m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Column-stochastic view for the report; all-zero columns are left as-is
// rather than failing a purely informational section.
EvaluationMatrix lenient_normalize(const EvaluationMatrix& m) {
  EvaluationMatrix out = m;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double sum = m.column_sum(j);
    if (!(sum > 0.0) || sum == 1.0) continue;
    for (std::size_t i = 0; i < m.size(); ++i) out(i, j) = m(i, j) / sum;
  }
  return out;
}

}  // namespace

nlohmann::ordered_json report_to_json(const Roster& roster, const ComputeResult& result) {
  nlohmann::ordered_json report;
  report["mechanism"] = std::string(to_string(result.mechanism));
  report["team_size"] = roster.size();
  report["score_weights"] = {{"mechanism", result.weights.mechanism_weight()},
                             {"report", result.weights.report_weight()},
                             {"consistency", result.weights.consistency_weight()}};
  report["max_report_grade"] = result.max_report_grade;

  nlohmann::ordered_json imputed = nlohmann::ordered_json::array();
  for (std::size_t j : result.imputed) imputed.push_back(roster.at(j).id);
  report["imputed_students"] = std::move(imputed);

  nlohmann::ordered_json students = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < roster.size(); ++i) {
    nlohmann::ordered_json row;
    row["id"] = roster.at(i).id;
    row["name"] = roster.at(i).name;
    row["imputed"] = !result.evaluations.submitted(i);
    row["mechanism_share"] = round_to_12_digits(result.scores[i].mechanism_share);
    row["report_grade_raw"] = result.raw_grades[i];
    row["report_grade"] = round_to_12_digits(result.scores[i].report_grade);
    row["eval_error"] = round_to_12_digits(result.scores[i].eval_error);
    row["final_score"] = round_to_12_digits(result.scores[i].final_score);
    students.push_back(std::move(row));
  }
  report["students"] = std::move(students);

  // Inputs are echoed at full precision so a report can be reloaded exactly.
  report["evaluations"] = matrix_to_json(result.evaluations, false);
  report["column_normalized"] = matrix_to_json(lenient_normalize(result.evaluations), true);

  if (result.auxiliary) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < result.auxiliary->size(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < result.auxiliary->size(); ++j) {
        row.push_back(ratio_to_json(result.auxiliary->at(i, j)));
      }
      rows.push_back(std::move(row));
    }
    report["auxiliary_matrix"] = std::move(rows);
    report["qualifying_columns"] = result.qualifying_columns;
  }

  report["notes"] = result.notes;
  return report;
}

std::string report_to_csv(const Roster& roster, const ComputeResult& result) {
  std::string out = "id,final_score\n";
  for (std::size_t i = 0; i < roster.size(); ++i) {
    out += roster.at(i).id;
    out += ',';
    out += format_12_digits(result.scores[i].final_score);
    out += '\n';
  }
  return out;
}

std::string report_to_text(const Roster& roster, const ComputeResult& result) {
  std::ostringstream out;
  out << "mechanism: " << to_string(result.mechanism) << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-12s %-16s %-14s %-14s %-14s\n", "student", "share",
                "report_grade", "eval_error", "final_score");
  out << line;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    std::snprintf(line, sizeof line, "%-12s %-16s %-14s %-14s %-14s%s\n",
                  roster.at(i).id.c_str(),
                  format_12_digits(result.scores[i].mechanism_share).c_str(),
                  format_12_digits(result.scores[i].report_grade).c_str(),
                  format_12_digits(result.scores[i].eval_error).c_str(),
                  format_12_digits(result.scores[i].final_score).c_str(),
                  result.evaluations.submitted(i) ? "" : "  [imputed]");
    out << line;
  }
  if (result.auxiliary) {
    out << "auxiliary matrix:\n";
    for (std::size_t i = 0; i < result.auxiliary->size(); ++i) {
      out << " ";
      for (std::size_t j = 0; j < result.auxiliary->size(); ++j) {
        const ExtendedRatio& r = result.auxiliary->at(i, j);
        out << " "
            << (r.is_undefined() ? std::string("undefined")
                : r.is_infinite() ? std::string("inf")
                                  : format_12_digits(r.value()));
      }
      out << "\n";
    }
  }
  for (const std::string& note : result.notes) out << "note: " << note << "\n";
  return out.str();
}

EvaluationMatrix matrix_from_report(const nlohmann::json& report) {
  const auto& rows = report.at("evaluations");
  EvaluationMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw PeerEvalError(ErrorCode::ParseError, "report matrix is not square");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  if (report.contains("imputed_students") && report.contains("students")) {
    for (std::size_t i = 0; i < report.at("students").size(); ++i) {
      if (report.at("students")[i].value("imputed", false)) m.set_submitted(i, false);
    }
  }
  return m;
}

namespace {

ContributionVector shares_from_json(const nlohmann::json& values) {
  return ContributionVector(values.get<std::vector<double>>());
}

nlohmann::ordered_json manipulation_to_json(const ManipulationResult& r) {
  nlohmann::ordered_json out;
  out["manipulator"] = r.manipulator + 1;  // 1-based in files
  out["resolution"] = r.grid_resolution;
  out["honest"] = round_to_12_digits(r.honest_share);
  out["best"] = round_to_12_digits(r.best_share);
  out["gain"] = round_to_12_digits(r.gain);
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (double v : r.best_report) report.push_back(round_to_12_digits(v));
  out["best_report"] = std::move(report);
  out["points_evaluated"] = r.points_evaluated;
  out["points_skipped"] = r.points_skipped;
  return out;
}

}  // namespace

nlohmann::ordered_json run_scenario(const nlohmann::json& scenario) {
  nlohmann::ordered_json out;
  try {
    const std::uint64_t seed = scenario.value("seed", std::uint64_t{1});
    out["seed"] = seed;
    bool ran_anything = false;

    if (scenario.contains("accuracy")) {
      const auto& section = scenario.at("accuracy");
      const std::size_t trials = section.value("trials", std::size_t{1000});
      const std::size_t min_team = section.value("min_team", std::size_t{3});
      const std::size_t max_team = section.value("max_team", std::size_t{12});
      TrialSummary summary = run_accuracy_trials(trials, min_team, max_team, seed);
      nlohmann::ordered_json block;
      block["trials"] = summary.trials;
      block["min_team"] = min_team;
      block["max_team"] = max_team;
      block["failures"] = summary.failures;
      block["worst_deviation"] = round_to_12_digits(summary.worst_deviation);
      out["accuracy"] = std::move(block);
      ran_anything = true;
    }

    if (scenario.contains("manipulation")) {
      const auto& section = scenario.at("manipulation");
      ContributionVector t = shares_from_json(section.at("t"));
      const std::size_t manipulator = section.at("manipulator").get<std::size_t>();
      if (manipulator < 1 || manipulator > t.size()) {
        throw PeerEvalError(ErrorCode::InvalidIndex,
                            "manipulator must be a 1-based student number");
      }
      ManipulationOptions options;
      options.resolution = section.value("resolution", 60u);
      if (auto name = section.value("objective", std::string("mechanism_share"));
          name == "final_score") {
        options.objective = Objective::FinalScore;
      } else if (name != "mechanism_share") {
        throw PeerEvalError(ErrorCode::ParseError, "unknown objective '" + name + "'");
      }
      if (auto name = section.value("mechanism", std::string("auxiliary"));
          mechanism_from_string(name)) {
        options.mechanism = *mechanism_from_string(name);
      } else {
        throw PeerEvalError(ErrorCode::ParseError, "unknown mechanism '" + name + "'");
      }
      ManipulationResult result = manipulation_search(t, manipulator - 1, options);
      nlohmann::ordered_json block = manipulation_to_json(result);
      block["t"] = section.at("t");
      block["mechanism"] = std::string(to_string(options.mechanism));
      block["objective"] = std::string(to_string(options.objective));
      out["manipulation"] = std::move(block);
      ran_anything = true;
    }

    if (scenario.contains("incentive")) {
      const auto& section = scenario.at("incentive");
      ContributionVector t = shares_from_json(section.at("t"));
      const unsigned resolution = section.value("resolution", 60u);
      const double report_weight = section.value("report_weight", 0.05);
      std::vector<double> consistency_weights =
          section.value("consistency_weights", std::vector<double>{0.0, 0.05, 0.1, 0.2});
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (double c : consistency_weights) {
        ScoreWeights weights(1.0 - report_weight - c, report_weight, c);
        IncentiveReport report = incentive_experiment(t, weights, resolution);
        nlohmann::ordered_json row;
        row["mechanism_weight"] = round_to_12_digits(weights.mechanism_weight());
        row["report_weight"] = round_to_12_digits(weights.report_weight());
        row["consistency_weight"] = round_to_12_digits(weights.consistency_weight());
        nlohmann::ordered_json students = nlohmann::ordered_json::array();
        for (const ManipulationResult& r : report.per_student) {
          students.push_back(manipulation_to_json(r));
        }
        row["students"] = std::move(students);
        rows.push_back(std::move(row));
      }
      nlohmann::ordered_json block;
      block["t"] = section.at("t");
      block["resolution"] = resolution;
      block["rows"] = std::move(rows);
      out["incentive"] = std::move(block);
      ran_anything = true;
    }

    if (!ran_anything) {
      throw PeerEvalError(ErrorCode::ParseError,
                          "scenario has none of 'accuracy', 'manipulation', 'incentive'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw PeerEvalError(ErrorCode::ParseError, std::string("scenario: ") + e.what());
  }
  return out;
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw PeerEvalError(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PeerEvalError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw PeerEvalError(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  }
  out << contents;
  out.flush();
  if (!out) {
    throw PeerEvalError(ErrorCode::IoFailure, "failed writing " + path.string());
  }
}

}  // namespace peereval
