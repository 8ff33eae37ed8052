#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "peereval/io.hpp"
#include "test_helpers.hpp"

using namespace peereval;
using testutil::error_code_of;

namespace {

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<unsigned> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("peereval_test_" + std::to_string(std::random_device{}()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::filesystem::path file(const std::string& name, const std::string& contents) const {
    auto p = path / name;
    std::ofstream out(p);
    out << contents;
    return p;
  }
};

const char* kRoster = "id,name\nalice,Alice\nbob,Bob\ncarol,Carol\n";

// Raw scores behind true shares (0.2, 0.3, 0.5).
const char* kEvals =
    "evaluator,evaluatee,score\n"
    "alice,bob,3\n"
    "alice,carol,5\n"
    "bob,alice,2\n"
    "bob,carol,5\n"
    "carol,alice,2\n"
    "carol,bob,3\n";

const char* kGrades = "id,grade\nalice,1\nbob,1\ncarol,1\n";

}  // namespace

TEST_CASE("load_roster keeps file order and validates ids") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  REQUIRE(roster.size() == 3);
  CHECK(roster.at(0).id == "alice");
  CHECK(roster.at(2).name == "Carol");
  CHECK(roster.index_of("bob") == 1);
  CHECK_FALSE(roster.index_of("mallory").has_value());

  CHECK(error_code_of([&] { load_roster(dir.file("dup.csv", "id,name\nx,A\nx,B\n")); }) ==
        ErrorCode::ParseError);
  CHECK(error_code_of([&] { load_roster(dir.file("bad.csv", "student\nx\n")); }) ==
        ErrorCode::ParseError);
  CHECK(error_code_of([&] { load_roster(dir.path / "absent.csv"); }) == ErrorCode::IoFailure);
}

TEST_CASE("load_evaluations builds the matrix in roster order") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(dir.file("evals.csv", kEvals), roster);
  CHECK(loaded.missing.empty());
  auto expected = EvaluationMatrix::from_rows({{0, 2, 2}, {3, 0, 3}, {5, 5, 0}});
  CHECK(loaded.matrix == expected);
}

TEST_CASE("load_evaluations flags students with no rows as missing") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(
      dir.file("evals.csv",
               "evaluator,evaluatee,score\nalice,bob,3\nalice,carol,5\ncarol,alice,2\n"
               "carol,bob,3\n"),
      roster);
  CHECK(loaded.missing == std::set<std::size_t>{1});
  CHECK_FALSE(loaded.matrix.submitted(1));
  CHECK(loaded.matrix.submitted(0));
}

TEST_CASE("load_evaluations rejects bad cells") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  CHECK(error_code_of([&] {
          load_evaluations(
              dir.file("neg.csv", "evaluator,evaluatee,score\nalice,alice,-3\n"), roster);
        }) == ErrorCode::NegativeScore);
  CHECK(error_code_of([&] {
          load_evaluations(dir.file("dup.csv",
                                    "evaluator,evaluatee,score\nalice,bob,3\nalice,bob,4\n"),
                           roster);
        }) == ErrorCode::DuplicateCell);
  CHECK(error_code_of([&] {
          load_evaluations(dir.file("who.csv", "evaluator,evaluatee,score\neve,bob,3\n"),
                           roster);
        }) == ErrorCode::UnknownStudent);
  CHECK(error_code_of([&] {
          load_evaluations(dir.file("nan.csv", "evaluator,evaluatee,score\nalice,bob,abc\n"),
                           roster);
        }) == ErrorCode::ParseError);
}

TEST_CASE("load_instructor_grades resolves ids and validates values") {
  TempDir dir;
  auto roster =
      load_roster(dir.file("roster.csv", "id\ns1\ns2\ns3\ns4\n"));
  auto grades = load_instructor_grades(
      dir.file("grades.csv", "id,grade\ns1,4\ns2,0\ns3,1\ns4,3\n"), roster);
  CHECK(grades.values() == std::vector<double>{4, 0, 1, 3});

  CHECK(error_code_of([&] {
          load_instructor_grades(dir.file("neg.csv", "id,grade\ns1,-1\n"), roster);
        }) == ErrorCode::ParseError);
  CHECK(error_code_of([&] {
          load_instructor_grades(dir.file("partial.csv", "id,grade\ns1,4\n"), roster);
        }) == ErrorCode::ParseError);
  auto defaulted = load_instructor_grades(dir.file("partial2.csv", "id,grade\ns1,4\n"), roster,
                                          /*default_missing_to_zero=*/true);
  CHECK(defaulted.values() == std::vector<double>{4, 0, 0, 0});
}

TEST_CASE("run_compute reproduces the known shares end to end") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(dir.file("evals.csv", kEvals), roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);
  RunConfig config;
  auto result = run_compute(roster, loaded, grades, config);

  CHECK(std::abs(result.shares[0] - 0.2) < 1e-12);
  CHECK(std::abs(result.shares[1] - 0.3) < 1e-12);
  CHECK(std::abs(result.shares[2] - 0.5) < 1e-12);
  REQUIRE(result.auxiliary.has_value());
  CHECK(result.qualifying_columns == std::vector<bool>{true, true, true});
  CHECK(result.max_report_grade == 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.normalized_grades[i] == 1.0);
    CHECK(result.scores[i].final_score > 0.0);
  }
}

TEST_CASE("run_compute under pie-to-others matches the mispricing example") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(
      dir.file("evals.csv",
               "evaluator,evaluatee,score\n"
               "alice,bob,0.5\nalice,carol,0.5\n"
               "bob,alice,0.666666666666666667\nbob,carol,0.333333333333333333\n"
               "carol,alice,0.666666666666666667\ncarol,bob,0.333333333333333333\n"),
      roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);
  RunConfig config;
  config.mechanism = MechanismKind::PieToOthers;
  auto result = run_compute(roster, loaded, grades, config);
  CHECK(std::abs(result.shares[0] - 4.0 / 9) < 1e-12);
  CHECK(std::abs(result.shares[1] - 5.0 / 18) < 1e-12);
  CHECK(std::abs(result.shares[2] - 5.0 / 18) < 1e-12);
  CHECK_FALSE(result.auxiliary.has_value());
}

TEST_CASE("a silent student is imputed, discarded, and still priced") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  // carol never submitted; alice and bob report truthfully for shares
  // (0.2, 0.3, 0.5).
  auto loaded = load_evaluations(
      dir.file("evals.csv",
               "evaluator,evaluatee,score\n"
               "alice,bob,0.375\nalice,carol,0.625\n"
               "bob,alice,0.285714285714285714\nbob,carol,0.714285714285714286\n"),
      roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);
  RunConfig config;
  auto result = run_compute(roster, loaded, grades, config);

  CHECK(result.imputed == std::vector<std::size_t>{2});
  CHECK(std::abs(result.shares[0] - 0.2) < 1e-9);
  CHECK(std::abs(result.shares[1] - 0.3) < 1e-9);
  CHECK(std::abs(result.shares[2] - 0.5) < 1e-9);
  // Two credible evaluators is below the guarantee threshold.
  REQUIRE_FALSE(result.notes.empty());
  auto report = report_to_json(roster, result);
  CHECK(report["students"][2]["imputed"] == true);
  CHECK(report["students"][2]["report_grade"] == 0.0);
}

TEST_CASE("self-evaluations feed the consistency metric but never the shares") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  const std::string with_self = std::string(kEvals) +
                                "alice,alice,2\nbob,bob,3\ncarol,carol,5\n";
  auto plain = load_evaluations(dir.file("plain.csv", kEvals), roster);
  auto selfed = load_evaluations(dir.file("selfed.csv", with_self), roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);

  auto base = run_compute(roster, plain, grades, RunConfig{});
  auto result = run_compute(roster, selfed, grades, RunConfig{});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.shares[i] == base.shares[i]);
  }
  // Each student's self entry now matches their share exactly, so the
  // column reproduces s and the error vanishes.
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(result.eval_errors[j] < 1e-12);
    CHECK(result.eval_errors[j] < base.eval_errors[j]);
  }
}

TEST_CASE("a report written by the emitter reloads entrywise identical") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(dir.file("evals.csv", kEvals), roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);
  auto result = run_compute(roster, loaded, grades, RunConfig{});
  auto report = report_to_json(roster, result);

  auto reparsed = nlohmann::json::parse(report.dump(2));
  CHECK(matrix_from_report(reparsed) == result.evaluations);

  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 10; ++rep) {
    auto random = testutil::random_matrix(rng, 4, 0.1);
    auto shares = run_compute(
        Roster({{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}}),
        LoadedEvaluations{random, {}}, InstructorWeights::all_ones(4), RunConfig{});
    auto json_report = report_to_json(Roster({{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}}),
                                      shares);
    auto round_tripped = matrix_from_report(nlohmann::json::parse(json_report.dump()));
    CHECK(round_tripped == shares.evaluations);
  }
}

TEST_CASE("permuting the roster permutes the report but not the scores") {
  TempDir dir;
  auto roster_a = load_roster(dir.file("ra.csv", kRoster));
  auto roster_b = load_roster(dir.file("rb.csv", "id,name\ncarol,Carol\nalice,Alice\nbob,Bob\n"));
  auto evals_path = dir.file("evals.csv", kEvals);
  auto grades_path = dir.file("grades.csv", kGrades);

  auto result_a = run_compute(roster_a, load_evaluations(evals_path, roster_a),
                              load_instructor_grades(grades_path, roster_a), RunConfig{});
  auto result_b = run_compute(roster_b, load_evaluations(evals_path, roster_b),
                              load_instructor_grades(grades_path, roster_b), RunConfig{});

  for (std::size_t i = 0; i < roster_a.size(); ++i) {
    const auto& id = roster_a.at(i).id;
    auto j = roster_b.index_of(id);
    REQUIRE(j.has_value());
    CHECK(std::abs(result_a.scores[i].final_score - result_b.scores[*j].final_score) < 1e-12);
    CHECK(std::abs(result_a.scores[i].mechanism_share - result_b.scores[*j].mechanism_share) <
          1e-12);
  }
}

TEST_CASE("csv and text renderings carry the final scores") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(dir.file("evals.csv", kEvals), roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", kGrades), roster);
  auto result = run_compute(roster, loaded, grades, RunConfig{});

  auto csv = report_to_csv(roster, result);
  CHECK(csv.rfind("id,final_score\nalice,", 0) == 0);
  CHECK(csv.find("\ncarol,") != std::string::npos);

  auto text = report_to_text(roster, result);
  CHECK(text.find("mechanism: auxiliary") != std::string::npos);
  CHECK(text.find("alice") != std::string::npos);
  CHECK(text.find("auxiliary matrix:") != std::string::npos);
}

TEST_CASE("all-zero instructor grades fail with a mechanism diagnostic") {
  TempDir dir;
  auto roster = load_roster(dir.file("roster.csv", kRoster));
  auto loaded = load_evaluations(dir.file("evals.csv", kEvals), roster);
  auto grades = load_instructor_grades(dir.file("grades.csv", "id,grade\n"), roster,
                                       /*default_missing_to_zero=*/true);
  CHECK(grades.values() == std::vector<double>{0, 0, 0});
  auto code = error_code_of([&] { run_compute(roster, loaded, grades, RunConfig{}); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::NoInformedJudges);
  CHECK(category_of(*code) == ErrorCategory::Mechanism);
}

TEST_CASE("scenario runner is deterministic and validates its input") {
  nlohmann::json scenario = {
      {"seed", 99},
      {"accuracy", {{"trials", 40}, {"min_team", 3}, {"max_team", 6}}},
      {"manipulation",
       {{"t", {0.5, 0.25, 0.25}}, {"manipulator", 3}, {"resolution", 60}}},
      {"incentive",
       {{"t", {0.5, 0.25, 0.25}}, {"resolution", 12}, {"consistency_weights", {0.0, 0.1}}}}};
  auto first = run_scenario(scenario);
  auto second = run_scenario(scenario);
  CHECK(first.dump() == second.dump());
  CHECK(first["accuracy"]["failures"] == 0);
  CHECK(first["manipulation"]["gain"].get<double>() >= 2.0 / 180 - 1e-9);
  CHECK(first["incentive"]["rows"].size() == 2);

  CHECK(error_code_of([] { run_scenario(nlohmann::json::object()); }) == ErrorCode::ParseError);
  nlohmann::json bad = {{"manipulation", {{"t", {0.5, 0.25, 0.25}}, {"manipulator", 9}}}};
  CHECK(error_code_of([&] { run_scenario(bad); }) == ErrorCode::InvalidIndex);
}
