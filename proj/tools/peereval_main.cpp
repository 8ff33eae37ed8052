// Batch front door: load evaluation and grade files, run a mechanism, write
// an audit report; or run a simulation scenario.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "peereval/io.hpp"
#include "peereval/mechanisms.hpp"

namespace {

using namespace peereval;

struct ComputeArgs {
  std::string mechanism = "auxiliary";
  std::string evals;
  std::string grades;
  std::string roster;
  std::string weights = "0.9,0.05,0.05";
  std::string out;
  std::string format = "json";
  std::string error_formula = "per-entry";
  double max_grade = 0.0;
  bool allow_missing_grades = false;
};

ScoreWeights parse_weights(const std::string& spec) {
  double m = 0, r = 0, c = 0;
  char trailing = 0;
  if (std::sscanf(spec.c_str(), "%lf,%lf,%lf%c", &m, &r, &c, &trailing) != 3) {
    throw PeerEvalError(ErrorCode::ParseError,
                        "--weights expects three comma-separated numbers, got '" + spec + "'");
  }
  return ScoreWeights(m, r, c);
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
  } else {
    write_text_file(out_path, contents);
  }
}

int cmd_compute(const ComputeArgs& args) {
  RunConfig config;
  if (auto kind = mechanism_from_string(args.mechanism)) {
    config.mechanism = *kind;
  } else {
    throw PeerEvalError(ErrorCode::ParseError, "unknown mechanism '" + args.mechanism + "'");
  }
  if (auto format = format_from_string(args.format)) {
    config.format = *format;
  } else {
    throw PeerEvalError(ErrorCode::ParseError, "unknown format '" + args.format + "'");
  }
  if (args.error_formula == "printed") {
    config.error_formula = ErrorFormula::AsPrinted;
  } else if (args.error_formula != "per-entry") {
    throw PeerEvalError(ErrorCode::ParseError,
                        "unknown error formula '" + args.error_formula + "'");
  }
  config.score_weights = parse_weights(args.weights);
  config.max_report_grade = args.max_grade;

  Roster roster = load_roster(args.roster);
  LoadedEvaluations loaded = load_evaluations(args.evals, roster);
  InstructorWeights grades = load_instructor_grades(args.grades, roster, args.allow_missing_grades);

  ComputeResult result = run_compute(roster, loaded, grades, config);

  std::string contents;
  switch (config.format) {
    case OutputFormat::Json:
      contents = report_to_json(roster, result).dump(2) + "\n";
      break;
    case OutputFormat::Csv:
      contents = report_to_csv(roster, result);
      break;
    case OutputFormat::Text:
      contents = report_to_text(roster, result);
      break;
  }
  emit(args.out, contents);
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path) {
  nlohmann::json scenario = load_json_file(scenario_path);
  nlohmann::ordered_json report = run_scenario(scenario);
  emit(out_path, report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peer evaluation mechanisms: compute scores from evaluation files or run "
               "simulation experiments"};
  app.require_subcommand(1);

  ComputeArgs compute_args;
  CLI::App* compute = app.add_subcommand("compute", "run a mechanism on evaluation files");
  compute->add_option("--mechanism", compute_args.mechanism,
                      "pie-to-all | pie-to-others | auxiliary")
      ->capture_default_str();
  compute->add_option("--evals", compute_args.evals, "CSV evaluator,evaluatee,score")->required();
  compute->add_option("--grades", compute_args.grades, "CSV id,grade")->required();
  compute->add_option("--roster", compute_args.roster, "CSV id,name")->required();
  compute->add_option("--weights", compute_args.weights,
                      "mechanism,report,consistency weights")
      ->capture_default_str();
  compute->add_option("--max-grade", compute_args.max_grade,
                      "grading scale maximum; default: largest grade in the file");
  compute->add_option("--out", compute_args.out, "output file; default stdout");
  compute->add_option("--format", compute_args.format, "json | csv | text")
      ->capture_default_str();
  compute->add_option("--error-formula", compute_args.error_formula,
                      "per-entry | printed (consistency metric variant)")
      ->capture_default_str();
  compute->add_flag("--allow-missing-grades", compute_args.allow_missing_grades,
                    "treat students absent from the grades file as grade 0");

  std::string scenario_path;
  std::string simulate_out;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario file");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--out", simulate_out, "output file; default stdout");

  try {
    app.parse(argc, argv);
    if (compute->parsed()) return cmd_compute(compute_args);
    return cmd_simulate(scenario_path, simulate_out);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems count as validation errors
  } catch (const peereval::PeerEvalError& e) {
    std::cerr << "error [" << peereval::name_of(e.code()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
