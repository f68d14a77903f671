#pragma once

// Command line: `analyze <file>` prints YES or MAYBE and the proof.
// Exit status 0 = YES, 1 = MAYBE, 2 = input error.

#include "lctrs/parser.hpp"
#include "lctrs/proof.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/strategy.hpp"
#include "lctrs/trs.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lctrs {

inline constexpr int kExitYes = 0;
inline constexpr int kExitMaybe = 1;
inline constexpr int kExitInputError = 2;

inline int exit_status(Verdict v) { return v == Verdict::Yes ? kExitYes : kExitMaybe; }

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void report(std::ostream& err, const std::string& path, const std::vector<ParseError>& errors) {
  for (const auto& e : errors) err << path << ":" << e.to_string() << "\n";
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Termination and public computability analysis for constrained higher-order rewriting"};
  app.require_subcommand(1);
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Analyze a .lctrs file");

  std::string file, goal_name, solver_path, trace_path, log_path, format = "text", extend_path;
  long long timeout_ms = 60000, smt_timeout_ms = 5000;
  analyze_cmd->add_option("file", file, "Input system")->required();
  analyze_cmd->add_option("--goal", goal_name, "termination or public (default: the file's goal directive)")
      ->check(CLI::IsMember({"termination", "public"}));
  analyze_cmd->add_option("--solver", solver_path, "SMT solver executable (default: $LCTRS_SMT, then z3 or cvc5)");
  analyze_cmd->add_option("--timeout", timeout_ms, "Global time limit in ms")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--smt-timeout", smt_timeout_ms, "Time limit per SMT query in ms")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--trace", trace_path, "Write each processor application to this file");
  analyze_cmd->add_option("--log-smt", log_path, "Append every SMT query and answer to this file");
  analyze_cmd->add_option("--format", format, "Proof format")->check(CLI::IsMember({"text", "json"}));
  analyze_cmd->add_option("--extend", extend_path, "Check that this file is a public extension of the input");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitYes;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitYes;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }

  const auto text = detail::read_file(file);
  if (!text) {
    err << file << ": cannot read file\n";
    return kExitInputError;
  }
  ParseResult parsed = parse(*text);
  if (!parsed.ok()) {
    detail::report(err, file, parsed.errors);
    return kExitInputError;
  }
  const Lcstrs& system = *parsed.system;

  if (!extend_path.empty()) {
    const auto ext_text = detail::read_file(extend_path);
    if (!ext_text) {
      err << extend_path << ": cannot read file\n";
      return kExitInputError;
    }
    ParseResult ext = parse(*ext_text, &system);
    if (!ext.ok()) {
      detail::report(err, extend_path, ext.errors);
      return kExitInputError;
    }
    const ExtensionCheck check = check_extension(system, *ext.system);
    if (!check.hierarchical || !check.is_public) {
      err << extend_path << ": not a public extension: " << check.reason << "\n";
      return kExitInputError;
    }
  }

  Goal goal = parsed.goal.value_or(Goal::Termination);
  if (goal_name == "termination") goal = Goal::Termination;
  if (goal_name == "public") goal = Goal::Public;

  SolverConfig config;
  config.executable = solver_path;
  config.timeout = std::chrono::milliseconds(smt_timeout_ms);
  config.log_path = log_path;
  SmtSolver solver(config);
  if (!solver.configured()) err << "warning: no SMT solver found; non-ground queries are inconclusive\n";

  std::ofstream trace;
  StrategyOptions opts;
  opts.timeout = std::chrono::milliseconds(timeout_ms);
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) {
      err << trace_path << ": cannot write trace\n";
      return kExitInputError;
    }
    opts.on_apply = [&trace](const ProofNode& n) {
      trace << problem_labels(n.problem.sdps) << " " << to_string(n.problem.flag) << ": " << n.processor;
      if (n.witness) trace << ", " << to_string(*n.witness);
      trace << "\n";
      trace.flush();
    };
  }

  const Proof proof = analyze(system, goal, solver, opts);
  if (format == "json") {
    out << to_string(proof.verdict) << "\n" << proof_json(proof).dump(2) << "\n";
  } else {
    out << render_text(proof);
  }
  return exit_status(proof.verdict);
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace lctrs
