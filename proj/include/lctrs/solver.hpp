#pragma once

// Satisfiability and validity of logical constraints through an external
// SMT-LIB 2 solver (z3 or cvc5) kept alive across queries.

#include "lctrs/kernel.hpp"
#include "lctrs/process.hpp"
#include "lctrs/smtlib.hpp"
#include "lctrs/theory.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lctrs {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Model = std::map<Variable, Value>;

struct SolverConfig {
  /// Solver command line; empty means $LCTRS_SMT, then z3 or cvc5 on PATH.
  std::string executable;
  std::chrono::milliseconds timeout{5000};
  std::string logic = "QF_NIA";
  /// When set, the full SMT-LIB transcript is appended here.
  std::string log_path;
};

struct SatResult {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  Model model;         // Sat only
  std::string reason;  // Unknown only

  bool sat() const { return kind == Kind::Sat; }
  bool unsat() const { return kind == Kind::Unsat; }
  bool unknown() const { return kind == Kind::Unknown; }
  /// Sat or Unknown: the query might be satisfiable.
  bool maybe_sat() const { return kind != Kind::Unsat; }
};

struct EntailmentResult {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  Model counter_model;  // Invalid only
  std::string reason;

  bool valid() const { return kind == Kind::Valid; }
};

/// ⟦φσ⟧ for a model σ covering Var(φ). nullopt if a variable is unassigned
/// or the evaluation hits a division by zero.
inline std::optional<bool> eval_ground(const Term& phi, const Model& sigma) {
  Substitution s;
  for (const auto& x : free_vars(phi)) {
    auto it = sigma.find(x);
    if (it == sigma.end()) return std::nullopt;
    s.emplace(x, theory::value_term(it->second));
  }
  const Term r = theory::kappa_normalize(apply_subst(phi, s));
  if (theory::is_true(r)) return true;
  if (theory::is_false(r)) return false;
  return std::nullopt;
}

/// Locates a solver binary: explicit path, $LCTRS_SMT, then z3/cvc5 on PATH.
inline std::string find_solver(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("LCTRS_SMT"); env && *env) return env;
  const char* path = std::getenv("PATH");
  if (!path) return {};
  for (const char* name : {"z3", "cvc5"}) {
    std::stringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      std::filesystem::path p = std::filesystem::path(dir) / name;
      std::error_code ec;
      if (std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0) return p.string();
    }
  }
  return {};
}

class SmtSolver {
 public:
  explicit SmtSolver(SolverConfig config = {}) : config_(std::move(config)) {
    command_ = find_solver(config_.executable);
    if (!config_.log_path.empty()) log_ = std::make_unique<std::ofstream>(config_.log_path, std::ios::app);
  }
  SmtSolver(const SmtSolver&) = delete;
  SmtSolver& operator=(const SmtSolver&) = delete;

  const SolverConfig& config() const { return config_; }
  const std::string& command() const { return command_; }
  bool configured() const { return !command_.empty(); }
  std::size_t queries() const { return queries_; }
  std::size_t solver_calls() const { return solver_calls_; }

  /// Decides φ. Ground constraints are evaluated directly; everything else
  /// goes to the external solver. Sat models are checked against φ.
  SatResult check_sat(const Term& phi) {
    if (!theory::is_logical_constraint(phi))
      throw std::invalid_argument("not a logical constraint: " + to_string(phi));
    ++queries_;
    const Term norm = theory::kappa_normalize(phi);
    if (theory::is_true(norm)) return sat_with_defaults(phi);
    if (theory::is_false(norm)) return {SatResult::Kind::Unsat, {}, {}};
    if (is_ground(norm)) return {SatResult::Kind::Unknown, {}, "division by zero in ground constraint"};

    smtlib::NameTable names;
    std::string body = "(assert " + smtlib::print(norm, names) + ")\n";
    std::string decls;
    for (const auto& x : names.variables())
      decls += "(declare-fun " + smtlib::quote(names.name(x)) + " () " + smtlib::sort_name(x.type) + ")\n";
    const std::string key = decls + body;
    if (auto it = cache_.find(key); it != cache_.end()) return complete_model(it->second, phi);

    SatResult r = run_query(decls, body, names);
    if (r.sat()) {
      if (auto ok = eval_ground(norm, r.model); ok && !*ok)
        throw SolverError("solver model violates " + to_string(phi));
    }
    if (r.kind != SatResult::Kind::Unknown || r.reason != "timeout") cache_.emplace(key, r);
    return complete_model(r, phi);
  }

  /// φ ⊨ ψ, decided as unsatisfiability of φ ∧ ¬ψ.
  EntailmentResult check_entailment(const Term& phi, const Term& psi) {
    SatResult r = check_sat(theory::conj(phi, theory::lnot(psi)));
    switch (r.kind) {
      case SatResult::Kind::Unsat: return {EntailmentResult::Kind::Valid, {}, {}};
      case SatResult::Kind::Sat: return {EntailmentResult::Kind::Invalid, std::move(r.model), {}};
      default: return {EntailmentResult::Kind::Unknown, {}, r.reason};
    }
  }

  /// Solver is present and answers a trivial query.
  bool available() {
    if (!configured()) return false;
    return ensure_started();
  }

 private:
  using Clock = ChildProcess::Clock;

  // Fills in values for variables of φ that κ-normalisation removed.
  static SatResult complete_model(SatResult r, const Term& phi) {
    if (!r.sat()) return r;
    for (const auto& x : free_vars(phi))
      if (!r.model.contains(x))
        r.model.emplace(x, x.type == Type::bool_sort() ? Value(false) : Value(Integer(0)));
    return r;
  }

  static SatResult sat_with_defaults(const Term& phi) {
    SatResult r{SatResult::Kind::Sat, {}, {}};
    return complete_model(std::move(r), phi);
  }

  std::vector<std::string> argv() const {
    std::vector<std::string> out;
    std::stringstream ss(command_);
    std::string word;
    while (ss >> word) out.push_back(word);
    if (out.size() == 1) {
      const std::string base = std::filesystem::path(out[0]).filename().string();
      const auto ms = std::to_string(config_.timeout.count());
      if (base.starts_with("z3")) {
        out.push_back("-in");
        out.push_back("-t:" + ms);
      } else if (base.starts_with("cvc5")) {
        out.push_back("--lang=smt2");
        out.push_back("--incremental");
        out.push_back("--tlimit-per=" + ms);
      }
    }
    return out;
  }

  void log(const std::string& text) {
    if (log_) {
      *log_ << text;
      log_->flush();
    }
  }

  bool send(const std::string& text) {
    log(text);
    return proc_.write(text);
  }

  bool ensure_started() {
    if (proc_.running()) return true;
    if (!proc_.start(argv())) return false;
    log("; started " + command_ + "\n");
    if (!send("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic " + config_.logic +
              ")\n(echo \"ready\")\n")) {
      proc_.terminate();
      return false;
    }
    auto line = proc_.read_line(Clock::now() + std::chrono::seconds(10));
    while (line && line->find("ready") == std::string::npos) line = proc_.read_line(Clock::now() + std::chrono::seconds(10));
    if (!line) {
      proc_.terminate();
      return false;
    }
    return true;
  }

  SatResult unknown(std::string reason, bool restart) {
    if (restart) {
      log("; " + reason + ", restarting solver\n");
      proc_.terminate();
    }
    return {SatResult::Kind::Unknown, {}, std::move(reason)};
  }

  SatResult run_query(const std::string& decls, const std::string& body, smtlib::NameTable& names) {
    if (!configured()) return unknown("no SMT solver configured", false);
    if (!ensure_started()) return unknown("SMT solver could not be started: " + command_, false);
    ++solver_calls_;
    const auto deadline = Clock::now() + config_.timeout + std::chrono::milliseconds(2000);
    if (!send("(push 1)\n" + decls + body + "(check-sat)\n")) return unknown("solver pipe closed", true);

    std::string answer;
    bool error = false;
    while (answer.empty()) {
      auto line = proc_.read_line(deadline);
      if (!line) return unknown(proc_.running() && Clock::now() >= deadline ? "timeout" : "solver stopped", true);
      log("; " + *line + "\n");
      std::string s = *line;
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      if (s.starts_with("(error")) {
        error = true;
      } else if (s == "sat" || s == "unsat" || s == "unknown" || s == "timeout") {
        answer = s;
      }
    }

    SatResult r;
    if (error) {
      r = unknown("solver reported an error", false);
    } else if (answer == "unsat") {
      r = {SatResult::Kind::Unsat, {}, {}};
    } else if (answer == "sat") {
      r = {SatResult::Kind::Sat, {}, {}};
      if (!names.variables().empty()) {
        std::string req = "(get-value (";
        for (const auto& x : names.variables()) req += " " + smtlib::quote(names.name(x));
        req += "))\n";
        if (!send(req)) return unknown("solver pipe closed", true);
        std::string text;
        int depth = 0;
        do {
          auto line = proc_.read_line(deadline);
          if (!line) return unknown("timeout", true);
          log("; " + *line + "\n");
          text += *line + "\n";
          depth = smtlib::paren_balance(text);
        } while (depth > 0 || text.find('(') == std::string::npos);
        if (text.find("(error") != std::string::npos) {
          r = unknown("solver reported an error", false);
        } else {
          auto sx = smtlib::parse_sexpr(text);
          for (const auto& pair : sx.list) {
            if (pair.list.size() != 2 || !pair.list[0].is_atom()) continue;
            auto var = names.lookup(smtlib::unquote(pair.list[0].atom));
            auto val = smtlib::read_value(pair.list[1]);
            if (var && val) r.model.emplace(*var, *val);
          }
        }
      }
    } else {
      r = unknown(answer == "timeout" ? "timeout" : "solver returned unknown", false);
    }
    if (!send("(pop 1)\n")) proc_.terminate();
    return r;
  }

  SolverConfig config_;
  std::string command_;
  ChildProcess proc_;
  std::unique_ptr<std::ofstream> log_;
  std::unordered_map<std::string, SatResult> cache_;
  std::size_t queries_ = 0;
  std::size_t solver_calls_ = 0;
};

}  // namespace lctrs
