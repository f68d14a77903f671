#pragma once

// The analysis loop: AFP check, SDP generation and processor application
// until every problem is empty or nothing applies.

#include "lctrs/access.hpp"
#include "lctrs/graph.hpp"
#include "lctrs/processors.hpp"
#include "lctrs/proof.hpp"
#include "lctrs/sdp.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/trs.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lctrs {

struct StrategyOptions {
  std::chrono::milliseconds timeout{60000};
  /// Called once per processor application, for tracing.
  std::function<void(const ProofNode&)> on_apply;
};

namespace detail {

class Solver {
 public:
  Solver(Context ctx, const StrategyOptions& opts)
      : ctx_(ctx), opts_(opts), deadline_(std::chrono::steady_clock::now() + opts.timeout) {}

  bool timed_out() const { return timed_out_; }

  ProofNode solve(const DpProblem& P) {
    ProofNode node;
    node.problem = P;
    if (P.empty()) {
      node.status = NodeStatus::Closed;
      return node;
    }
    if (expired()) {
      node.status = NodeStatus::Timeout;
      return node;
    }
    auto app = first_applicable(P);
    if (!app) {
      node.status = expired() ? NodeStatus::Timeout : NodeStatus::Unresolved;
      return node;
    }
    node.status = NodeStatus::Applied;
    node.processor = app->processor;
    node.witness = app->witness;
    if (opts_.on_apply) opts_.on_apply(node);
    for (const auto& child : app->children) node.children.push_back(solve(child));
    return node;
  }

 private:
  bool expired() {
    if (std::chrono::steady_clock::now() >= deadline_) timed_out_ = true;
    return timed_out_;
  }

  // Constraint modification only splits SDPs that lie on a cycle, so each
  // SDP is split once and acyclic ones are left to the graph processor.
  std::optional<Application> split_cyclic(const DpProblem& P) {
    const std::vector<bool> cyclic = on_cycle(build_graph(P.sdps, ctx_.system, ctx_.solver));
    return constraint_modification(P, ctx_, &cyclic);
  }

  std::optional<Application> first_applicable(const DpProblem& P) {
    using Step = std::function<std::optional<Application>()>;
    std::vector<Step> steps;
    auto graph = [&] { return graph_processor(P, ctx_); };
    auto subterm = [&] { return subterm_criterion(P, ctx_); };
    auto integer = [&] { return integer_mapping(P, ctx_); };
    auto split = [&] { return split_cyclic(P); };
    auto reach = [&] { return reachability(P, ctx_); };
    auto theory_args = [&] { return theory_argument(P, ctx_); };
    if (P.flag == Flag::Pu)
      steps = {reach, split, graph, subterm, integer, theory_args};
    else
      steps = {graph, subterm, integer, split, theory_args};
    for (const auto& step : steps) {
      if (expired()) return std::nullopt;
      if (auto app = step()) return app;
    }
    return std::nullopt;
  }

  Context ctx_;
  const StrategyOptions& opts_;
  std::chrono::steady_clock::time_point deadline_;
  bool timed_out_ = false;
};

}  // namespace detail

/// Runs the processors on an initial problem. `registry` numbers any SDPs
/// the processors introduce.
inline ProofNode solve(const DpProblem& initial, const Lcstrs& system, SmtSolver& solver, SdpRegistry& registry,
                       const StrategyOptions& opts = {}, bool* timed_out = nullptr) {
  detail::Solver s(Context{system, solver, &registry}, opts);
  ProofNode root = s.solve(initial);
  if (timed_out) *timed_out = s.timed_out();
  return root;
}

/// Termination (goal Termination) or public computability (goal Public)
/// of a validated system. Never throws for analysis failures; they surface
/// as MAYBE with a reason.
inline Proof analyze(const Lcstrs& system, Goal goal, SmtSolver& solver, const StrategyOptions& opts = {}) {
  if (auto diags = validate(system); !diags.empty())
    throw std::invalid_argument("invalid system: " + diags.front().to_string());
  Proof proof;
  proof.goal = goal;
  if (goal == Goal::Public) proof.hidden = system.hidden;
  proof.sorts = system.signature.sorts();

  try {
    AfpResult afp = find_afp_ordering(system, solver);
    if (!afp.ordering) {
      proof.reason = afp.reason.starts_with("no sort ordering") ? "not accessible function passing"
                                                                 : "accessible function passing unknown: " + afp.reason;
      return proof;
    }
    proof.ordering = afp.ordering;

    // Hidden symbols only matter for public computability.
    Lcstrs view = system;
    if (goal == Goal::Termination) view.hidden.clear();

    SdpRegistry registry;
    DpProblem initial = gen_all(view, goal == Goal::Public ? Flag::Pu : Flag::An);
    registry.seed(initial);
    bool timed_out = false;
    proof.root = solve(initial, view, solver, registry, opts, &timed_out);
    proof.sdps = registry.all();
    if (proof.root->proven()) {
      proof.verdict = Verdict::Yes;
    } else {
      proof.reason = timed_out ? "timeout" : "some dependency pair problems remain unresolved";
    }
  } catch (const SolverError& e) {
    proof.verdict = Verdict::Maybe;
    proof.root.reset();
    proof.reason = std::string("solver failure: ") + e.what();
  }
  return proof;
}

}  // namespace lctrs
