#pragma once

// Proof trees: the record of every processor application, rendered as
// indented text or as JSON, and an independent re-check of the witnesses.

#include "lctrs/access.hpp"
#include "lctrs/graph.hpp"
#include "lctrs/processors.hpp"
#include "lctrs/sdp.hpp"
#include "lctrs/trs.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace lctrs {

enum class Verdict { Yes, Maybe };

inline const char* to_string(Verdict v) { return v == Verdict::Yes ? "YES" : "MAYBE"; }

enum class NodeStatus {
  Closed,      // the empty problem
  Applied,     // a processor was applied; see children
  Unresolved,  // no processor applies
  Timeout,     // the global deadline passed before this problem was handled
};

inline const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Closed: return "closed";
    case NodeStatus::Applied: return "applied";
    case NodeStatus::Unresolved: return "unresolved";
    case NodeStatus::Timeout: return "timeout";
  }
  return "";
}

struct ProofNode {
  DpProblem problem;
  NodeStatus status = NodeStatus::Unresolved;
  std::string processor;                 // set when Applied
  std::optional<Witness> witness;        // set when Applied
  std::vector<ProofNode> children;

  /// Every leaf is closed.
  bool proven() const {
    if (status == NodeStatus::Closed) return true;
    if (status != NodeStatus::Applied) return false;
    for (const auto& c : children)
      if (!c.proven()) return false;
    return true;
  }
};

struct Proof {
  Verdict verdict = Verdict::Maybe;
  Goal goal = Goal::Termination;
  std::set<std::string> hidden;
  std::string reason;                    // why the verdict is MAYBE, if known
  std::vector<Type> sorts;
  std::optional<SortOrdering> ordering;
  std::vector<Sdp> sdps;                 // every numbered SDP, including those introduced by processors
  std::optional<ProofNode> root;
};

// ---------------------------------------------------------------------------
// Witness text

namespace detail {

inline std::string id_set(const std::vector<std::size_t>& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + std::to_string(ids[i]);
  return s + "}";
}

inline std::string index_set(const std::set<std::size_t>& is) { return id_set({is.begin(), is.end()}); }

struct WitnessText {
  std::string operator()(const GraphWitness& w) const {
    std::string s = "SCCs ";
    if (w.components.empty()) s += "none";
    for (std::size_t i = 0; i < w.components.size(); ++i) s += (i ? ", " : "") + id_set(w.components[i]);
    s += "; edges ";
    if (w.edges.empty()) s += "none";
    for (std::size_t i = 0; i < w.edges.size(); ++i)
      s += (i ? ", " : "") + std::to_string(w.edges[i].first) + "→" + std::to_string(w.edges[i].second);
    return s;
  }
  std::string operator()(const SubtermWitness& w) const {
    std::string s;
    for (std::size_t i = 0; i < w.nu.size(); ++i)
      s += (i ? ", " : "") + std::string("ν(") + w.nu[i].first.display() + ")=" + std::to_string(w.nu[i].second);
    return s + "; removes " + id_set(w.strict);
  }
  std::string operator()(const IntegerWitness& w) const {
    std::string s;
    for (std::size_t i = 0; i < w.J.size(); ++i)
      s += (i ? ", " : "") + std::string("J(") + w.J[i].first.display() + ")=" + lctrs::to_string(w.J[i].second);
    return s + "; removes " + id_set(w.strict);
  }
  std::string operator()(const TheoryArgWitness& w) const {
    std::string s;
    for (std::size_t i = 0; i < w.tau.size(); ++i)
      s += (i ? ", " : "") + std::string("τ(") + w.tau[i].first.display() + ")=" + index_set(w.tau[i].second);
    s += "; fixes " + id_set(w.fixed);
    if (w.public_variant) s += "; public SDPs kept";
    return s;
  }
  std::string operator()(const SplitWitness& w) const {
    std::string s;
    for (std::size_t i = 0; i < w.splits.size(); ++i) {
      s += (i ? ", " : "") + std::string("(") + std::to_string(w.splits[i].first) + ") into ";
      const auto& to = w.splits[i].second;
      for (std::size_t j = 0; j < to.size(); ++j) s += (j ? ", " : "") + std::string("(") + std::to_string(to[j]) + ")";
    }
    return s;
  }
  std::string operator()(const ReachWitness& w) const {
    return "from " + id_set(w.sources) + "; removes " + id_set(w.removed);
  }
  std::string operator()(const PairWitness& w) const { return w.name + "; removes " + id_set(w.strict); }
};

inline void render_node(const ProofNode& n, std::size_t depth, std::string& out) {
  out += std::string(2 * depth, ' ') + problem_labels(n.problem.sdps) + " " + to_string(n.problem.flag) + ": ";
  switch (n.status) {
    case NodeStatus::Closed: out += "empty\n"; return;
    case NodeStatus::Unresolved: out += "unresolved\n"; return;
    case NodeStatus::Timeout: out += "timeout\n"; return;
    case NodeStatus::Applied: break;
  }
  out += n.processor;
  if (n.witness) out += ", " + std::visit(WitnessText{}, *n.witness);
  out += "\n";
  for (const auto& c : n.children) render_node(c, depth + 1, out);
}

}  // namespace detail

inline std::string to_string(const Witness& w) { return std::visit(detail::WitnessText{}, w); }

/// Indented text: verdict, goal, sort ordering, numbered SDPs and the tree.
inline std::string render_text(const Proof& p) {
  std::string out = std::string(to_string(p.verdict)) + "\n";
  out += std::string("goal: ") + to_string(p.goal) + "\n";
  if (!p.hidden.empty()) {
    out += "hidden:";
    for (const auto& h : p.hidden) out += " " + h;
    out += "\n";
  }
  if (!p.reason.empty()) out += "reason: " + p.reason + "\n";
  if (p.ordering) out += "sort ordering: " + p.ordering->to_string(p.sorts) + "\n";
  if (p.ordering && p.sdps.empty()) {
    out += "no dependency pairs; trivially terminating\n";
    return out;
  }
  if (!p.sdps.empty()) {
    out += "dependency pairs:\n";
    for (const auto& s : p.sdps) out += "  (" + std::to_string(s.id) + ") " + to_string(s) + "\n";
  }
  if (p.root) {
    out += "proof:\n";
    detail::render_node(*p.root, 1, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline constexpr const char* kProofSchema = "lctrs-proof/1";

namespace detail {

inline std::vector<std::size_t> problem_ids(const DpProblem& P) {
  std::vector<std::size_t> out;
  for (const auto& s : P.sdps) out.push_back(s.id);
  return out;
}

struct WitnessJson {
  nlohmann::json operator()(const GraphWitness& w) const {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : w.edges) edges.push_back({a, b});
    return {{"edges", edges}, {"components", w.components}};
  }
  nlohmann::json operator()(const SubtermWitness& w) const {
    nlohmann::json nu = nlohmann::json::object();
    for (const auto& [f, i] : w.nu) nu[f.display()] = i;
    return {{"nu", nu}, {"removed", w.strict}};
  }
  nlohmann::json operator()(const IntegerWitness& w) const {
    nlohmann::json J = nlohmann::json::object();
    for (const auto& [f, t] : w.J) J[f.display()] = lctrs::to_string(t);
    return {{"J", J}, {"removed", w.strict}};
  }
  nlohmann::json operator()(const TheoryArgWitness& w) const {
    nlohmann::json tau = nlohmann::json::object();
    for (const auto& [f, s] : w.tau) tau[f.display()] = std::vector<std::size_t>(s.begin(), s.end());
    return {{"tau", tau}, {"fixed", w.fixed}, {"public_variant", w.public_variant}};
  }
  nlohmann::json operator()(const SplitWitness& w) const {
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& [from, to] : w.splits) splits.push_back({{"sdp", from}, {"into", to}});
    return {{"splits", splits}};
  }
  nlohmann::json operator()(const ReachWitness& w) const { return {{"sources", w.sources}, {"removed", w.removed}}; }
  nlohmann::json operator()(const PairWitness& w) const { return {{"name", w.name}, {"removed", w.strict}}; }
};

inline nlohmann::json node_json(const ProofNode& n) {
  nlohmann::json j = {{"problem", problem_ids(n.problem)},
                      {"flag", to_string(n.problem.flag)},
                      {"status", to_string(n.status)}};
  if (n.status == NodeStatus::Applied) {
    j["processor"] = n.processor;
    if (n.witness) j["witness"] = std::visit(WitnessJson{}, *n.witness);
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_json(c));
    j["children"] = kids;
  }
  return j;
}

}  // namespace detail

inline nlohmann::json proof_json(const Proof& p) {
  nlohmann::json j;
  j["schema"] = kProofSchema;
  j["verdict"] = to_string(p.verdict);
  j["goal"] = to_string(p.goal);
  j["hidden"] = std::vector<std::string>(p.hidden.begin(), p.hidden.end());
  j["reason"] = p.reason;
  if (p.ordering) {
    nlohmann::json ranks = nlohmann::json::object();
    for (const auto& s : p.sorts) ranks[s.name()] = p.ordering->rank_of(s.name());
    j["sort_ordering"] = ranks;
  } else {
    j["sort_ordering"] = nullptr;
  }
  nlohmann::json sdps = nlohmann::json::array();
  for (const auto& s : p.sdps) {
    std::vector<std::string> L;
    for (const auto& x : s.lvars) L.push_back(x.name);
    sdps.push_back({{"id", s.id},
                    {"lhs", to_string(s.lhs)},
                    {"rhs", to_string(s.rhs)},
                    {"constraint", to_string(s.constraint)},
                    {"L", L}});
  }
  j["sdps"] = sdps;
  j["proof"] = p.root ? detail::node_json(*p.root) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Re-checking

namespace detail {

inline const Sdp* find_sdp(const std::vector<Sdp>& P, std::size_t id) {
  for (const auto& p : P)
    if (p.id == id) return &p;
  return nullptr;
}

inline std::vector<Sdp> without(const std::vector<Sdp>& P, const std::vector<std::size_t>& removed) {
  std::vector<Sdp> out;
  for (const auto& p : P)
    if (std::find(removed.begin(), removed.end(), p.id) == removed.end()) out.push_back(p);
  return out;
}

inline bool same_problem(const DpProblem& a, const std::vector<Sdp>& sdps, Flag flag) {
  if (a.flag != flag || a.sdps.size() != sdps.size()) return false;
  for (std::size_t i = 0; i < sdps.size(); ++i)
    if (!a.sdps[i].same(sdps[i])) return false;
  return true;
}

class ProofChecker {
 public:
  ProofChecker(const Lcstrs& system, SmtSolver& solver) : system_(system), solver_(solver) {}

  void check(const ProofNode& n, const std::string& where) {
    const DpProblem& P = n.problem;
    const std::string here = where + problem_labels(P.sdps);
    switch (n.status) {
      case NodeStatus::Closed:
        if (!P.empty()) fail(here, "closed but not empty");
        return;
      case NodeStatus::Unresolved:
      case NodeStatus::Timeout: return;
      case NodeStatus::Applied: break;
    }
    if (!n.witness) {
      fail(here, "no witness");
      return;
    }
    for (const auto& c : n.children)
      if (P.flag == Flag::An && c.problem.flag == Flag::Pu) fail(here, "an problem turned into a pu problem");
    std::visit([&](const auto& w) { check_witness(n, w, here); }, *n.witness);
    for (const auto& c : n.children) check(c, here + " / ");
  }

  std::vector<std::string> errors;

 private:
  void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

  void expect_children(const ProofNode& n, const std::vector<std::pair<std::vector<Sdp>, Flag>>& want,
                       const std::string& here) {
    if (n.children.size() != want.size()) {
      fail(here, "unexpected number of subproblems");
      return;
    }
    for (std::size_t i = 0; i < want.size(); ++i)
      if (!same_problem(n.children[i].problem, want[i].first, want[i].second))
        fail(here, "subproblem " + std::to_string(i + 1) + " does not follow from the witness");
  }

  void check_witness(const ProofNode& n, const GraphWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    const Graph g = build_graph(P, system_, solver_);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (auto [i, j] : g.edges()) edges.emplace_back(P[i].id, P[j].id);
    if (edges != w.edges) fail(here, "graph edges differ");
    std::vector<std::pair<std::vector<Sdp>, Flag>> want;
    for (const auto& c : nontrivial_sccs(g)) {
      std::vector<Sdp> sub;
      for (auto v : c) sub.push_back(P[v]);
      want.emplace_back(std::move(sub), Flag::An);
    }
    expect_children(n, want, here);
  }

  void check_witness(const ProofNode& n, const SubtermWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    std::map<Symbol, std::size_t> nu(w.nu.begin(), w.nu.end());
    auto strict = check_projection(P, nu);
    if (!strict) {
      fail(here, "projection does not orient every SDP");
      return;
    }
    if (detail::ids(P, *strict) != w.strict || w.strict.empty()) fail(here, "strictly oriented SDPs differ");
    expect_children(n, {{without(P, w.strict), Flag::An}}, here);
  }

  void check_witness(const ProofNode& n, const IntegerWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    std::map<Symbol, Term> J(w.J.begin(), w.J.end());
    for (const auto& f : heads(P)) {
      if (!J.contains(f)) {
        fail(here, "no interpretation for " + f.display());
        return;
      }
      const auto fi = free_int_positions(f, P);
      for (const auto& x : free_vars(J.at(f))) {
        bool ok = false;
        for (auto i : fi) ok = ok || x == position_var(i).variable();
        if (!ok) fail(here, "J(" + f.display() + ") uses " + x.name + " outside FI");
      }
    }
    auto strict = check_integer_mapping(P, J, solver_);
    if (!strict) {
      fail(here, "integer mapping does not orient every SDP");
      return;
    }
    if (detail::ids(P, *strict) != w.strict || w.strict.empty()) fail(here, "strictly oriented SDPs differ");
    expect_children(n, {{without(P, w.strict), Flag::An}}, here);
  }

  void check_witness(const ProofNode& n, const TheoryArgWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    TheoryArgMap tau(w.tau.begin(), w.tau.end());
    if (!is_theory_arg_map(tau, P)) fail(here, "τ violates the closure conditions");
    std::vector<bool> fixed(P.size());
    for (std::size_t k = 0; k < P.size(); ++k) fixed[k] = fixes(tau, P[k]);
    if (detail::ids(P, fixed) != w.fixed || w.fixed.empty()) fail(here, "fixed SDPs differ");
    std::vector<Sdp> ext;
    for (const auto& p : P) ext.push_back(extend_by(p, tau));
    auto same_modulo_id = [](const std::vector<Sdp>& got, const std::vector<Sdp>& want) {
      if (got.size() != want.size()) return false;
      for (std::size_t i = 0; i < got.size(); ++i)
        if (!got[i].same(want[i])) return false;
      return true;
    };
    if (w.public_variant) {
      if (n.problem.flag != Flag::Pu) fail(here, "public variant on an an problem");
      std::vector<Sdp> want;
      for (std::size_t k = 0; k < P.size(); ++k) {
        const bool pub = is_public(P[k], system_.hidden);
        if (pub && !fixed[k]) fail(here, "a public SDP is not fixed");
        want.push_back(pub ? P[k] : ext[k]);
      }
      if (n.children.size() != 1 || n.children[0].problem.flag != Flag::Pu ||
          !same_modulo_id(n.children[0].problem.sdps, want))
        fail(here, "subproblem does not follow from the witness");
      return;
    }
    if (n.children.size() != 2 || n.children[0].problem.flag != Flag::An ||
        !same_modulo_id(n.children[0].problem.sdps, ext) ||
        !same_problem(n.children[1].problem, without(P, w.fixed), n.problem.flag))
      fail(here, "subproblems do not follow from the witness");
  }

  void check_witness(const ProofNode& n, const SplitWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    if (n.children.size() != 1 || n.children[0].problem.flag != n.problem.flag) {
      fail(here, "constraint modification must keep one problem and its flag");
      return;
    }
    const auto& Q = n.children[0].problem.sdps;
    for (const auto& [from, to] : w.splits) {
      const Sdp* p = find_sdp(P, from);
      auto halves = p ? split_constraint(p->constraint) : std::nullopt;
      if (!halves || to.size() != 2) {
        fail(here, "SDP " + std::to_string(from) + " cannot be split");
        continue;
      }
      const Sdp* a = find_sdp(Q, to[0]);
      const Sdp* b = find_sdp(Q, to[1]);
      if (!a || !b || !(a->constraint == halves->first) || !(b->constraint == halves->second) ||
          !(a->lhs == p->lhs) || !(a->rhs == p->rhs) || !(b->lhs == p->lhs) || !(b->rhs == p->rhs))
        fail(here, "split of SDP " + std::to_string(from) + " differs");
    }
    if (Q.size() != P.size() + w.splits.size()) fail(here, "unexpected number of SDPs after splitting");
  }

  void check_witness(const ProofNode& n, const ReachWitness& w, const std::string& here) {
    const auto& P = n.problem.sdps;
    if (n.problem.flag != Flag::Pu) fail(here, "reachability on an an problem");
    std::vector<std::size_t> sources;
    for (std::size_t k = 0; k < P.size(); ++k)
      if (is_public(P[k], system_.hidden)) sources.push_back(k);
    const auto keep = reachable_from(build_graph(P, system_, solver_), sources);
    if (detail::ids(P, keep, false) != w.removed || w.removed.empty()) fail(here, "removed SDPs differ");
    expect_children(n, {{without(P, w.removed), Flag::Pu}}, here);
  }

  void check_witness(const ProofNode& n, const PairWitness& w, const std::string& here) {
    if (n.problem.flag == Flag::Pu) fail(here, "reduction pair on a pu problem");
    expect_children(n, {{without(n.problem.sdps, w.strict), Flag::An}}, here);
  }

  const Lcstrs& system_;
  SmtSolver& solver_;
};

}  // namespace detail

/// Replays every witness in the tree against the processor side
/// conditions. Empty iff the tree checks out.
inline std::vector<std::string> check_proof(const Proof& p, const Lcstrs& system, SmtSolver& solver) {
  std::vector<std::string> errors;
  if (p.ordering && !is_afp_witness(system, *p.ordering)) errors.push_back("sort ordering is not an AFP witness");
  if (p.verdict == Verdict::Yes) {
    if (!p.ordering) errors.push_back("YES without a sort ordering");
    if (p.root && !p.root->proven()) errors.push_back("YES but some leaf is not closed");
  }
  if (p.root) {
    detail::ProofChecker checker(system, solver);
    checker.check(*p.root, "");
    errors.insert(errors.end(), checker.errors.begin(), checker.errors.end());
  }
  return errors;
}

}  // namespace lctrs
