// ============================================================================
//  rqpap/sos.hpp — operational semantics over quantum configurations
//
//  A configuration pairs a term with a quantum state and a snapshot stack.
//  Forward steps execute one action: the acting atom(s) get a history key
//  stamped in place, the action's quantum effect is applied, and the previous
//  state is pushed so the step can be undone exactly.  Reverse steps undo the
//  most recent key (strict LIFO over the whole configuration), restoring term
//  and state.
//
//  Rules in force at parallel-family nodes:
//   * Interleaving: either side may step alone, for every label kind.
//   * Same-op quantum joints: when both sides offer the same quantum
//     operation, the single-side steps for it are suppressed and the
//     operation executes once, stamping one shared key at every
//     participating position.  The joint reverse undoes all of them at once.
//   * Communication syncs: two communication offers nu, mu with
//     gamma(nu, mu) defined may synchronise into gamma(nu, mu); the
//     single-side steps remain available (encapsulation prunes them).
//   * x >< y and x ## y start in sync-only mode (gamma syncs / same-op
//     joints respectively, both sides fresh); once both sides hold executed
//     content the node continues like x | y.  x || y steps exactly like
//     x | y throughout.
//   * encap{H} blocks single-premise steps whose label base is in H;
//     synchronised steps always pass (that is what H is for).
//   * abs{I} renames I-labels to tau.  tau steps apply their quantum effect
//     but take no key and no snapshot; the acted atoms become keyless
//     markers (a[~]) and can never be reversed.
// ============================================================================
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rqpap/model.hpp"
#include "rqpap/qstate.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

struct Configuration {
  TermPtr term;
  Rho rho;
  /// One entry per history key in the term, ascending from bottom to top;
  /// each holds the quantum state from just before that key was stamped.
  std::vector<std::pair<KeyT, Rho>> snapshots;

  std::size_t fingerprint() const;
};

/// Exact state identity: AC-equal terms, equal rho (1e-9), equal snapshots.
bool config_equal(const Configuration& a, const Configuration& b);

/// Builds a configuration, synthesizing one snapshot per existing history
/// key (all holding `rho`) so the stack invariant holds for parsed terms.
Configuration make_config(TermPtr t, Rho rho = SymbolicRho{});

/// Whether the configuration has successfully terminated (the P predicate).
bool config_terminated(const Configuration& c);

/// All one-step forward derivatives, deduplicated, in deterministic order.
std::vector<std::pair<ActionLabel, Configuration>> forward_steps(
    const Configuration& c, const Model& m);

/// All one-step reverse derivatives (labels carry the undone key).  Only the
/// configuration's maximal key is ever offered: reversal is strict LIFO.
std::vector<std::pair<ActionLabel, Configuration>> reverse_steps(
    const Configuration& c, const Model& m);

struct StepLimits {
  std::size_t max_states = 20000;
  std::size_t max_depth = 200;
};

struct Lts {
  struct Edge {
    int src;
    ActionLabel label;
    int dst;
  };
  std::vector<Configuration> states;  ///< index = id, BFS discovery order
  int root = 0;
  std::vector<Edge> forward;
  std::vector<Edge> reverse;
  std::vector<char> terminating;  ///< P predicate per state
  bool truncated = false;

  std::size_t num_states() const { return states.size(); }
};

/// Breadth-first closure of forward and reverse steps from c0.
Lts build_lts(const Configuration& c0, const Model& m, StepLimits lim = {});

/// Deterministic text export: `F <src> <label> <dst>`, `R ...`, `T <state>`.
std::string export_lts(const Lts& l);

/// Forward canonicalization: collapses committed choices, drops terminated
/// sequential prefixes, rewrites executed merge nodes and fresh || to |
/// (sorting the operands), renumbers the remaining keys 1..k, and reduces
/// fully terminated subterms to a single done-marker.  Preserves forward
/// behavior; reverse structure is intentionally discarded.
TermPtr fcanon_term(const TermPtr& t);
Configuration fcanon(const Configuration& c);

/// Forward-only BFS over forward-canonical configurations (loop detection
/// for recursive protocols whose literal state space is infinite).
Lts build_forward_canonical_lts(const Configuration& c0, const Model& m,
                                StepLimits lim = {});

}  // namespace rqpap
