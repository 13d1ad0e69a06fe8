// ============================================================================
//  rqpap/bisim.hpp — equivalence checkers on finite transition systems
//
//  Three relations, in decreasing strength on tau-free systems:
//   * strong forward-reverse bisimulation: forward transitions, reverse
//     transitions (with their history labels), and the termination predicate
//     must match exactly, in both directions.  Decided by signature-based
//     partition refinement over the doubled alphabet {fwd:a} u {rev:a[m]},
//     with a naive greatest-fixpoint checker kept as an oracle.
//   * branching forward-reverse bisimulation: forward matching is up to
//     forward tau-stuttering with the relation required on the stuttering
//     intermediates; reverse and termination matching stutter over reverse
//     tau-transitions, which do not exist in this calculus (silent steps are
//     irreversible), so those clauses require exact matches.
//   * rooted branching: transitions at the two roots must match exactly and
//     land in branching-bisimilar states; termination matches exactly at the
//     roots.
// ============================================================================
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rqpap/sos.hpp"

namespace rqpap {

enum class EqMode { Fr, Branching, Rooted };

struct EquivalenceVerdict {
  bool related = false;
  /// Pairs (state of left LTS, state of right LTS); present iff related.
  std::vector<std::pair<int, int>> witness;
  /// Shortest-effort distinguishing experiment; present iff not related.
  std::string distinguishing;
  /// Non-empty iff an internal cross-check disagreed (config_equivalent).
  std::string note;
};

/// Strong FR bisimilarity of the two roots (partition refinement).
/// Throws std::invalid_argument on truncated inputs.
EquivalenceVerdict fr_bisimilar(const Lts& a, const Lts& b);

/// Same relation by the naive greatest-fixpoint construction (oracle).
EquivalenceVerdict fr_bisimilar_naive(const Lts& a, const Lts& b);

EquivalenceVerdict branching_fr_bisimilar(const Lts& a, const Lts& b);
EquivalenceVerdict rooted_branching_fr_bisimilar(const Lts& a, const Lts& b);

EquivalenceVerdict check_equivalence(const Lts& a, const Lts& b, EqMode mode);

/// Independent clause-by-clause validation of a verdict's witness.
bool validate_witness(const Lts& a, const Lts& b, const EquivalenceVerdict& v,
                      EqMode mode);

/// Joint strong-FR partition over the disjoint union of many LTSs; returns
/// one block id per input root (equal ids <=> strongly FR bisimilar roots).
std::vector<int> strong_fr_root_partition(const std::vector<const Lts*>& ltss);

/// Whether the concrete quantum states reached at terminated states of the
/// two systems agree as sets (each within 1e-9 of some counterpart).
bool terminal_quantum_states_agree(const Lts& a, const Lts& b);

/// Equivalence of two configurations with equal initial quantum state:
/// decides the chosen relation on the full configuration systems, and
/// cross-checks against the structural relation on the term-only systems
/// plus agreement of the terminal quantum states.  The direct verdict is
/// returned; a disagreement sets `note`.
EquivalenceVerdict config_equivalent(const Configuration& c1,
                                     const Configuration& c2, EqMode mode,
                                     const Model& m, StepLimits lim = {});

/// `RELATED yes|no`, `WITNESS <i> <j>` lines, or `DISTINGUISH <experiment>`.
std::string export_verdict(const EquivalenceVerdict& v);

}  // namespace rqpap
