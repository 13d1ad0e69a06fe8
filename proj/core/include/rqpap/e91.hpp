// ============================================================================
//  rqpap/e91.hpp — the E91 entanglement-based key-distribution protocol as a
//  process model, and its mechanical verification.
//
//  Alice (A..A6) and Bob (B..B6) run as guarded linear recursions composed in
//  parallel; channel actions are restricted (encap) and internal interactions
//  abstracted (abstraction).  The system is compared against the two-action
//  specification loop  S = receive_A . send_B . S  under rooted branching
//  forward-reverse equivalence on the forward-canonical transition systems.
//
//  Verification artifacts:
//   * the restricted system's derivation, one equation per protocol phase,
//     generated from the operational steps (every enabled summand is listed,
//     including any the idealized derivation would omit);
//   * a shape check of the abstracted system: does it collapse to a pure
//     2-action external cycle?
//   * in concrete mode, a single protocol round over explicit Bell pairs with
//     non-selective measurements, checking terminal-state agreement against
//     the closed-form post-measurement mixture;
//   * optionally (full_fr) a full forward-reverse comparison of one
//     restricted round against its derived sequential form.
// ============================================================================
#pragma once

#include <set>
#include <string>
#include <vector>

#include "rqpap/bisim.hpp"
#include "rqpap/model.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

struct E91Options {
  int n_pairs = 1;       ///< EPR pairs in the concrete register (1..2)
  int domain_size = 1;   ///< tokens in the input/output data domains (1..2)
  bool concrete = false;
  bool swapped_measurements = false;  ///< exchange Bob's two measurement steps
  bool full_fr = false;
};

struct E91Build {
  Model model;
  TermPtr lhs;  ///< tau_I(encap_H(A || B))
  TermPtr rhs;  ///< specification loop
  TermPtr restricted;  ///< encap_H(A || B), no abstraction (derivation walk)
  std::set<std::string> H, I;
  /// One non-recursive protocol round and its derived sequential form
  /// (the reversible fragment used for concrete / full-FR checking).
  TermPtr round_lhs, round_rhs;
  int n_pairs = 1;
  int domain_size = 1;
  bool swapped = false;
};

/// Builds the protocol model.  Throws std::invalid_argument if n_pairs or
/// domain_size is outside 1..2.
E91Build build_e91(int n_pairs, int domain_size = 1, bool swapped = false,
                   bool concrete = false);

struct VerificationReport {
  std::string protocol = "E91";
  std::string mode = "symbolic";
  int n_pairs = 1;
  int domain_size = 1;
  bool swapped = false;

  EquivalenceVerdict verdict;  ///< rooted branching, forward-canonical LTSs
  std::size_t lhs_states = 0, lhs_edges = 0;
  std::size_t rhs_states = 0, rhs_edges = 0;

  /// First line renders the system process, last line the specification;
  /// between them one equation per derivation phase and the abstraction
  /// collapse observed at the root.
  std::vector<std::string> derivation;

  bool loop_shape_ok = false;
  std::string loop_shape_note;

  bool concrete_checked = false;
  bool concrete_ok = false;
  std::string concrete_note;

  bool full_fr_checked = false;
  EquivalenceVerdict full_fr_verdict;

  double seconds = 0;

  bool ok() const {
    return verdict.related && loop_shape_ok &&
           (!concrete_checked || concrete_ok) &&
           (!full_fr_checked || full_fr_verdict.related);
  }
  std::string render() const;
};

VerificationReport verify_e91(const E91Options& opts);

}  // namespace rqpap
