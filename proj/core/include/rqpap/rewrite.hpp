// ============================================================================
//  rqpap/rewrite.hpp — the axiom system as a directed rewriting system
//
//  The parallel-operator axioms are oriented left-to-right and applied
//  leftmost-innermost modulo associativity/commutativity of +, with a fixed
//  priority: deadlock rules (RQE28–RQE37), then the entanglement-merge rules
//  (RQE18–RQE27), the communication-merge rules (RQC8–RQC17), the parallel
//  rules (RQP1–RQP7), and finally the base-calculus rules (summand
//  idempotence, deadlock absorption in sums, deadlock sequencing).
//
//  Fresh communication redexes whose gamma is undefined rewrite to the
//  deadlock constant under the corresponding RQC rule (such a merge can
//  never take its first step).  History-bearing redexes require gamma to be
//  defined and keys to agree exactly as the axiom is printed.
//
//  Termination is enforced by fuel plus cycle detection rather than by the
//  weight measure: directed RQP6/RQP7 increase the measure, and RQP3
//  preserves it on atom instances, so the measure is audited (weight_audit)
//  instead of trusted.
// ============================================================================
#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rqpap/model.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

enum class RuleId {
  RQP1, RQP2, RQP3, RQP4, RQP5, RQP6, RQP7,
  RQC8, RQC9, RQC10, RQC11, RQC12, RQC13, RQC14, RQC15, RQC16, RQC17,
  RQE18, RQE19, RQE20, RQE21, RQE22, RQE23, RQE24, RQE25, RQE26, RQE27,
  RQE28, RQE29, RQE30, RQE31, RQE32, RQE33, RQE34, RQE35, RQE36, RQE37,
  BaseIdem,      // x + x = x
  BaseDeltaAbs,  // x + delta = x
  BaseDeltaSeq,  // delta . x = delta
};

const char* rule_name(RuleId r);

struct RewriteStep {
  RuleId rule;
  std::string path;  ///< "/" for the root, "/i/j" for nested positions
  Weight before;     ///< weight of the redex
  Weight after;      ///< weight of its replacement
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
  /// One line per step: `<rule> @ <path> : <weight-before> -> <weight-after>`.
  std::string render() const;
};

struct SingleRewrite {
  TermPtr result;
  RewriteStep step;
};

/// One application of the highest-priority rule at an innermost redex
/// (leftmost by default; a generator randomizes the choice among innermost
/// redexes).  Absent iff t is a normal form.  Requires algebraic(t).
std::optional<SingleRewrite> rewrite_once(const TermPtr& t, const Model& m,
                                          std::mt19937_64* rng = nullptr);

struct NormalizeResult {
  TermPtr term;
  RewriteTrace trace;
  bool complete = true;
  std::string stop_reason;  ///< "fuel exhausted" / "cycle detected" if not
};

/// Iterates rewrite_once to a normal form; never silently truncates (an
/// incomplete result carries its reason and the trace so far).
NormalizeResult normalize(const TermPtr& t, const Model& m,
                          std::size_t fuel = 10000,
                          std::mt19937_64* rng = nullptr);

/// Provable equality: both sides normalize and the normal forms are equal
/// modulo AC of +.  Throws std::runtime_error if normalization fails.
bool axiom_equal(const TermPtr& s, const TermPtr& t, const Model& m);

struct WeightAuditEntry {
  RewriteStep step;
  bool decrease;  ///< strictly decreasing step
  bool asserted;  ///< false for RQP6/RQP7 and base rules (report-only)
};

struct WeightAudit {
  std::size_t steps = 0;
  std::size_t violations = 0;          ///< asserted rules that failed
  std::vector<WeightAuditEntry> flagged;  ///< every non-decreasing step
  bool ok() const { return violations == 0; }
};

/// Checks the strict-decrease claim per step; report-only for RQP6/RQP7 and
/// the base rules.  Never throws: findings are returned, not asserted.
WeightAudit weight_audit(const RewriteTrace& trace);

}  // namespace rqpap
