// ============================================================================
//  rqpap/gen.hpp — deterministic generators for property sweeps
// ============================================================================
#pragma once

#include <cstdint>
#include <vector>

#include "rqpap/sos.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

/// Pseudo-random closed fresh term over the algebraic operators
/// {Atom, Sum, Seq, StaticPar, CommMerge, EntMerge, Parallel}, uniform node
/// choice, branches forced to atoms at depth 1.  Same seed, same term.
TermPtr random_term(std::size_t depth, const std::vector<ActionLabel>& labels,
                    std::uint64_t seed);

/// Every fresh term over the given labels with at most `max_ops` binary
/// operator nodes, deduplicated modulo AC of + (sums are kept in canonical
/// order, so duplicates render identically).  Deterministic order: by
/// operator count, then by rendered text.
std::vector<TermPtr> enumerate_terms(std::size_t max_ops,
                                     const std::vector<ActionLabel>& labels);

/// Synthetic transition system for checker cross-validation: random forward
/// and reverse edges over a small label pool, random termination flags.
/// State payloads are placeholders; only the graph matters.
Lts random_lts(std::size_t max_states, std::uint64_t seed);

}  // namespace rqpap
