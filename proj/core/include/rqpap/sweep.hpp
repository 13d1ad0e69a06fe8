// ============================================================================
//  rqpap/sweep.hpp — executable property suites
//
//  soundness    every directed axiom, instantiated with random closed fresh
//               terms (history schemas get matching keys as printed), must
//               relate its two sides under strong forward-reverse
//               bisimilarity; in concrete mode the terminal quantum states
//               must also agree.
//  completeness exhaustive desk-scale population: provable equality
//               (axiom_equal) must coincide with bisimilarity on every pair.
//  congruence   bisimilar components stay bisimilar under every binary
//               operator context.
//  roundtrip    every forward edge of every population LTS is undone exactly
//               by its matching reverse edge.
//
//  Failures are report content, never exceptions: each counterexample is
//  recorded verbatim.
// ============================================================================
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rqpap/model.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

enum class SweepKind { Soundness, Completeness, Congruence, Roundtrip };

const char* sweep_kind_name(SweepKind k);
/// Accepts the exact kind names; throws std::invalid_argument otherwise.
SweepKind parse_sweep_kind(const std::string& s);

struct SweepFailure {
  std::string context;  ///< axiom or operator name
  std::string lhs, rhs;
  std::string detail;
};

struct SweepReport {
  SweepKind kind = SweepKind::Soundness;
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::size_t skipped = 0;  ///< instances rejected for exceeding step limits
  std::vector<SweepFailure> counterexamples;  ///< capped; total below
  std::size_t counterexamples_total = 0;
  /// (context, (pass, fail)) in run order.
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
      per_context;
  double seconds = 0;

  bool ok() const { return failures == 0; }
  std::string render() const;
};

/// The model all sweeps draw labels from: one quantum operation `a`, a
/// communicating pair snd/rcv with gamma(snd, rcv) = tx; concrete mode adds
/// a Hadamard effect for `a` and a one-qubit ground initial state.
Model sweep_model(bool concrete);

SweepReport sweep_soundness(std::size_t per_axiom, std::uint64_t seed,
                            bool concrete = false);
SweepReport sweep_completeness(std::size_t max_ops = 3,
                               std::size_t num_labels = 2);
SweepReport sweep_congruence(std::size_t quadruples, std::uint64_t seed);
SweepReport sweep_roundtrip(std::size_t max_ops = 3,
                            std::size_t num_labels = 2);

/// Dispatch by kind with the conventional budget interpretation
/// (soundness: instances per axiom; congruence: quadruples; completeness /
/// roundtrip: maximum operator count).
SweepReport run_sweep(SweepKind kind, std::size_t budget, std::uint64_t seed);

}  // namespace rqpap
