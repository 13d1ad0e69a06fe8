// ============================================================================
//  rqpap — command-line workbench for the reversible quantum process algebra
//
//  Subcommands
//    parse       parse a model file and list its declarations
//    lts         build the labelled transition system of a named term
//    bisim       decide an equivalence between two named terms
//    normalize   rewrite a named term to axiom-system normal form
//    verify-e91  mechanically verify the E91 protocol model
//    sweep       run a property suite (soundness / completeness / ...)
//
//  Exit codes:  0 success (related / zero failures)
//               1 not related, or a sweep found failures
//               2 usage or parse error
//               3 resource limit (state cap, rewrite fuel, cycle)
//
//  Human-readable reports go to stdout; lines intended for scripts are
//  prefixed `#RQ `.
// ============================================================================
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rqpap/bisim.hpp"
#include "rqpap/e91.hpp"
#include "rqpap/parser.hpp"
#include "rqpap/rewrite.hpp"
#include "rqpap/sos.hpp"
#include "rqpap/sweep.hpp"
#include "rqpap/term.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kUsage;
}

rqpap::TermPtr named_term(const rqpap::Model& m, const std::string& name) {
  auto it = m.terms.find(name);
  if (it == m.terms.end())
    throw std::runtime_error("no term named '" + name +
                             "' in the model (declare `term " + name +
                             " = ...;`)");
  return it->second;
}

rqpap::Configuration initial_config(const rqpap::Model& m,
                                    const rqpap::TermPtr& t) {
  if (m.initial_rho) return rqpap::make_config(t, *m.initial_rho);
  return rqpap::make_config(t);
}

// ---------------------------------------------------------------------------

int cmd_parse(const std::string& path) {
  const rqpap::Model m = rqpap::parse_model_file(path);
  std::printf("model %s\n", path.c_str());
  if (!m.comm_actions.empty()) {
    std::printf("  communication actions:");
    for (const auto& a : m.comm_actions) std::printf(" %s", a.c_str());
    std::printf("\n");
  }
  if (!m.quantum_ops.empty()) {
    std::printf("  quantum operations:");
    for (const auto& a : m.quantum_ops) std::printf(" %s", a.c_str());
    std::printf("\n");
  }
  for (const auto& [pair, result] : m.gamma)
    if (pair.first < pair.second)
      std::printf("  gamma(%s, %s) = %s\n", pair.first.c_str(),
                  pair.second.c_str(), result.c_str());
  for (const auto& [name, spec] : m.specs)
    std::printf("  spec %s (%zu equations)\n", name.c_str(),
                spec->equations.size());
  for (const auto& [name, t] : m.terms)
    std::printf("  term %s = %s\n", name.c_str(), rqpap::render(t).c_str());
  if (m.initial_rho)
    std::printf("  initial state: %d qubit(s)\n", m.initial_rho->qubits);
  std::printf("#RQ parse ok comm=%zu qops=%zu gamma=%zu specs=%zu terms=%zu\n",
              m.comm_actions.size(), m.quantum_ops.size(), m.gamma.size() / 2,
              m.specs.size(), m.terms.size());
  return kOk;
}

int cmd_lts(const std::string& path, const std::string& term_name,
            const std::string& export_path, std::size_t max_states,
            bool forward_canonical) {
  const rqpap::Model m = rqpap::parse_model_file(path);
  const rqpap::TermPtr t = named_term(m, term_name);
  rqpap::StepLimits lim;
  lim.max_states = max_states;

  const rqpap::Lts l =
      forward_canonical
          ? rqpap::build_forward_canonical_lts(initial_config(m, t), m, lim)
          : rqpap::build_lts(initial_config(m, t), m, lim);

  std::size_t terminating = 0;
  for (char p : l.terminating) terminating += p ? 1 : 0;
  std::printf("lts of %s%s\n", term_name.c_str(),
              forward_canonical ? " (forward-canonical)" : "");
  std::printf("  states: %zu  forward edges: %zu  reverse edges: %zu  "
              "terminating: %zu%s\n",
              l.states.size(), l.forward.size(), l.reverse.size(), terminating,
              l.truncated ? "  [TRUNCATED at state cap]" : "");

  if (!export_path.empty()) {
    std::ofstream out(export_path);
    if (!out) throw std::runtime_error("cannot write " + export_path);
    out << rqpap::export_lts(l);
    std::printf("  exported to %s\n", export_path.c_str());
  }
  std::printf("#RQ lts states=%zu forward=%zu reverse=%zu terminating=%zu "
              "truncated=%d\n",
              l.states.size(), l.forward.size(), l.reverse.size(), terminating,
              l.truncated ? 1 : 0);
  if (l.truncated) {
    std::cerr << "error: state cap " << max_states
              << " reached; raise --max-states\n";
    return kResource;
  }
  return kOk;
}

int cmd_bisim(const std::string& path, const std::string& left,
              const std::string& right, const std::string& mode_name) {
  rqpap::EqMode mode;
  if (mode_name == "fr")
    mode = rqpap::EqMode::Fr;
  else if (mode_name == "branching")
    mode = rqpap::EqMode::Branching;
  else if (mode_name == "rooted")
    mode = rqpap::EqMode::Rooted;
  else
    return usage_error("unknown mode '" + mode_name +
                       "' (expected fr | branching | rooted)");

  const rqpap::Model m = rqpap::parse_model_file(path);
  const rqpap::TermPtr lt = named_term(m, left);
  const rqpap::TermPtr rt = named_term(m, right);
  const rqpap::Lts la = rqpap::build_lts(initial_config(m, lt), m);
  const rqpap::Lts lb = rqpap::build_lts(initial_config(m, rt), m);
  if (la.truncated || lb.truncated) {
    std::cerr << "error: state cap reached while building "
              << (la.truncated ? left : right)
              << "; the comparison needs finite systems\n";
    return kResource;
  }

  const rqpap::EquivalenceVerdict v = rqpap::check_equivalence(la, lb, mode);
  std::printf("%s  vs  %s  (%s)\n", left.c_str(), right.c_str(),
              mode_name.c_str());
  std::printf("  verdict: %s\n", v.related ? "related" : "NOT related");
  if (v.related)
    std::printf("  witness: %zu related state pairs\n", v.witness.size());
  else if (!v.distinguishing.empty())
    std::printf("  distinguished by: %s\n", v.distinguishing.c_str());
  if (!v.note.empty()) std::printf("  note: %s\n", v.note.c_str());
  std::printf("#RQ bisim mode=%s related=%s\n", mode_name.c_str(),
              v.related ? "true" : "false");
  return v.related ? kOk : kNegative;
}

int cmd_normalize(const std::string& path, const std::string& term_name,
                  bool trace, std::size_t fuel) {
  const rqpap::Model m = rqpap::parse_model_file(path);
  const rqpap::TermPtr t = named_term(m, term_name);
  if (!rqpap::algebraic(t))
    return usage_error(
        "term '" + term_name +
        "' is outside the rewriting system's domain (encapsulation, "
        "abstraction and recursion have no axioms here)");

  const rqpap::NormalizeResult r = rqpap::normalize(t, m, fuel);
  if (trace && !r.trace.steps.empty()) std::printf("%s", r.trace.render().c_str());
  std::printf("%s\n", rqpap::render(r.term).c_str());
  std::printf("#RQ normalize complete=%s steps=%zu\n",
              r.complete ? "true" : "false", r.trace.steps.size());
  if (!r.complete) {
    std::cerr << "error: normalization stopped (" << r.stop_reason << ") after "
              << r.trace.steps.size() << " steps\n";
    return kResource;
  }
  return kOk;
}

int cmd_verify_e91(int pairs, int domain, bool concrete, bool swapped,
                   bool full_fr) {
  rqpap::E91Options o;
  o.n_pairs = pairs;
  o.domain_size = domain;
  o.concrete = concrete;
  o.swapped_measurements = swapped;
  o.full_fr = full_fr;
  const rqpap::VerificationReport r = rqpap::verify_e91(o);
  std::printf("%s", r.render().c_str());
  std::printf("#RQ e91 related=%s loop=%s%s%s ok=%s\n",
              r.verdict.related ? "true" : "false",
              r.loop_shape_ok ? "true" : "false",
              r.concrete_checked
                  ? (r.concrete_ok ? " concrete=true" : " concrete=false")
                  : "",
              r.full_fr_checked
                  ? (r.full_fr_verdict.related ? " full_fr=true"
                                               : " full_fr=false")
                  : "",
              r.ok() ? "true" : "false");
  return r.ok() ? kOk : kNegative;
}

int cmd_sweep(const std::string& kind_name, std::size_t budget,
              std::uint64_t seed) {
  const rqpap::SweepKind kind = rqpap::parse_sweep_kind(kind_name);
  const rqpap::SweepReport r = rqpap::run_sweep(kind, budget, seed);
  std::printf("%s", r.render().c_str());
  std::printf("#RQ sweep kind=%s seed=%llu instances=%zu failures=%zu "
              "skipped=%zu\n",
              rqpap::sweep_kind_name(r.kind),
              static_cast<unsigned long long>(r.seed), r.instances, r.failures,
              r.skipped);
  return r.ok() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for a reversible quantum process algebra"};
  app.set_version_flag("--version", "rqpap 0.1.0");
  app.require_subcommand(1);
  int rc = kOk;

  // parse
  std::string parse_path;
  auto* parse = app.add_subcommand("parse", "parse a model file");
  parse->add_option("file", parse_path, "model file (.rqp)")->required();
  parse->callback([&] { rc = cmd_parse(parse_path); });

  // lts
  std::string lts_path, lts_term, lts_export;
  std::size_t lts_max_states = 20000;
  bool lts_canonical = false;
  auto* lts = app.add_subcommand(
      "lts", "build the transition system of a named term");
  lts->add_option("file", lts_path, "model file (.rqp)")->required();
  lts->add_option("--term", lts_term, "name of the term to explore")
      ->required();
  lts->add_option("--export", lts_export,
                  "write the system as F/R/T lines to this path");
  lts->add_option("--max-states", lts_max_states, "state cap (default 20000)");
  lts->add_flag("--forward-canonical", lts_canonical,
                "forward-only exploration over canonical states "
                "(terminates on recursive protocols)");
  lts->callback([&] {
    rc = cmd_lts(lts_path, lts_term, lts_export, lts_max_states,
                 lts_canonical);
  });

  // bisim
  std::string bisim_path, bisim_left, bisim_right, bisim_mode = "fr";
  auto* bisim =
      app.add_subcommand("bisim", "decide an equivalence between two terms");
  bisim->add_option("file", bisim_path, "model file (.rqp)")->required();
  bisim->add_option("--left", bisim_left, "left term name")->required();
  bisim->add_option("--right", bisim_right, "right term name")->required();
  bisim->add_option("--mode", bisim_mode,
                    "fr | branching | rooted (default fr)");
  bisim->callback(
      [&] { rc = cmd_bisim(bisim_path, bisim_left, bisim_right, bisim_mode); });

  // normalize
  std::string norm_path, norm_term;
  bool norm_trace = false;
  std::size_t norm_fuel = 10000;
  auto* norm = app.add_subcommand(
      "normalize", "rewrite a named term to axiom-system normal form");
  norm->add_option("file", norm_path, "model file (.rqp)")->required();
  norm->add_option("--term", norm_term, "name of the term to normalize")
      ->required();
  norm->add_flag("--trace", norm_trace, "print every rewrite step");
  norm->add_option("--fuel", norm_fuel, "step budget (default 10000)");
  norm->callback(
      [&] { rc = cmd_normalize(norm_path, norm_term, norm_trace, norm_fuel); });

  // verify-e91
  int e91_pairs = 1, e91_domain = 1;
  bool e91_concrete = false, e91_swapped = false, e91_full_fr = false;
  auto* e91 = app.add_subcommand(
      "verify-e91", "verify the E91 protocol model against its specification");
  e91->add_option("--pairs", e91_pairs, "EPR pairs in the register (1..2)");
  e91->add_option("--domain", e91_domain,
                  "tokens in the data domains (1..2, default 1)");
  e91->add_flag("--concrete", e91_concrete,
                "attach Bell-pair state and measurement effects; check the "
                "final quantum state of one round");
  e91->add_flag("--swapped-measurements", e91_swapped,
                "exchange the order of Bob's two measurement steps "
                "(negative control: the protocol round deadlocks)");
  e91->add_flag("--full-fr", e91_full_fr,
                "also compare one restricted round against its derived "
                "sequential form under strong forward-reverse bisimilarity");
  e91->callback([&] {
    rc = cmd_verify_e91(e91_pairs, e91_domain, e91_concrete, e91_swapped,
                        e91_full_fr);
  });

  // sweep
  std::string sweep_kind;
  std::size_t sweep_budget = 0;
  std::uint64_t sweep_seed = 42;
  auto* sweep = app.add_subcommand("sweep", "run a property suite");
  sweep
      ->add_option("kind", sweep_kind,
                   "soundness | completeness | congruence | roundtrip")
      ->required();
  sweep->add_option("--seed", sweep_seed, "RNG seed (default 42)");
  sweep->add_option("--budget", sweep_budget,
                    "instances per axiom / quadruples / max operator count "
                    "(0 = suite default)");
  sweep->callback([&] { rc = cmd_sweep(sweep_kind, sweep_budget, sweep_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const rqpap::ParseError& e) {
    std::cerr << "parse error at line " << e.span().line << ", column "
              << e.span().column << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  return rc;
}
