// ============================================================================
//  rqpap acceptance gate — nine release criteria, run end to end.
//
//  Each criterion prints one PASS/FAIL line with its measured evidence.
//  Five criteria are expected to FAIL: they state properties the axiom
//  tables and the protocol derivation claim but the operational semantics
//  refutes, and this suite is where those refutations are reproduced
//  mechanically (details below and in the per-criterion notes).
//
//  Exit codes:
//    default      number of failed criteria (the gate itself, honest)
//    --regression 0 iff every criterion's outcome matches the documented
//                 expectation table below; this is what the continuous test
//                 suite runs, so drift in either direction is caught without
//                 declaring the known-failing criteria green.
//
//  Documented expectations:
//    1 FAIL  protocol verification: the recursive system pipelines rounds
//            (a second receive is enabled before the send), so it is not
//            rooted-branching equivalent to the strictly alternating loop.
//    2 FAIL  axiom soundness: interleaving idempotence (RQP2) fails on
//            communication actions, the distribution axioms RQP4-RQP7
//            duplicate choices/prefixes observably, and the history
//            deadlock rows RQE29/33/35/37 equate a terminated-side merge
//            with delta.
//    3 FAIL  desk-scale completeness: merges with composite operands have
//            no applicable axiom (bisimilar-not-provable), and the unsound
//            rules of (2) prove non-bisimilar pairs equal.
//    4 PASS  reversibility round trip.
//    5 PASS  checker oracle agreement.
//    6 PASS  congruence.
//    7 PASS  quantum backend numerics.
//    8 FAIL  normal-form shape: stuck composite-operand merges keep >< / ##
//            in normal forms (the randomized-order half does hold).
//    9 FAIL  weight audit: association of | preserves the measure on
//            balanced instances, so the strict-decrease claim fails; the
//            audit itself never aborts.
// ============================================================================
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rqpap/bisim.hpp"
#include "rqpap/e91.hpp"
#include "rqpap/gen.hpp"
#include "rqpap/parser.hpp"
#include "rqpap/qstate.hpp"
#include "rqpap/rewrite.hpp"
#include "rqpap/sweep.hpp"

using namespace rqpap;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  explicit Criterion(std::string n) : name(std::move(n)) {}

  std::string name;
  bool pass = false;
  bool expected_pass = false;
  double seconds = 0;
  std::vector<std::string> notes;
};

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// --- 1: protocol verification ----------------------------------------------

Criterion c1_e91() {
  Criterion c{"e91-verification"};
  c.expected_pass = false;
  auto t0 = Clock::now();
  VerificationReport r = verify_e91({});
  c.seconds = secs(t0);
  c.pass = r.verdict.related && r.loop_shape_ok && c.seconds < 5.0;
  c.notes.push_back(fmt("related=%s loop-shape=%s  system %zu states / spec %zu",
                        r.verdict.related ? "true" : "false",
                        r.loop_shape_ok ? "ok" : "broken", r.lhs_states,
                        r.rhs_states));
  if (!r.loop_shape_ok) c.notes.push_back(r.loop_shape_note);
  if (!r.verdict.related && !r.verdict.distinguishing.empty())
    c.notes.push_back("distinguished by: " + r.verdict.distinguishing);
  return c;
}

// --- 2: axiom soundness ------------------------------------------------------

Criterion c2_soundness() {
  Criterion c{"axiom-soundness"};
  c.expected_pass = false;
  auto t0 = Clock::now();
  SweepReport r = sweep_soundness(200, 42);
  c.seconds = secs(t0);
  c.pass = r.failures == 0 && c.seconds < 60.0;
  c.notes.push_back(fmt("%zu instances (200 per axiom, seed 42), %zu failures",
                        r.instances, r.failures));
  std::string failing;
  for (const auto& [ctx, pf] : r.per_context)
    if (pf.second) failing += (failing.empty() ? "" : " ") + ctx +
                              "(" + std::to_string(pf.second) + ")";
  if (!failing.empty()) c.notes.push_back("failing axioms: " + failing);
  if (!r.counterexamples.empty())
    c.notes.push_back("first counterexample [" + r.counterexamples[0].context +
                      "]: " + r.counterexamples[0].lhs + "  vs  " +
                      r.counterexamples[0].rhs + "  (" +
                      r.counterexamples[0].detail + ")");
  return c;
}

// --- 3: desk-scale completeness ---------------------------------------------

Criterion c3_completeness() {
  Criterion c{"desk-completeness"};
  c.expected_pass = false;
  auto t0 = Clock::now();
  SweepReport r = sweep_completeness(3, 2);
  c.seconds = secs(t0);
  c.pass = r.failures == 0 && c.seconds < 120.0;
  std::size_t fn = 0, fp = 0, agree = 0;
  for (const auto& [ctx, pf] : r.per_context) {
    if (ctx == "bisimilar-not-provable") fn = pf.second;
    if (ctx == "provable-not-bisimilar") fp = pf.second;
    if (ctx == "agreeing-pairs") agree = pf.first;
  }
  c.notes.push_back(
      fmt("%zu pairs over %s: %zu agree, %zu bisimilar-not-provable, "
          "%zu provable-not-bisimilar",
          r.instances, "all terms with <= 3 operators over 2 quantum labels",
          agree, fn, fp));
  if (!r.counterexamples.empty())
    c.notes.push_back("e.g. [" + r.counterexamples[0].context + "] " +
                      r.counterexamples[0].lhs + "  vs  " +
                      r.counterexamples[0].rhs);
  return c;
}

// --- 4: reversibility round trip --------------------------------------------

Criterion c4_roundtrip() {
  Criterion c{"reversibility-roundtrip"};
  c.expected_pass = true;
  auto t0 = Clock::now();
  SweepReport r = sweep_roundtrip(3, 2);
  c.seconds = secs(t0);
  c.pass = r.failures == 0;
  c.notes.push_back(fmt("%zu forward edges undone exactly, %zu failures "
                        "(term identity modulo AC, state within 1e-9)",
                        r.instances, r.failures));
  return c;
}

// --- 5: checker oracle agreement --------------------------------------------

Criterion c5_oracles() {
  Criterion c{"oracle-agreement"};
  c.expected_pass = true;
  auto t0 = Clock::now();
  std::size_t disagreements = 0, pairs = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Lts a = random_lts(40, 2 * seed);
    Lts b = random_lts(40, 2 * seed + 1);
    ++pairs;
    if (fr_bisimilar(a, b).related != fr_bisimilar_naive(a, b).related)
      ++disagreements;
  }
  c.seconds = secs(t0);
  c.pass = disagreements == 0 && c.seconds < 60.0;
  c.notes.push_back(fmt("%zu random system pairs (<= 40 states): refinement "
                        "and naive fixpoint disagreed %zu times",
                        pairs, disagreements));
  return c;
}

// --- 6: congruence ------------------------------------------------------------

Criterion c6_congruence() {
  Criterion c{"congruence"};
  c.expected_pass = true;
  auto t0 = Clock::now();
  SweepReport r = sweep_congruence(100, 2026);
  c.seconds = secs(t0);
  c.pass = r.failures == 0;
  c.notes.push_back(fmt("%zu operator-context instances from 100 random "
                        "quadruples (seed 2026), %zu failures, %zu skipped "
                        "for step limits",
                        r.instances, r.failures, r.skipped));
  return c;
}

// --- 7: quantum backend -------------------------------------------------------

Criterion c7_quantum() {
  Criterion c{"quantum-backend"};
  c.expected_pass = true;
  auto t0 = Clock::now();
  std::size_t errors = 0;
  std::vector<std::string> what;

  // bell states against their closed forms, 1e-12
  auto expect = [&](bool ok, const char* label) {
    if (!ok) {
      ++errors;
      what.push_back(label);
    }
  };
  const double kExact = 1e-12;
  DensityMatrix b1 = bell_state(1), b2 = bell_state(2), b3 = bell_state(3),
                b4 = bell_state(4);
  expect(std::abs(b1.m(0, 0).real() - 0.5) < kExact &&
             std::abs(b1.m(0, 3).real() - 0.5) < kExact &&
             std::abs(b1.m(1, 1)) < kExact,
         "bell_state(1) entries");
  expect(std::abs(b2.m(0, 3).real() + 0.5) < kExact, "bell_state(2) sign");
  expect(std::abs(b3.m(1, 2).real() - 0.5) < kExact, "bell_state(3) entries");
  expect(std::abs(b4.m(1, 2).real() + 0.5) < kExact, "bell_state(4) sign");

  // 100 random 2-qubit effect applications: trace and positivity, 1e-9
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  auto random_rho = [&] {
    Mat a(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) a(r, col) = Cplx(g(rng), g(rng));
    Mat p = a * a.adjoint() + 1e-3 * Mat::Identity(4, 4);
    DensityMatrix d;
    d.qubits = 2;
    d.m = p / p.trace();
    return d;
  };
  auto random_unitary = [&] {
    Mat a(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int col = 0; col < 2; ++col) a(r, col) = Cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    return Mat(qr.householderQ());
  };
  std::size_t numeric_errors = 0;
  for (int i = 0; i < 100; ++i) {
    DensityMatrix rho = random_rho();
    QuantumEffect e;
    switch (i % 4) {
      case 0: e = QuantumEffect::unitary(random_unitary(), {i % 2}); break;
      case 1: e = QuantumEffect::unitary(builtin_matrix("cnot"), {0, 1}); break;
      case 2: e = QuantumEffect::measure_std({i % 2}); break;
      default: e = QuantumEffect::measure_std({0, 1}); break;
    }
    DensityMatrix out = apply_effect(rho, e);
    if (std::abs(out.m.trace().real() - 1.0) > 1e-9 || !out.valid(1e-9))
      ++numeric_errors;
    // non-selective measurement idempotence
    if (e.kind == QuantumEffect::Kind::Measure) {
      DensityMatrix again = apply_effect(out, e);
      if (!again.approx_equal(out, 1e-9)) ++numeric_errors;
    }
  }
  expect(numeric_errors == 0, "trace/positivity/idempotence on random inputs");

  c.seconds = secs(t0);
  c.pass = errors == 0;
  c.notes.push_back(fmt("bell forms at 1e-12; 100 random 2-qubit effect "
                        "applications at 1e-9: %zu errors",
                        errors));
  for (const auto& w : what) c.notes.push_back("failed: " + w);
  return c;
}

// --- 8 and 9: normal-form shape and weight audit over the population ---------

struct NormalizePass {
  std::size_t population = 0;
  std::size_t incomplete = 0;
  std::size_t residual_parallel = 0;  ///< normal forms containing || / >< / ##
  std::vector<std::string> residual_examples;
  std::size_t confluence_mismatches = 0;
  std::size_t audit_violations = 0;
  std::size_t audit_aborts = 0;
  std::set<std::string> violating_rules;
  double seconds = 0;
};

NormalizePass run_normalize_pass() {
  NormalizePass p;
  auto t0 = Clock::now();
  Model m;
  m.declare_qop("u");
  m.declare_qop("v");
  std::vector<ActionLabel> labels = {ActionLabel::quantum("u"),
                                     ActionLabel::quantum("v")};
  std::vector<TermPtr> pop = enumerate_terms(3, labels);
  p.population = pop.size();
  for (const auto& t : pop) {
    NormalizeResult det = normalize(t, m);
    if (!det.complete) {
      ++p.incomplete;
      continue;
    }
    if (contains_op(det.term, {Op::Parallel, Op::CommMerge, Op::EntMerge})) {
      ++p.residual_parallel;
      if (p.residual_examples.size() < 3)
        p.residual_examples.push_back(render(t) + "  ->  " + render(det.term));
    }
    try {
      WeightAudit audit = weight_audit(det.trace);
      p.audit_violations += audit.violations;
      for (const auto& entry : audit.flagged)
        if (entry.asserted && !entry.decrease)
          p.violating_rules.insert(rule_name(entry.step.rule));
    } catch (...) {
      ++p.audit_aborts;
    }
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + t->hash());
      NormalizeResult rnd = normalize(t, m, 10000, &rng);
      if (!rnd.complete || !ac_equal(rnd.term, det.term))
        ++p.confluence_mismatches;
    }
  }
  p.seconds = secs(t0);
  return p;
}

Criterion c8_normal_form(const NormalizePass& p) {
  Criterion c{"normal-form-shape"};
  c.expected_pass = false;
  c.seconds = p.seconds;
  c.pass = p.incomplete == 0 && p.residual_parallel == 0 &&
           p.confluence_mismatches == 0;
  c.notes.push_back(
      fmt("%zu terms normalized: %zu keep a parallel-family operator, "
          "%zu incomplete, %zu randomized-order mismatches",
          p.population, p.residual_parallel, p.incomplete,
          p.confluence_mismatches));
  for (const auto& e : p.residual_examples) c.notes.push_back("stuck: " + e);
  return c;
}

Criterion c9_weight_audit(const NormalizePass& p) {
  Criterion c{"weight-audit"};
  c.expected_pass = false;
  c.seconds = p.seconds;
  c.pass = p.audit_violations == 0 && p.audit_aborts == 0;
  std::string rules;
  for (const auto& r : p.violating_rules) rules += (rules.empty() ? "" : " ") + r;
  c.notes.push_back(fmt("%zu asserted steps failed strict decrease, %zu audit "
                        "aborts",
                        p.audit_violations, p.audit_aborts));
  if (!rules.empty()) c.notes.push_back("non-decreasing asserted rules: " + rules);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  bool regression = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--regression") == 0) regression = true;

  std::printf("rqpap acceptance gate — nine criteria\n\n");

  std::vector<Criterion> cs;
  cs.push_back(c1_e91());
  cs.push_back(c2_soundness());
  cs.push_back(c3_completeness());
  cs.push_back(c4_roundtrip());
  cs.push_back(c5_oracles());
  cs.push_back(c6_congruence());
  cs.push_back(c7_quantum());
  NormalizePass pass = run_normalize_pass();
  cs.push_back(c8_normal_form(pass));
  cs.push_back(c9_weight_audit(pass));

  int failed = 0, unexpected = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Criterion& c = cs[i];
    if (!c.pass) ++failed;
    if (c.pass != c.expected_pass) ++unexpected;
    std::printf("[%zu] %-26s %s  (expected %s)  %.2fs\n", i + 1, c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.expected_pass ? "PASS" : "FAIL",
                c.seconds);
    for (const auto& n : c.notes) std::printf("      %s\n", n.c_str());
  }

  std::printf("\nsummary: %zu passed, %d failed", cs.size() - failed, failed);
  if (unexpected == 0)
    std::printf("; every outcome matches the documented analysis\n");
  else
    std::printf("; %d OUTCOMES DIVERGE FROM THE DOCUMENTED ANALYSIS\n",
                unexpected);
  std::printf("#RQ acceptance passed=%zu failed=%d unexpected=%d\n",
              cs.size() - failed, failed, unexpected);

  return regression ? unexpected : failed;
}
