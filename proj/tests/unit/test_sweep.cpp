#include "doctest.h"

#include <map>
#include <stdexcept>
#include <string>

#include "rqpap/sweep.hpp"

using namespace rqpap;

namespace {

std::map<std::string, std::pair<std::size_t, std::size_t>> by_context(
    const SweepReport& r) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> out;
  for (const auto& [ctx, pf] : r.per_context) out[ctx] = pf;
  return out;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (SweepKind k : {SweepKind::Soundness, SweepKind::Completeness,
                      SweepKind::Congruence, SweepKind::Roundtrip})
    CHECK(parse_sweep_kind(sweep_kind_name(k)) == k);
  CHECK_THROWS_AS(parse_sweep_kind("frobnicate"), std::invalid_argument);
}

TEST_CASE("the sweep model carries the documented labels") {
  Model m = sweep_model(false);
  CHECK(m.is_qop("a"));
  CHECK(m.is_comm("snd"));
  CHECK(m.is_comm("rcv"));
  CHECK(m.gamma_lookup("snd", "rcv") == std::optional<std::string>("tx"));
  CHECK_FALSE(m.initial_rho.has_value());
  CHECK(sweep_model(true).initial_rho.has_value());
}

TEST_CASE("soundness sweep at smoke scale: the failing axioms are exactly "
          "the interleaving-idempotence and distribution families") {
  SweepReport r = sweep_soundness(12, 42);
  CHECK(r.instances == 444);  // 37 axioms x 12
  CHECK(r.failures == 89);
  CHECK_FALSE(r.ok());

  auto ctx = by_context(r);
  REQUIRE(ctx.size() == 37);
  // sound axioms: zero failures
  for (const char* name :
       {"RQP1", "RQP3", "RQC8", "RQC9", "RQC10", "RQC11", "RQC12", "RQC13",
        "RQC14", "RQC15", "RQC16", "RQC17", "RQE18", "RQE19", "RQE20", "RQE21",
        "RQE22", "RQE23", "RQE24", "RQE25", "RQE26", "RQE27", "RQE28", "RQE30",
        "RQE31", "RQE32", "RQE34", "RQE36"}) {
    CAPTURE(name);
    CHECK(ctx.at(name).second == 0);
  }
  // unsound axiom families at this seed (all failures are genuine semantic
  // differences; see the counterexample listing)
  CHECK(ctx.at("RQP2").second == 9);   // x|x = x on comm-bearing x
  CHECK(ctx.at("RQP4").second == 9);   // sum distribution duplicates choices
  CHECK(ctx.at("RQP5").second == 9);
  CHECK(ctx.at("RQP6").second == 8);   // seq distribution duplicates prefixes
  CHECK(ctx.at("RQP7").second == 6);
  CHECK(ctx.at("RQE29").second == 12);  // deadlocked-vs-terminated mismatch
  CHECK(ctx.at("RQE33").second == 12);
  CHECK(ctx.at("RQE35").second == 12);
  CHECK(ctx.at("RQE37").second == 12);

  CHECK(r.counterexamples_total == r.failures);
  CHECK(r.counterexamples.size() <= 25);
}

TEST_CASE("soundness sweep is deterministic in its seed") {
  SweepReport a = sweep_soundness(6, 7);
  SweepReport b = sweep_soundness(6, 7);
  CHECK(a.instances == b.instances);
  CHECK(a.failures == b.failures);
  REQUIRE(a.counterexamples.size() == b.counterexamples.size());
  for (std::size_t i = 0; i < a.counterexamples.size(); ++i) {
    CHECK(a.counterexamples[i].lhs == b.counterexamples[i].lhs);
    CHECK(a.counterexamples[i].rhs == b.counterexamples[i].rhs);
  }
  SweepReport c = sweep_soundness(6, 8);
  CHECK((a.failures != c.failures ||
         a.counterexamples.size() != c.counterexamples.size() ||
         a.counterexamples[0].lhs != c.counterexamples[0].lhs));
}

TEST_CASE("completeness at two operators: provability and bisimilarity "
          "disagree in both directions, and every disagreement is recorded") {
  SweepReport r = sweep_completeness(2, 2);
  CHECK(r.instances == 139656);  // C(529, 2) pairs
  CHECK_FALSE(r.ok());

  auto ctx = by_context(r);
  CHECK(ctx.at("agreeing-pairs").first == 12643);
  CHECK(ctx.at("bisimilar-not-provable").second == 5388);
  CHECK(ctx.at("provable-not-bisimilar").second == 16);
  CHECK(r.failures == 5388 + 16);
  // normalization itself succeeded on the whole population
  CHECK(ctx.count("normalization") == 0);
}

TEST_CASE("roundtrip at two operators: every forward edge undoes exactly") {
  SweepReport r = sweep_roundtrip(2, 2);
  CHECK(r.instances == 932);
  CHECK(r.failures == 0);
  CHECK(r.ok());
}

TEST_CASE("congruence at smoke scale: all six operators preserve equivalence") {
  SweepReport r = sweep_congruence(12, 7);
  CHECK(r.instances == 72);
  CHECK(r.failures == 0);
  auto ctx = by_context(r);
  for (const char* op : {"choice", "sequence", "static-parallel", "comm-merge",
                         "ent-merge", "parallel"}) {
    CAPTURE(op);
    CHECK(ctx.at(op).first == 12);
    CHECK(ctx.at(op).second == 0);
  }
}

TEST_CASE("run_sweep dispatch honours the budget conventions") {
  SweepReport r = run_sweep(SweepKind::Roundtrip, 2, 0);
  CHECK(r.kind == SweepKind::Roundtrip);
  CHECK(r.instances == 932);
  SweepReport c = run_sweep(SweepKind::Congruence, 12, 7);
  CHECK(c.instances == 72);
}

TEST_CASE("report rendering names the suite and lists contexts") {
  SweepReport r = sweep_roundtrip(2, 2);
  std::string text = r.render();
  CHECK(text.find("roundtrip sweep") != std::string::npos);
  CHECK(text.find("instances=932") != std::string::npos);
  CHECK(text.find("forward-edges") != std::string::npos);
  CHECK(text.find("0 fail") != std::string::npos);
}
