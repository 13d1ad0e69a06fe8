#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "rqpap/parser.hpp"
#include "rqpap/sos.hpp"

using namespace rqpap;

namespace {

Model uv_model(bool concrete = false) {
  std::string text =
      "qop u; qop v;\n"
      "comm snd, rcv;\n"
      "gamma(snd, rcv) = tx;\n";
  if (concrete)
    text +=
        "effect u = unitary(hadamard, q0);\n"
        "effect v = unitary(pauli_x, q0);\n"
        "state ground(1);\n";
  return parse_model_text(text);
}

Configuration C(const std::string& src, const Model& m) {
  return make_config(parse_term(src, m));
}

std::vector<std::string> offer_labels(
    const std::vector<std::pair<ActionLabel, Configuration>>& steps) {
  std::vector<std::string> out;
  for (const auto& [l, c] : steps) out.push_back(l.render());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("atoms execute once, stamping the next key and a snapshot") {
  Model m = uv_model();
  auto steps = forward_steps(C("u", m), m);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].first.render() == "u");
  const Configuration& succ = steps[0].second;
  CHECK(render(succ.term) == "u[1]");
  CHECK(succ.snapshots.size() == 1);
  CHECK(succ.snapshots[0].first == 1);
  CHECK(config_terminated(succ));
  CHECK(forward_steps(succ, m).empty());
}

TEST_CASE("sequential composition runs the head to completion first") {
  Model m = uv_model();
  auto s1 = forward_steps(C("u . v", m), m);
  REQUIRE(s1.size() == 1);
  CHECK(render(s1[0].second.term) == "u[1] . v");
  auto s2 = forward_steps(s1[0].second, m);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].first.render() == "v");
  CHECK(render(s2[0].second.term) == "u[1] . v[2]");
}

TEST_CASE("alternative composition commits") {
  Model m = uv_model();
  auto steps = forward_steps(C("u + v", m), m);
  REQUIRE(steps.size() == 2);
  for (const auto& [l, c] : steps) {
    int idx = committed_summand(c.term);
    REQUIRE(idx >= 0);
    // the untouched branch stays fresh but can no longer act
    auto next = forward_steps(c, m);
    CHECK(next.empty());
  }
  // identical alternatives produce one deduplicated derivative
  CHECK(forward_steps(C("u + u", m), m).size() == 1);
}

TEST_CASE("static parallel: quantum labels shared by both sides act jointly") {
  Model m = uv_model();
  auto joint = forward_steps(C("u | u", m), m);
  REQUIRE(joint.size() == 1);  // singles suppressed in favor of the joint step
  CHECK(joint[0].first.render() == "u");
  CHECK(render(joint[0].second.term) == "u[1] | u[1]");  // one shared key
  CHECK(config_terminated(joint[0].second));

  auto distinct = forward_steps(C("u | v", m), m);
  CHECK(offer_labels(distinct) == std::vector<std::string>{"u", "v"});
}

TEST_CASE("static parallel: communication actions always interleave") {
  Model m = uv_model();
  // same comm name on both sides: two single steps, no suppression
  auto same = forward_steps(C("snd | snd", m), m);
  CHECK(same.size() == 2);
  for (const auto& [l, c] : same) CHECK(l.render() == "snd");

  // a defined gamma adds the synchronization on top of the singles
  auto sync = forward_steps(C("snd | rcv", m), m);
  CHECK(offer_labels(sync) == std::vector<std::string>{"rcv", "snd", "tx"});
  for (const auto& [l, c] : sync)
    if (l.name == "tx") CHECK(render(c.term) == "snd[1] | rcv[1]");
}

TEST_CASE("fresh communication merge: synchronization steps only") {
  Model m = uv_model();
  auto sync = forward_steps(C("snd >< rcv", m), m);
  REQUIRE(sync.size() == 1);
  CHECK(sync[0].first.render() == "tx");

  CHECK(forward_steps(C("u >< v", m), m).empty());    // no gamma on quantum
  CHECK(forward_steps(C("snd >< snd", m), m).empty()); // gamma undefined
}

TEST_CASE("fresh entanglement merge: same-name quantum joints only") {
  Model m = uv_model();
  auto joint = forward_steps(C("u ## u", m), m);
  REQUIRE(joint.size() == 1);
  CHECK(joint[0].first.render() == "u");
  CHECK(config_terminated(joint[0].second));

  CHECK(forward_steps(C("u ## v", m), m).empty());
  CHECK(forward_steps(C("snd ## snd", m), m).empty());  // comm never entangles
}

TEST_CASE("encapsulation blocks unsynchronized names only") {
  Model m = uv_model();
  auto steps = forward_steps(C("encap{snd,rcv}(snd | rcv)", m), m);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].first.render() == "tx");

  CHECK(forward_steps(C("encap{snd}(snd . u)", m), m).empty());

  // synchronized steps pass even when their name is restricted: that is the
  // point of encapsulation (force the joint, forbid the halves)
  auto joint = forward_steps(C("encap{u}(u | u)", m), m);
  REQUIRE(joint.size() == 1);
  CHECK(joint[0].first.render() == "u");
  CHECK(forward_steps(C("encap{u}(u | v)", m), m).size() == 1);  // only v
}

TEST_CASE("abstraction makes steps silent and irreversible") {
  Model m = uv_model();
  auto steps = forward_steps(C("abs{tx}(encap{snd,rcv}(snd | rcv))", m), m);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].first.is_tau());
  const Configuration& succ = steps[0].second;
  CHECK(succ.term->has_executed());
  CHECK(succ.snapshots.empty());            // no snapshot for a silent step
  CHECK(reverse_steps(succ, m).empty());    // cannot be undone

  // names outside I pass through with their identity
  auto visible = forward_steps(C("abs{tx}(u)", m), m);
  REQUIRE(visible.size() == 1);
  CHECK(visible[0].first.render() == "u");
}

TEST_CASE("a fresh silent step is itself irreversible") {
  Model m = uv_model();
  auto steps = forward_steps(C("tau . u", m), m);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].first.is_tau());
  CHECK(steps[0].second.snapshots.empty());
  // no keyed action has run, so there is nothing to undo
  CHECK(reverse_steps(steps[0].second, m).empty());
}

TEST_CASE("reversal is strict last-in-first-out") {
  Model m = uv_model();
  Configuration c = C("u . v", m);
  auto s1 = forward_steps(c, m);
  auto s2 = forward_steps(s1[0].second, m);
  const Configuration& done = s2[0].second;

  auto rev = reverse_steps(done, m);
  REQUIRE(rev.size() == 1);
  CHECK(rev[0].first.render() == "v[2]");  // only the top of the stack
  CHECK(config_equal(rev[0].second, s1[0].second));

  auto rev2 = reverse_steps(rev[0].second, m);
  REQUIRE(rev2.size() == 1);
  CHECK(rev2[0].first.render() == "u[1]");
  CHECK(config_equal(rev2[0].second, c));
}

TEST_CASE("make_config synthesizes one snapshot per existing history key") {
  Model m = uv_model();
  Configuration c = C("u[2] . (v[5] . u)", m);
  REQUIRE(c.snapshots.size() == 2);
  CHECK(c.snapshots[0].first == 2);
  CHECK(c.snapshots[1].first == 5);
}

TEST_CASE("concrete steps apply effects and snapshots keep the pre-state") {
  Model m = uv_model(true);
  Configuration c = make_config(parse_term("u", m), *m.initial_rho);
  auto steps = forward_steps(c, m);
  REQUIRE(steps.size() == 1);
  const auto* rho = std::get_if<DensityMatrix>(&steps[0].second.rho);
  REQUIRE(rho != nullptr);
  CHECK(std::abs(rho->m(0, 1).real() - 0.5) < 1e-12);  // |+><+|
  const auto* snap =
      std::get_if<DensityMatrix>(&steps[0].second.snapshots[0].second);
  REQUIRE(snap != nullptr);
  CHECK(snap->approx_equal(ground_state(1)));

  auto rev = reverse_steps(steps[0].second, m);
  REQUIRE(rev.size() == 1);
  CHECK(config_equal(rev[0].second, c));  // the ground state is restored
}

TEST_CASE("forward canonicalization") {
  Model m = uv_model();
  auto fc = [&m](const std::string& s) {
    return render(fcanon_term(parse_term(s, m)));
  };
  CHECK(fc("u[3] . (v . u)") == "v . u");          // executed prefix dropped
  CHECK(fc("u[1] + v") == "tau[~]");               // committed to a finished branch
  CHECK(fc("u[1] . v + v . u") == "v");            // committed, prefix dropped
  CHECK(fc("v || u") == "u | v");                  // fresh full parallel to |, sorted
  CHECK(fc("(u[5] . v) | (u[2] . u)") == "u | v"); // prefixes dropped, sorted
  CHECK(fc("u[2] | v") == "v | tau[~]");           // done side becomes a marker
  CHECK(fc("u[7]") == "tau[~]");                   // terminated to the done marker
  CHECK(fc("u + v") == "u + v");                   // open choices untouched
}

TEST_CASE("transition system construction and text export") {
  Model m = uv_model();
  Lts l = build_lts(C("u . v", m), m);
  CHECK(l.states.size() == 3);
  CHECK_FALSE(l.truncated);
  CHECK(export_lts(l) ==
        "F 0 u 1\n"
        "F 1 v 2\n"
        "R 1 u[1] 0\n"
        "R 2 v[2] 1\n"
        "T 2\n");
}

TEST_CASE("recursive protocols: literal exploration truncates, canonical does not") {
  Model m = uv_model();
  m.specs["S"] = parse_spec("S", "X = u . Y; Y = v . X;", m);
  TermPtr loop = parse_term("<X|S>", m);

  StepLimits lim;
  lim.max_states = 40;
  Lts literal = build_lts(make_config(loop), m, lim);
  CHECK(literal.truncated);  // keys accumulate forever

  Lts canonical = build_forward_canonical_lts(make_config(loop), m);
  CHECK_FALSE(canonical.truncated);
  CHECK(canonical.states.size() == 2);
  CHECK(canonical.forward.size() == 2);
  CHECK(canonical.reverse.empty());  // forward fragment only
}
