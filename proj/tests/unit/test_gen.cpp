#include "doctest.h"

#include <set>

#include "rqpap/gen.hpp"
#include "rqpap/parser.hpp"

using namespace rqpap;

namespace {
const std::vector<ActionLabel> two_labels = {ActionLabel::quantum("u"),
                                             ActionLabel::quantum("v")};
}

TEST_CASE("depth-1 terms over one label are that label") {
  const std::vector<ActionLabel> one = {ActionLabel::quantum("u")};
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull})
    CHECK(render(random_term(1, one, seed)) == "u");
}

TEST_CASE("random terms are deterministic in the seed") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TermPtr a = random_term(3, two_labels, seed);
    TermPtr b = random_term(3, two_labels, seed);
    CHECK(ac_equal(a, b));
    CHECK(render(a) == render(b));
  }
}

TEST_CASE("random terms are closed, fresh, and algebraic") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    TermPtr t = random_term(3, two_labels, seed);
    CHECK(t->is_fresh());
    CHECK(algebraic(t));
  }
}

TEST_CASE("1000 samples at depth 3 cover every operator kind") {
  std::set<Op> seen;
  bool atom_only = false;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    TermPtr t = random_term(3, two_labels, seed);
    seen.insert(t->op());
    for (Op o : {Op::Sum, Op::Seq, Op::StaticPar, Op::CommMerge, Op::EntMerge,
                 Op::Parallel})
      if (contains_op(t, {o})) seen.insert(o);
    if (t->op() == Op::Atom) atom_only = true;
  }
  for (Op o : {Op::Sum, Op::Seq, Op::StaticPar, Op::CommMerge, Op::EntMerge,
               Op::Parallel}) {
    CAPTURE(static_cast<int>(o));
    CHECK(seen.count(o) == 1);
  }
  CHECK(atom_only);  // plain atoms occur as well
}

TEST_CASE("exhaustive enumeration is deduplicated and ordered") {
  std::vector<TermPtr> ts = enumerate_terms(2, two_labels);
  // no duplicates modulo AC (canonical renderings are unique)
  std::set<std::string> rendered;
  for (const auto& t : ts) {
    CHECK(t->is_fresh());
    CHECK(rendered.insert(render(t)).second);
  }
  // deterministic order: by operator count, then rendered text
  std::vector<TermPtr> again = enumerate_terms(2, two_labels);
  REQUIRE(again.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(render(ts[i]) == render(again[i]));

  // population size is frozen: 2 atoms at 0 ops, and it grows from there
  CHECK(ts.size() == 529);

  // enumeration contains the interesting mixed shapes
  CHECK(rendered.count("u | v"));
  CHECK(rendered.count("u >< v"));
  CHECK(rendered.count("u ## u"));
  CHECK(rendered.count("u + u"));
  CHECK(rendered.count("(u | v) >< u") + rendered.count("u >< (u | v)") >= 1);
}

TEST_CASE("synthetic transition systems are deterministic and well-formed") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Lts a = random_lts(40, seed);
    Lts b = random_lts(40, seed);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(a.states.size() <= 40);
    CHECK(a.forward.size() == b.forward.size());
    CHECK(export_lts(a) == export_lts(b));
    for (const auto& e : a.forward) {
      CHECK(e.src >= 0);
      CHECK(static_cast<std::size_t>(e.src) < a.states.size());
      CHECK(static_cast<std::size_t>(e.dst) < a.states.size());
    }
  }
}
