#include "doctest.h"

#include <stdexcept>

#include "rqpap/term.hpp"

using namespace rqpap;

namespace {
TermPtr qa() { return Term::atom(ActionLabel::quantum("a")); }
TermPtr qb() { return Term::atom(ActionLabel::quantum("b")); }
TermPtr qc() { return Term::atom(ActionLabel::quantum("c")); }
TermPtr qa_at(KeyT k) { return Term::atom(ActionLabel::quantum("a").with_key(k)); }
}  // namespace

TEST_CASE("sum flattens, orders, and keeps duplicates") {
  TermPtr s = Term::sum({qb(), Term::sum({qa(), qc()})});
  REQUIRE(s->op() == Op::Sum);
  CHECK(s->kids().size() == 3);
  // ordered by the structural total order, so a+(b+c) == (a+b)+c structurally
  TermPtr t = Term::sum({Term::sum({qb(), qa()}), qc()});
  CHECK(ac_equal(s, t));

  TermPtr dup = Term::sum({qa(), qa()});
  CHECK(dup->kids().size() == 2);  // idempotence is a rewrite rule, not identity

  CHECK(ac_equal(Term::sum({qa()}), qa()));  // singleton collapses
  CHECK_THROWS_AS(Term::sum({}), std::invalid_argument);
}

TEST_CASE("AC identity covers + only") {
  CHECK(ac_equal(Term::sum({qa(), qb()}), Term::sum({qb(), qa()})));
  CHECK_FALSE(ac_equal(Term::seq(qa(), qb()), Term::seq(qb(), qa())));
  CHECK_FALSE(ac_equal(Term::spar(qa(), qb()), Term::spar(qb(), qa())));
  CHECK(ac_equal(ac_canonical(Term::sum({qc(), qa(), qb()})),
                 Term::sum({qa(), qb(), qc()})));
}

TEST_CASE("executedness, keys, histories") {
  TermPtr fresh = Term::seq(qa(), qb());
  CHECK(fresh->is_fresh());
  CHECK(fresh->max_key() == 0);
  CHECK(next_key(fresh) == 1);
  CHECK(histories(fresh).empty());

  TermPtr half = Term::seq(qa_at(2), Term::seq(qa_at(1), qb()));
  CHECK(half->has_executed());
  CHECK(half->max_key() == 2);
  CHECK(next_key(half) == 3);
  CHECK(histories(half) == std::vector<KeyT>{1, 2});

  // keyless markers count as executed but carry no key
  TermPtr marker = Term::atom(ActionLabel::quantum("a").with_key(kKeylessMarker));
  CHECK(marker->has_executed());
  CHECK(histories(marker).empty());
  CHECK(next_key(marker) == 1);
}

TEST_CASE("termination predicate") {
  CHECK_FALSE(terminated(qa()));
  CHECK(terminated(qa_at(1)));
  CHECK_FALSE(terminated(Term::delta()));
  CHECK_FALSE(terminated(Term::tau()));  // fresh tau still has to happen
  CHECK(terminated(Term::atom(ActionLabel::tau().with_key(kKeylessMarker))));
  CHECK(terminated(Term::seq(qa_at(1), qa_at(2))));
  CHECK_FALSE(terminated(Term::seq(qa_at(1), qb())));
  // committed sums delegate, open sums are not terminated
  CHECK(terminated(Term::sum({qa_at(1), qb()})));
  CHECK_FALSE(terminated(Term::sum({qa(), qb()})));
}

TEST_CASE("committed summand") {
  TermPtr open = Term::sum({qa(), qb()});
  CHECK(committed_summand(open) == -1);

  TermPtr committed = Term::sum({qa_at(1), qb()});
  int idx = committed_summand(committed);
  REQUIRE(idx >= 0);
  CHECK(committed->kid(static_cast<std::size_t>(idx))->has_executed());

  TermPtr malformed = Term::sum({qa_at(1), Term::seq(qb(), qa_at(2))});
  CHECK(committed_summand(malformed) == -2);
}

TEST_CASE("algebraic fragment predicate") {
  CHECK(algebraic(Term::par(Term::cmerge(qa(), qb()), Term::emerge(qa(), qb()))));
  CHECK_FALSE(algebraic(Term::encap({"a"}, qa())));
  CHECK_FALSE(algebraic(Term::abstraction({"a"}, qa())));
  CHECK_FALSE(algebraic(Term::seq(qa(), Term::encap({"b"}, qb()))));
}

TEST_CASE("contains_op") {
  TermPtr t = Term::par(qa(), Term::cmerge(qb(), qc()));
  CHECK(contains_op(t, {Op::Parallel}));
  CHECK(contains_op(t, {Op::CommMerge, Op::EntMerge}));
  CHECK_FALSE(contains_op(t, {Op::EntMerge}));
  CHECK_FALSE(contains_op(Term::seq(qa(), qb()), {Op::Parallel, Op::StaticPar}));
}

TEST_CASE("weight measure") {
  CHECK(weight(qa()) == 2);
  CHECK(weight(Term::delta()) == 2);
  CHECK(weight(qa_at(3)) == 2);
  CHECK(weight(Term::sum({qa(), qb()})) == 4);
  CHECK(weight(Term::seq(qa(), qb())) == 64);    // 2^3 * 2^3
  CHECK(weight(Term::spar(qa(), qb())) == 16);   // 2^2 * 2^2
  CHECK(weight(Term::cmerge(qa(), qb())) == 16);
  CHECK(weight(Term::emerge(qa(), qb())) == 16);
  CHECK(weight(Term::par(qa(), qb())) == 49);    // 3 * 16 + 1

  // associativity of | preserves the weight on atom instances
  TermPtr l = Term::spar(Term::spar(qa(), qb()), qc());
  TermPtr r = Term::spar(qa(), Term::spar(qb(), qc()));
  CHECK(weight(l) == weight(r));

  // deep nesting stays exact (arbitrary-precision, no overflow)
  TermPtr deep = qa();
  for (int i = 0; i < 12; ++i) deep = Term::seq(deep, deep);
  CHECK(weight(deep) > Weight(1) << 64);

  CHECK_THROWS_AS(weight(Term::encap({"a"}, qa())), std::domain_error);
}

TEST_CASE("recursion variables compare by spec and variable name") {
  auto spec = std::make_shared<RecSpec>();
  spec->name = "S";
  spec->equations.emplace_back("X", nullptr);
  spec->equations.emplace_back("Y", nullptr);
  spec->equations.front().second = Term::seq(qa(), Term::recvar("Y", spec));
  spec->equations.back().second = Term::seq(qb(), Term::recvar("X", spec));

  CHECK(ac_equal(Term::recvar("X", spec), Term::recvar("X", spec)));
  CHECK_FALSE(ac_equal(Term::recvar("X", spec), Term::recvar("Y", spec)));
  CHECK_THROWS_AS(Term::recvar("Z", spec), std::invalid_argument);
}
