// Rewriter costs: whole-population normalization (the shape the sweeps use),
// the worst single term in the small population, and provable-equality
// queries that normalize both sides.
#include <benchmark/benchmark.h>

#include "rqpap/gen.hpp"
#include "rqpap/model.hpp"
#include "rqpap/parser.hpp"
#include "rqpap/rewrite.hpp"

namespace {

using namespace rqpap;

Model uv_model() {
  Model m;
  m.declare_qop("u");
  m.declare_qop("v");
  return m;
}

void BM_Normalize_Population(benchmark::State& state) {
  const std::size_t max_ops = static_cast<std::size_t>(state.range(0));
  Model m = uv_model();
  std::vector<TermPtr> pop = enumerate_terms(
      max_ops, {ActionLabel::quantum("u"), ActionLabel::quantum("v")});
  std::size_t incomplete = 0;
  for (auto _ : state) {
    incomplete = 0;
    for (const auto& t : pop) {
      NormalizeResult r = normalize(t, m);
      if (!r.complete) ++incomplete;
      benchmark::DoNotOptimize(r);
    }
  }
  state.counters["terms"] = static_cast<double>(pop.size());
  state.counters["incomplete"] = static_cast<double>(incomplete);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(pop.size()));
}
BENCHMARK(BM_Normalize_Population)->Arg(2)->Arg(3);

void BM_Normalize_ParallelTower(benchmark::State& state) {
  Model m = uv_model();
  TermPtr u = Term::atom(ActionLabel::quantum("u"));
  TermPtr v = Term::atom(ActionLabel::quantum("v"));
  TermPtr t = Term::par(Term::par(u, v), Term::par(v, u));
  std::size_t steps = 0;
  for (auto _ : state) {
    NormalizeResult r = normalize(t, m, 200000);
    steps = r.trace.steps.size();
    benchmark::DoNotOptimize(r);
  }
  state.counters["steps"] = static_cast<double>(steps);
}
BENCHMARK(BM_Normalize_ParallelTower);

void BM_AxiomEqual_Reassociation(benchmark::State& state) {
  Model m = uv_model();
  TermPtr u = Term::atom(ActionLabel::quantum("u"));
  TermPtr v = Term::atom(ActionLabel::quantum("v"));
  TermPtr lhs = Term::par(Term::par(u, v), u);
  TermPtr rhs = Term::par(u, Term::par(v, u));
  for (auto _ : state) {
    bool eq = axiom_equal(lhs, rhs, m);
    benchmark::DoNotOptimize(eq);
  }
}
BENCHMARK(BM_AxiomEqual_Reassociation);

}  // namespace
