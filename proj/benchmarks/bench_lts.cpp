// Transition-system construction costs: interleaving blow-up of static
// parallel, the E91 system's canonical state space, and raw per-state
// successor derivation.
#include <benchmark/benchmark.h>

#include "rqpap/e91.hpp"
#include "rqpap/model.hpp"
#include "rqpap/sos.hpp"

namespace {

using namespace rqpap;

Model atoms_model(int n) {
  Model m;
  for (int i = 0; i < n; ++i) m.declare_qop("u" + std::to_string(i));
  return m;
}

// u0 | u1 | ... | u(n-1): every interleaving plus the full reverse structure.
TermPtr interleaving(int n) {
  TermPtr t = Term::atom(ActionLabel::quantum("u0"));
  for (int i = 1; i < n; ++i)
    t = Term::spar(t, Term::atom(ActionLabel::quantum("u" + std::to_string(i))));
  return t;
}

void BM_BuildLts_Interleaving(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = atoms_model(n);
  TermPtr t = interleaving(n);
  StepLimits lim;
  lim.max_states = 1 << 20;
  std::size_t states = 0;
  for (auto _ : state) {
    Lts l = build_lts(make_config(t), m, lim);
    states = l.num_states();
    benchmark::DoNotOptimize(l);
  }
  state.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_BuildLts_Interleaving)->DenseRange(4, 8, 1);

void BM_BuildLts_E91Canonical(benchmark::State& state) {
  E91Build b = build_e91(1);
  Configuration c0 = make_config(b.model.terms.at("System"));
  std::size_t states = 0;
  for (auto _ : state) {
    Lts l = build_forward_canonical_lts(c0, b.model, {20000, 2000});
    states = l.num_states();
    benchmark::DoNotOptimize(l);
  }
  state.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_BuildLts_E91Canonical);

void BM_ForwardSteps_WideChoice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = atoms_model(n);
  std::vector<TermPtr> summands;
  for (int i = 0; i < n; ++i)
    summands.push_back(Term::seq(
        Term::atom(ActionLabel::quantum("u" + std::to_string(i))),
        Term::atom(ActionLabel::quantum("u" + std::to_string((i + 1) % n)))));
  Configuration c = make_config(Term::sum(std::move(summands)));
  for (auto _ : state) {
    auto steps = forward_steps(c, m);
    benchmark::DoNotOptimize(steps);
  }
}
BENCHMARK(BM_ForwardSteps_WideChoice)->Arg(8)->Arg(64)->Arg(256);

}  // namespace
