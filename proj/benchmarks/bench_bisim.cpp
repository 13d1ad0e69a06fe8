// Equivalence-checker costs: partition refinement against the naive fixpoint
// on synthetic systems, and the rooted-branching check that the protocol
// verification runs.
#include <benchmark/benchmark.h>

#include "rqpap/bisim.hpp"
#include "rqpap/e91.hpp"
#include "rqpap/gen.hpp"
#include "rqpap/sos.hpp"

namespace {

using namespace rqpap;

void BM_FrBisim_Refinement(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Lts a = random_lts(n, 1);
  Lts b = random_lts(n, 2);
  for (auto _ : state) {
    auto v = fr_bisimilar(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_FrBisim_Refinement)->Arg(16)->Arg(64)->Arg(256);

void BM_FrBisim_NaiveFixpoint(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Lts a = random_lts(n, 1);
  Lts b = random_lts(n, 2);
  for (auto _ : state) {
    auto v = fr_bisimilar_naive(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_FrBisim_NaiveFixpoint)->Arg(16)->Arg(64);

void BM_RootedBranching_E91(benchmark::State& state) {
  E91Build b = build_e91(1);
  Lts sys = build_forward_canonical_lts(
      make_config(b.model.terms.at("System")), b.model, {20000, 2000});
  Lts spec = build_forward_canonical_lts(
      make_config(b.model.terms.at("Spec")), b.model, {20000, 2000});
  for (auto _ : state) {
    auto v = rooted_branching_fr_bisimilar(sys, spec);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_RootedBranching_E91);

void BM_VerifyE91_EndToEnd(benchmark::State& state) {
  for (auto _ : state) {
    VerificationReport r = verify_e91({});
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_VerifyE91_EndToEnd);

}  // namespace
