#include "rqpap/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rqpap/bisim.hpp"
#include "rqpap/gen.hpp"
#include "rqpap/parser.hpp"
#include "rqpap/rewrite.hpp"
#include "rqpap/sos.hpp"

namespace rqpap {

namespace {

using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kCexPerContext = 2;
constexpr std::size_t kCexTotal = 25;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Pass/fail tallies keyed by context, preserving first-seen order.
class ContextTally {
 public:
  void add(const std::string& ctx, bool pass) {
    auto it = index_.find(ctx);
    if (it == index_.end()) {
      index_.emplace(ctx, rows_.size());
      rows_.push_back({ctx, {0, 0}});
      it = index_.find(ctx);
    }
    auto& counts = rows_[it->second].second;
    (pass ? counts.first : counts.second) += 1;
  }
  std::size_t fails(const std::string& ctx) const {
    auto it = index_.find(ctx);
    return it == index_.end() ? 0 : rows_[it->second].second.second;
  }
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
  rows() const {
    return rows_;
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
      rows_;
};

void record_failure(SweepReport& rep, const ContextTally& tally,
                    std::string ctx, std::string lhs, std::string rhs,
                    std::string detail) {
  rep.failures += 1;
  rep.counterexamples_total += 1;
  if (rep.counterexamples.size() >= kCexTotal) return;
  if (tally.fails(ctx) > kCexPerContext) return;
  rep.counterexamples.push_back(
      {std::move(ctx), std::move(lhs), std::move(rhs), std::move(detail)});
}

// ---------------------------------------------------------------------------
// soundness: directed axiom instances
// ---------------------------------------------------------------------------

struct AxiomInst {
  TermPtr lhs, rhs;
};

struct AxiomSpec {
  std::string name;
  std::function<AxiomInst(Rng&)> gen;
};

/// Label pool for variable slots (three labels: one quantum, one comm pair).
const std::vector<ActionLabel>& var_pool() {
  static const std::vector<ActionLabel> p = {ActionLabel::quantum("a"),
                                             ActionLabel::comm("snd"),
                                             ActionLabel::comm("rcv")};
  return p;
}

/// Entanglement rows range over atomic quantum operations.
const std::vector<ActionLabel>& quantum_pool() {
  static const std::vector<ActionLabel> p = {ActionLabel::quantum("a"),
                                             ActionLabel::quantum("b")};
  return p;
}

/// Mismatch rows only need two distinct atomic actions of any kind.
const std::vector<ActionLabel>& atom_pool() {
  static const std::vector<ActionLabel> p = {
      ActionLabel::quantum("a"), ActionLabel::quantum("b"),
      ActionLabel::comm("snd"), ActionLabel::comm("rcv")};
  return p;
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Random closed fresh term for a variable slot (depth 1..3).
TermPtr var(Rng& rng) {
  const std::size_t depth = 1 + pick(rng, 3);
  return random_term(depth, var_pool(), rng());
}

ActionLabel pool_pick(Rng& rng, const std::vector<ActionLabel>& pool) {
  return pool[pick(rng, pool.size())];
}

/// A pair for a fresh communication-merge row: half the time the
/// gamma-defined pair, otherwise two arbitrary atoms.
std::pair<ActionLabel, ActionLabel> comm_row_pair(Rng& rng) {
  if (pick(rng, 2) == 0) {
    return pick(rng, 2) == 0
               ? std::pair{ActionLabel::comm("snd"), ActionLabel::comm("rcv")}
               : std::pair{ActionLabel::comm("rcv"), ActionLabel::comm("snd")};
  }
  return {pool_pick(rng, atom_pool()), pool_pick(rng, atom_pool())};
}

std::pair<ActionLabel, ActionLabel> distinct_pair(Rng& rng) {
  const auto& pool = atom_pool();
  const std::size_t i = pick(rng, pool.size());
  std::size_t j = pick(rng, pool.size() - 1);
  if (j >= i) ++j;
  return {pool[i], pool[j]};
}

TermPtr atom(const ActionLabel& l) { return Term::atom(l); }
TermPtr hist(const ActionLabel& l, KeyT k) { return Term::atom(l.with_key(k)); }

bool is_delta_term(const TermPtr& t) {
  return t->op() == Op::Atom && t->label().is_delta();
}

/// Right-hand side of a fresh communication-merge row: the synchronised
/// action when gamma is defined on the pair, deadlock otherwise.
TermPtr gamma_or_delta(const Model& m, const ActionLabel& v,
                       const ActionLabel& w) {
  if (v.kind == LabelKind::CommAction && w.kind == LabelKind::CommAction) {
    if (auto g = m.gamma_lookup(v.name, w.name))
      return atom(ActionLabel::comm(*g));
  }
  return Term::delta();
}

std::vector<AxiomSpec> axiom_table(const Model& m) {
  const ActionLabel snd = ActionLabel::comm("snd");
  const ActionLabel rcv = ActionLabel::comm("rcv");
  const ActionLabel tx = ActionLabel::comm("tx");

  std::vector<AxiomSpec> t;
  auto add = [&t](std::string name, std::function<AxiomInst(Rng&)> gen) {
    t.push_back({std::move(name), std::move(gen)});
  };

  add("RQP1", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r);
    return {Term::par(x, y),
            Term::sum({Term::spar(x, y), Term::cmerge(x, y), Term::emerge(x, y)})};
  });
  add("RQP2", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r);
    return {Term::spar(x, x), x};
  });
  add("RQP3", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::spar(Term::spar(x, y), z), Term::spar(x, Term::spar(y, z))};
  });
  add("RQP4", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::spar(x, Term::sum({y, z})),
            Term::sum({Term::spar(x, y), Term::spar(x, z)})};
  });
  add("RQP5", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::spar(Term::sum({x, y}), z),
            Term::sum({Term::spar(x, z), Term::spar(y, z)})};
  });
  add("RQP6", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::seq(x, Term::spar(y, z)),
            Term::spar(Term::seq(x, y), Term::seq(x, z))};
  });
  add("RQP7", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::seq(Term::spar(x, y), z),
            Term::spar(Term::seq(x, z), Term::seq(y, z))};
  });

  add("RQC8", [&m](Rng& r) -> AxiomInst {
    auto [v, w] = comm_row_pair(r);
    return {Term::cmerge(atom(v), atom(w)), gamma_or_delta(m, v, w)};
  });
  add("RQC9", [=](Rng&) -> AxiomInst {
    return {Term::cmerge(hist(snd, 1), hist(rcv, 1)), hist(tx, 1)};
  });
  add("RQC10", [&m](Rng& r) -> AxiomInst {
    auto [v, w] = comm_row_pair(r);
    TermPtr y = var(r);
    TermPtr g = gamma_or_delta(m, v, w);
    return {Term::cmerge(atom(v), Term::seq(atom(w), y)),
            is_delta_term(g) ? g : Term::seq(g, y)};
  });
  add("RQC11", [=](Rng& r) -> AxiomInst {
    TermPtr y = var(r);
    return {Term::cmerge(hist(snd, 1), Term::seq(hist(rcv, 1), y)),
            Term::seq(hist(tx, 1), y)};
  });
  add("RQC12", [&m](Rng& r) -> AxiomInst {
    auto [v, w] = comm_row_pair(r);
    TermPtr x = var(r);
    TermPtr g = gamma_or_delta(m, v, w);
    return {Term::cmerge(Term::seq(atom(v), x), atom(w)),
            is_delta_term(g) ? g : Term::seq(g, x)};
  });
  add("RQC13", [=](Rng& r) -> AxiomInst {
    TermPtr x = var(r);
    return {Term::cmerge(Term::seq(hist(snd, 1), x), hist(rcv, 1)),
            Term::seq(hist(tx, 1), x)};
  });
  add("RQC14", [&m](Rng& r) -> AxiomInst {
    auto [v, w] = comm_row_pair(r);
    TermPtr x = var(r), y = var(r);
    TermPtr g = gamma_or_delta(m, v, w);
    return {Term::cmerge(Term::seq(atom(v), x), Term::seq(atom(w), y)),
            is_delta_term(g) ? g : Term::seq(g, Term::par(x, y))};
  });
  add("RQC15", [=](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r);
    return {Term::cmerge(Term::seq(hist(snd, 1), x), Term::seq(hist(rcv, 1), y)),
            Term::seq(hist(tx, 1), Term::par(x, y))};
  });
  add("RQC16", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::cmerge(Term::sum({x, y}), z),
            Term::sum({Term::cmerge(x, z), Term::cmerge(y, z)})};
  });
  add("RQC17", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::cmerge(x, Term::sum({y, z})),
            Term::sum({Term::cmerge(x, y), Term::cmerge(x, z)})};
  });

  add("RQE18", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    return {Term::emerge(atom(u), atom(u)), atom(u)};
  });
  add("RQE19", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    return {Term::emerge(hist(u, 1), hist(u, 1)), hist(u, 1)};
  });
  add("RQE20", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr y = var(r);
    return {Term::emerge(atom(u), Term::seq(atom(u), y)), Term::seq(atom(u), y)};
  });
  add("RQE21", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr y = var(r);
    return {Term::emerge(hist(u, 1), Term::seq(hist(u, 1), y)),
            Term::seq(hist(u, 1), y)};
  });
  add("RQE22", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr x = var(r);
    return {Term::emerge(Term::seq(atom(u), x), atom(u)), Term::seq(atom(u), x)};
  });
  add("RQE23", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr x = var(r);
    return {Term::emerge(Term::seq(hist(u, 1), x), hist(u, 1)),
            Term::seq(hist(u, 1), x)};
  });
  add("RQE24", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr x = var(r), y = var(r);
    return {Term::emerge(Term::seq(atom(u), x), Term::seq(atom(u), y)),
            Term::seq(atom(u), Term::par(x, y))};
  });
  add("RQE25", [](Rng& r) -> AxiomInst {
    ActionLabel u = pool_pick(r, quantum_pool());
    TermPtr x = var(r), y = var(r);
    return {Term::emerge(Term::seq(hist(u, 1), x), Term::seq(hist(u, 1), y)),
            Term::seq(hist(u, 1), Term::par(x, y))};
  });
  add("RQE26", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::emerge(Term::sum({x, y}), z),
            Term::sum({Term::emerge(x, z), Term::emerge(y, z)})};
  });
  add("RQE27", [](Rng& r) -> AxiomInst {
    TermPtr x = var(r), y = var(r), z = var(r);
    return {Term::emerge(x, Term::sum({y, z})),
            Term::sum({Term::emerge(x, y), Term::emerge(x, z)})};
  });

  add("RQE28", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(atom(v), atom(w)), Term::delta()};
  });
  add("RQE29", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(hist(v, 1), hist(w, 2)), Term::delta()};
  });
  add("RQE30", [](Rng& r) -> AxiomInst {
    return {Term::emerge(Term::delta(), var(r)), Term::delta()};
  });
  add("RQE31", [](Rng& r) -> AxiomInst {
    return {Term::emerge(var(r), Term::delta()), Term::delta()};
  });
  add("RQE32", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(atom(v), Term::seq(atom(w), var(r))), Term::delta()};
  });
  add("RQE33", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(hist(v, 1), Term::seq(hist(w, 2), var(r))),
            Term::delta()};
  });
  add("RQE34", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(Term::seq(atom(v), var(r)), atom(w)), Term::delta()};
  });
  add("RQE35", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(Term::seq(hist(v, 1), var(r)), hist(w, 2)),
            Term::delta()};
  });
  add("RQE36", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(Term::seq(atom(v), var(r)), Term::seq(atom(w), var(r))),
            Term::delta()};
  });
  add("RQE37", [](Rng& r) -> AxiomInst {
    auto [v, w] = distinct_pair(r);
    return {Term::emerge(Term::seq(hist(v, 1), var(r)),
                         Term::seq(hist(w, 2), var(r))),
            Term::delta()};
  });

  return t;
}

}  // namespace

const char* sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::Soundness: return "soundness";
    case SweepKind::Completeness: return "completeness";
    case SweepKind::Congruence: return "congruence";
    case SweepKind::Roundtrip: return "roundtrip";
  }
  return "?";
}

SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "soundness") return SweepKind::Soundness;
  if (s == "completeness") return SweepKind::Completeness;
  if (s == "congruence") return SweepKind::Congruence;
  if (s == "roundtrip") return SweepKind::Roundtrip;
  throw std::invalid_argument(
      "unknown sweep kind '" + s +
      "' (expected soundness, completeness, congruence, or roundtrip)");
}

Model sweep_model(bool concrete) {
  Model m;
  m.declare_qop("a");
  m.declare_qop("b");
  m.declare_comm("snd");
  m.declare_comm("rcv");
  m.declare_comm("tx");
  m.declare_gamma("snd", "rcv", "tx");
  if (concrete) {
    m.effects["a"] = QuantumEffect::unitary(builtin_matrix("hadamard"), {0});
    m.effects["b"] = QuantumEffect::unitary(builtin_matrix("pauli_x"), {0});
    m.initial_rho = ground_state(1);
  }
  return m;
}

SweepReport sweep_soundness(std::size_t per_axiom, std::uint64_t seed,
                            bool concrete) {
  const auto t0 = Clock::now();
  SweepReport rep;
  rep.kind = SweepKind::Soundness;
  rep.seed = seed;

  const Model m = sweep_model(concrete);
  const auto table = axiom_table(m);
  const StepLimits lim{4000, 200};
  Rng rng(seed);
  ContextTally tally;

  for (const auto& ax : table) {
    std::size_t done = 0, attempts = 0;
    while (done < per_axiom && attempts < 4 * per_axiom + 8) {
      ++attempts;
      AxiomInst inst = ax.gen(rng);
      Configuration cl = concrete ? make_config(inst.lhs, *m.initial_rho)
                                  : make_config(inst.lhs);
      Configuration cr = concrete ? make_config(inst.rhs, *m.initial_rho)
                                  : make_config(inst.rhs);
      Lts ll = build_lts(cl, m, lim);
      Lts lr = build_lts(cr, m, lim);
      if (ll.truncated || lr.truncated) {
        rep.skipped += 1;
        continue;
      }
      ++done;
      rep.instances += 1;

      EquivalenceVerdict v = fr_bisimilar(ll, lr);
      std::string detail;
      bool pass = v.related;
      if (!pass) {
        detail = v.distinguishing;
      } else if (concrete && !terminal_quantum_states_agree(ll, lr)) {
        pass = false;
        detail = "terminal quantum states differ";
      }
      tally.add(ax.name, pass);
      if (!pass)
        record_failure(rep, tally, ax.name, render(inst.lhs), render(inst.rhs),
                       detail);
    }
  }

  rep.per_context = tally.rows();
  rep.seconds = elapsed(t0);
  return rep;
}

SweepReport sweep_completeness(std::size_t max_ops, std::size_t num_labels) {
  const auto t0 = Clock::now();
  SweepReport rep;
  rep.kind = SweepKind::Completeness;

  Model m;
  std::vector<ActionLabel> labels;
  const char* names[] = {"u", "v", "w"};
  const std::size_t nl = std::min<std::size_t>(std::max<std::size_t>(num_labels, 1), 3);
  for (std::size_t i = 0; i < nl; ++i) {
    m.declare_qop(names[i]);
    labels.push_back(ActionLabel::quantum(names[i]));
  }

  const std::vector<TermPtr> pop = enumerate_terms(max_ops, labels);
  std::vector<Lts> ltss;
  ltss.reserve(pop.size());
  for (const TermPtr& t : pop) ltss.push_back(build_lts(make_config(t), m));

  std::vector<const Lts*> ptrs;
  ptrs.reserve(ltss.size());
  for (const Lts& l : ltss) ptrs.push_back(&l);
  const std::vector<int> block = strong_fr_root_partition(ptrs);

  std::vector<std::string> nf(pop.size());
  ContextTally tally;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    NormalizeResult n = normalize(pop[i], m);
    if (!n.complete) {
      tally.add("normalization", false);
      record_failure(rep, tally, "normalization", render(pop[i]), "",
                     "did not terminate: " + n.stop_reason);
      nf[i] = "<incomplete> " + render(pop[i]);
      continue;
    }
    nf[i] = render(n.term);
  }

  // Cross-tabulate bisimilarity blocks against normal-form groups.  Two terms
  // are provably equal iff their normal forms coincide, so every pair inside
  // one cell agrees on both judgements; disagreements are exactly the pairs
  // that share a block but not a cell (bisimilar, not provable) or share a
  // normal form but not a cell (provable, not bisimilar).
  std::map<int, std::size_t> block_size;
  std::map<std::string, std::size_t> nf_size;
  std::map<std::pair<int, std::string>, std::size_t> cell_size;
  std::map<int, std::map<std::string, std::size_t>> block_rep;  // exemplars
  std::map<std::string, std::map<int, std::size_t>> nf_rep;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    block_size[block[i]] += 1;
    nf_size[nf[i]] += 1;
    cell_size[{block[i], nf[i]}] += 1;
    block_rep[block[i]].emplace(nf[i], i);
    nf_rep[nf[i]].emplace(block[i], i);
  }
  auto pairs2 = [](std::size_t k) { return k * (k - 1) / 2; };
  std::size_t bisim_pairs = 0, axiom_pairs = 0, agree_pairs = 0;
  for (const auto& [b, k] : block_size) bisim_pairs += pairs2(k);
  for (const auto& [s, k] : nf_size) axiom_pairs += pairs2(k);
  for (const auto& [c, k] : cell_size) agree_pairs += pairs2(k);

  const std::size_t n = pop.size();
  rep.instances = pairs2(n);
  const std::size_t false_neg = bisim_pairs - agree_pairs;
  const std::size_t false_pos = axiom_pairs - agree_pairs;
  rep.failures += false_neg + false_pos;
  rep.counterexamples_total += false_neg + false_pos;

  // Exemplars: one pair from each of the first few offending blocks/groups.
  std::size_t shown = 0;
  for (const auto& [b, reps] : block_rep) {
    if (shown >= 3 || reps.size() < 2) continue;
    auto it = reps.begin();
    const std::size_t i = it->second;
    const std::size_t j = std::next(it)->second;
    rep.counterexamples.push_back(
        {"bisimilar-not-provable", render(pop[i]), render(pop[j]),
         "normal forms differ: `" + nf[i] + "` vs `" + nf[j] + "`"});
    ++shown;
  }
  shown = 0;
  for (const auto& [s, reps] : nf_rep) {
    if (shown >= 3 || reps.size() < 2) continue;
    auto it = reps.begin();
    const std::size_t i = it->second;
    const std::size_t j = std::next(it)->second;
    EquivalenceVerdict v = fr_bisimilar(ltss[i], ltss[j]);
    rep.counterexamples.push_back(
        {"provable-not-bisimilar", render(pop[i]), render(pop[j]),
         "shared normal form `" + s + "`; " + v.distinguishing});
    ++shown;
  }

  rep.per_context = {
      {"agreeing-pairs", {agree_pairs, 0}},
      {"bisimilar-not-provable", {0, false_neg}},
      {"provable-not-bisimilar", {0, false_pos}},
  };
  if (tally.fails("normalization") > 0)
    rep.per_context.push_back({"normalization", {0, tally.fails("normalization")}});
  rep.seconds = elapsed(t0);
  return rep;
}

SweepReport sweep_congruence(std::size_t quadruples, std::uint64_t seed) {
  const auto t0 = Clock::now();
  SweepReport rep;
  rep.kind = SweepKind::Congruence;
  rep.seed = seed;

  const Model m = sweep_model(false);
  const StepLimits lim{8000, 300};
  Rng rng(seed);
  ContextTally tally;

  // A variant that is bisimilar to t by construction: duplicate the term as
  // a choice, or add a deadlocked alternative.
  auto variant = [&rng](const TermPtr& t) {
    return pick(rng, 2) == 0 ? Term::sum({t, t}) : Term::sum({t, Term::delta()});
  };
  auto lts_of = [&m, &lim](const TermPtr& t) {
    return build_lts(make_config(t), m, lim);
  };

  struct OpCase {
    const char* name;
    TermPtr (*build)(TermPtr, TermPtr);
  };
  const OpCase ops[] = {
      {"choice", [](TermPtr a, TermPtr b) { return Term::sum({std::move(a), std::move(b)}); }},
      {"sequence", &Term::seq},
      {"static-parallel", &Term::spar},
      {"comm-merge", &Term::cmerge},
      {"ent-merge", &Term::emerge},
      {"parallel", &Term::par},
  };

  std::size_t done = 0, attempts = 0;
  while (done < quadruples && attempts < 4 * quadruples + 8) {
    ++attempts;
    TermPtr s1 = var(rng), s2 = var(rng);
    TermPtr t1 = variant(s1), t2 = variant(s2);

    Lts l_s1 = lts_of(s1), l_t1 = lts_of(t1), l_s2 = lts_of(s2), l_t2 = lts_of(t2);
    if (l_s1.truncated || l_t1.truncated || l_s2.truncated || l_t2.truncated) {
      rep.skipped += 1;
      continue;
    }
    EquivalenceVerdict v1 = fr_bisimilar(l_s1, l_t1);
    EquivalenceVerdict v2 = fr_bisimilar(l_s2, l_t2);
    if (!v1.related || !v2.related) {
      // The quadruple's premise failed; that is itself a defect worth seeing.
      tally.add("component-variant", false);
      record_failure(rep, tally, "component-variant",
                     render(v1.related ? s2 : s1), render(v1.related ? t2 : t1),
                     (v1.related ? v2 : v1).distinguishing);
      rep.instances += 1;
      ++done;
      continue;
    }

    bool quad_truncated = false;
    for (const OpCase& op : ops) {
      Lts cl = lts_of(op.build(s1, s2));
      Lts cr = lts_of(op.build(t1, t2));
      if (cl.truncated || cr.truncated) {
        quad_truncated = true;
        continue;
      }
      rep.instances += 1;
      EquivalenceVerdict v = fr_bisimilar(cl, cr);
      tally.add(op.name, v.related);
      if (!v.related)
        record_failure(rep, tally, op.name,
                       render(op.build(s1, s2)), render(op.build(t1, t2)),
                       v.distinguishing);
    }
    if (quad_truncated) rep.skipped += 1;
    ++done;
  }

  rep.per_context = tally.rows();
  rep.seconds = elapsed(t0);
  return rep;
}

SweepReport sweep_roundtrip(std::size_t max_ops, std::size_t num_labels) {
  const auto t0 = Clock::now();
  SweepReport rep;
  rep.kind = SweepKind::Roundtrip;

  Model m;
  std::vector<ActionLabel> labels;
  const char* names[] = {"u", "v", "w"};
  const std::size_t nl = std::min<std::size_t>(std::max<std::size_t>(num_labels, 1), 3);
  for (std::size_t i = 0; i < nl; ++i) {
    m.declare_qop(names[i]);
    labels.push_back(ActionLabel::quantum(names[i]));
  }

  const std::vector<TermPtr> pop = enumerate_terms(max_ops, labels);
  ContextTally tally;

  for (const TermPtr& t : pop) {
    const Lts lts = build_lts(make_config(t), m);
    if (lts.truncated) {
      rep.skipped += 1;
      continue;
    }
    for (const Lts::Edge& e : lts.forward) {
      rep.instances += 1;
      const Configuration& src = lts.states[static_cast<std::size_t>(e.src)];
      const Configuration& dst = lts.states[static_cast<std::size_t>(e.dst)];
      ActionLabel expect = e.label.is_executed()
                               ? e.label
                               : e.label.with_key(next_key(src.term));
      bool restored = false;
      for (const Lts::Edge& r : lts.reverse) {
        if (r.src != e.dst || r.label != expect) continue;
        if (config_equal(lts.states[static_cast<std::size_t>(r.dst)], src)) {
          restored = true;
          break;
        }
      }
      tally.add("forward-edges", restored);
      if (!restored)
        record_failure(rep, tally, "forward-edges", render(src.term),
                       render(dst.term),
                       "no reverse step `" + expect.render() +
                           "` restores the source configuration");
    }
  }

  rep.per_context = tally.rows();
  rep.seconds = elapsed(t0);
  return rep;
}

SweepReport run_sweep(SweepKind kind, std::size_t budget, std::uint64_t seed) {
  switch (kind) {
    case SweepKind::Soundness:
      return sweep_soundness(budget ? budget : 200, seed);
    case SweepKind::Completeness:
      return sweep_completeness(budget ? std::min<std::size_t>(budget, 4) : 3, 2);
    case SweepKind::Congruence:
      return sweep_congruence(budget ? budget : 100, seed);
    case SweepKind::Roundtrip:
      return sweep_roundtrip(budget ? std::min<std::size_t>(budget, 4) : 3, 2);
  }
  throw std::invalid_argument("unknown sweep kind");
}

std::string SweepReport::render() const {
  std::ostringstream os;
  os << sweep_kind_name(kind) << " sweep  seed=" << seed
     << "  instances=" << instances << "  skipped=" << skipped
     << "  failures=" << failures << "  (" << std::fixed
     << std::setprecision(2) << seconds << " s)\n";
  for (const auto& [ctx, counts] : per_context) {
    os << "  " << std::left << std::setw(24) << ctx << std::right
       << std::setw(8) << counts.first << " pass" << std::setw(8)
       << counts.second << " fail\n";
  }
  if (!counterexamples.empty()) {
    os << "counterexamples (" << counterexamples.size() << " shown of "
       << counterexamples_total << "):\n";
    for (const SweepFailure& f : counterexamples) {
      os << "  [" << f.context << "]  lhs: " << f.lhs << "\n";
      if (!f.rhs.empty()) os << "        rhs: " << f.rhs << "\n";
      if (!f.detail.empty()) os << "        " << f.detail << "\n";
    }
  }
  return os.str();
}

}  // namespace rqpap
