#include "rqpap/sos.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace rqpap {

namespace {

/// Transient key stamped into offer results; replaced by the allocated key
/// (or the keyless marker) when a step is actually taken.
constexpr KeyT kStampPending = 0xFFFFFFFFu;

/// One candidate forward step of a subterm.
struct Offer {
  ActionLabel label;        ///< emitted label (tau when renamed by abstraction)
  std::string effect_base;  ///< operation name whose quantum effect fires
  TermPtr result;           ///< subterm with kStampPending at acted positions
  bool synced = false;      ///< some two-premise rule fired below
  bool keyless = false;     ///< silent step: stamps become keyless markers
};

/// One candidate reverse step of a subterm (undoing history key `key`).
struct ROffer {
  KeyT key = 0;
  ActionLabel base;  ///< reconstructed action, key not attached
  TermPtr result;    ///< subterm with the key's stamps removed
  bool synced = false;
};

TermPtr subst_pending(const TermPtr& t, KeyT key) {
  if (t->max_key() != kStampPending) return t;  // no pending stamp below
  switch (t->op()) {
    case Op::Atom:
      return Term::atom(t->label().with_key(key));
    case Op::Sum: {
      std::vector<TermPtr> kids;
      kids.reserve(t->kids().size());
      for (const auto& k : t->kids()) kids.push_back(subst_pending(k, key));
      return Term::sum(std::move(kids));
    }
    case Op::Seq:
      return Term::seq(subst_pending(t->kid(0), key), subst_pending(t->kid(1), key));
    case Op::StaticPar:
      return Term::spar(subst_pending(t->kid(0), key), subst_pending(t->kid(1), key));
    case Op::CommMerge:
      return Term::cmerge(subst_pending(t->kid(0), key), subst_pending(t->kid(1), key));
    case Op::EntMerge:
      return Term::emerge(subst_pending(t->kid(0), key), subst_pending(t->kid(1), key));
    case Op::Parallel:
      return Term::par(subst_pending(t->kid(0), key), subst_pending(t->kid(1), key));
    case Op::Encap:
      return Term::encap(t->names(), subst_pending(t->kid(0), key));
    case Op::Abstract:
      return Term::abstraction(t->names(), subst_pending(t->kid(0), key));
    case Op::RecVar:
      return t;
  }
  return t;
}

TermPtr rebuild_node(Op op, const TermPtr& l, const TermPtr& r) {
  switch (op) {
    case Op::StaticPar: return Term::spar(l, r);
    case Op::CommMerge: return Term::cmerge(l, r);
    case Op::EntMerge: return Term::emerge(l, r);
    case Op::Parallel: return Term::par(l, r);
    default: throw std::logic_error("rebuild_node: not a parallel operator");
  }
}

/// Step power of a parallel-family node in its current phase.
enum class ParMode {
  Full,       ///< interleaving + quantum joints + gamma syncs  (|, ||, executed >< / ##)
  GammaOnly,  ///< gamma syncs only  (fresh ><)
  JointOnly,  ///< same-op quantum joints only  (fresh ##)
};

class Stepper {
 public:
  explicit Stepper(const Model& m) : m_(m) {}

  std::vector<Offer> offers(const TermPtr& t) {
    std::vector<Offer> out;
    switch (t->op()) {
      case Op::Atom: {
        const ActionLabel& l = t->label();
        if (l.is_executed() || l.is_delta()) return out;
        if (l.is_tau())
          out.push_back({ActionLabel::tau(), "",
                         Term::atom(l.with_key(kStampPending)), false, true});
        else
          out.push_back({l, l.name, Term::atom(l.with_key(kStampPending)),
                         false, false});
        return out;
      }
      case Op::Sum: {
        const int ci = committed_summand(t);
        if (ci == -2) return out;  // malformed: stuck
        auto from_summand = [&](std::size_t i) {
          for (Offer o : offers(t->kid(i))) {
            std::vector<TermPtr> kids = t->kids();
            kids[i] = o.result;
            o.result = Term::sum(std::move(kids));
            out.push_back(std::move(o));
          }
        };
        if (ci >= 0)
          from_summand(static_cast<std::size_t>(ci));
        else
          for (std::size_t i = 0; i < t->kids().size(); ++i) from_summand(i);
        return out;
      }
      case Op::Seq: {
        if (!terminated(t->kid(0))) {
          for (Offer o : offers(t->kid(0))) {
            o.result = Term::seq(o.result, t->kid(1));
            out.push_back(std::move(o));
          }
        } else {
          for (Offer o : offers(t->kid(1))) {
            o.result = Term::seq(t->kid(0), o.result);
            out.push_back(std::move(o));
          }
        }
        return out;
      }
      case Op::StaticPar:
      case Op::Parallel:
        return par_offers(t, ParMode::Full);
      case Op::CommMerge: {
        if (t->kid(0)->is_fresh() && t->kid(1)->is_fresh())
          return par_offers(t, ParMode::GammaOnly);
        if (t->kid(0)->has_executed() && t->kid(1)->has_executed())
          return par_offers(t, ParMode::Full);
        return out;  // one side executed, one fresh: no rule applies
      }
      case Op::EntMerge: {
        if (t->kid(0)->is_fresh() && t->kid(1)->is_fresh())
          return par_offers(t, ParMode::JointOnly);
        if (t->kid(0)->has_executed() && t->kid(1)->has_executed())
          return par_offers(t, ParMode::Full);
        return out;
      }
      case Op::Encap: {
        for (Offer o : offers(t->kid(0))) {
          if (!o.synced && t->names().count(o.label.name)) continue;
          o.result = Term::encap(t->names(), o.result);
          out.push_back(std::move(o));
        }
        return out;
      }
      case Op::Abstract: {
        for (Offer o : offers(t->kid(0))) {
          if (!o.label.is_tau() && t->names().count(o.label.name)) {
            o.label = ActionLabel::tau();
            o.keyless = true;  // abstracted steps take no key, no snapshot
          }
          o.result = Term::abstraction(t->names(), o.result);
          out.push_back(std::move(o));
        }
        return out;
      }
      case Op::RecVar: {
        const TermPtr* body = t->spec()->find(t->var());
        if (!body || !*body) return out;
        return offers(*body);  // the variable unfolds into its stamped body
      }
    }
    return out;
  }

  std::vector<ROffer> roffers(const TermPtr& t) {
    std::vector<ROffer> out;
    switch (t->op()) {
      case Op::Atom: {
        const ActionLabel& l = t->label();
        if (!l.is_history()) return out;  // fresh, keyless, tau, delta
        out.push_back({*l.key, l.base(), Term::atom(l.base()), false});
        return out;
      }
      case Op::Sum: {
        const int ci = committed_summand(t);
        if (ci < 0) return out;
        for (ROffer o : roffers(t->kid(static_cast<std::size_t>(ci)))) {
          std::vector<TermPtr> kids = t->kids();
          kids[static_cast<std::size_t>(ci)] = o.result;
          o.result = Term::sum(std::move(kids));
          out.push_back(std::move(o));
        }
        return out;
      }
      case Op::Seq: {
        // Undo the right component first; keyless markers in it (from
        // abstraction) are irreversible and block everything to their left.
        if (t->kid(1)->has_executed()) {
          for (ROffer o : roffers(t->kid(1))) {
            o.result = Term::seq(t->kid(0), o.result);
            out.push_back(std::move(o));
          }
        } else {
          for (ROffer o : roffers(t->kid(0))) {
            o.result = Term::seq(o.result, t->kid(1));
            out.push_back(std::move(o));
          }
        }
        return out;
      }
      case Op::StaticPar:
      case Op::Parallel:
        return par_roffers(t);
      case Op::CommMerge:
      case Op::EntMerge: {
        if (t->kid(0)->has_executed() && t->kid(1)->has_executed())
          return par_roffers(t);
        return out;
      }
      case Op::Encap: {
        for (ROffer o : roffers(t->kid(0))) {
          if (!o.synced && t->names().count(o.base.name)) continue;
          o.result = Term::encap(t->names(), o.result);
          out.push_back(std::move(o));
        }
        return out;
      }
      case Op::Abstract: {
        // No history under abs{I} carries an I base (those steps were
        // keyless), so reverse offers pass through unchanged.
        for (ROffer o : roffers(t->kid(0))) {
          o.result = Term::abstraction(t->names(), o.result);
          out.push_back(std::move(o));
        }
        return out;
      }
      case Op::RecVar:
        return out;
    }
    return out;
  }

 private:
  std::vector<Offer> par_offers(const TermPtr& t, ParMode mode) {
    const TermPtr& l = t->kid(0);
    const TermPtr& r = t->kid(1);
    const std::vector<Offer> lo = offers(l);
    const std::vector<Offer> ro = offers(r);
    std::vector<Offer> out;

    // Quantum operations offered on both sides must synchronise: their
    // single-side steps are suppressed in favour of the joint step.
    std::set<std::string> joint_bases;
    if (mode != ParMode::GammaOnly) {
      std::set<std::string> lq, rq;
      for (const auto& o : lo)
        if (o.label.kind == LabelKind::QuantumOp) lq.insert(o.label.name);
      for (const auto& o : ro)
        if (o.label.kind == LabelKind::QuantumOp) rq.insert(o.label.name);
      std::set_intersection(lq.begin(), lq.end(), rq.begin(), rq.end(),
                            std::inserter(joint_bases, joint_bases.begin()));
    }

    if (mode == ParMode::Full) {
      for (const Offer& o : lo) {
        if (o.label.kind == LabelKind::QuantumOp && joint_bases.count(o.label.name))
          continue;
        out.push_back({o.label, o.effect_base, rebuild_node(t->op(), o.result, r),
                       o.synced, o.keyless});
      }
      for (const Offer& o : ro) {
        if (o.label.kind == LabelKind::QuantumOp && joint_bases.count(o.label.name))
          continue;
        out.push_back({o.label, o.effect_base, rebuild_node(t->op(), l, o.result),
                       o.synced, o.keyless});
      }
    }

    if (mode != ParMode::GammaOnly) {
      for (const Offer& a : lo) {
        if (a.label.kind != LabelKind::QuantumOp || !joint_bases.count(a.label.name))
          continue;
        for (const Offer& b : ro) {
          if (b.label.kind != LabelKind::QuantumOp || b.label.name != a.label.name)
            continue;
          // The same operation executes once for both sides: one emitted
          // label, one effect, one shared key across all stamped positions.
          out.push_back({a.label, a.label.name,
                         rebuild_node(t->op(), a.result, b.result), true, false});
        }
      }
    }

    if (mode != ParMode::JointOnly) {
      for (const Offer& a : lo) {
        if (a.label.kind != LabelKind::CommAction) continue;
        for (const Offer& b : ro) {
          if (b.label.kind != LabelKind::CommAction) continue;
          if (auto g = m_.gamma_lookup(a.label.name, b.label.name)) {
            out.push_back({ActionLabel::comm(*g), *g,
                           rebuild_node(t->op(), a.result, b.result), true, false});
          }
        }
      }
    }
    return out;
  }

  std::vector<ROffer> par_roffers(const TermPtr& t) {
    const TermPtr& l = t->kid(0);
    const TermPtr& r = t->kid(1);
    const std::vector<ROffer> lo = roffers(l);
    const std::vector<ROffer> ro = roffers(r);
    const std::vector<KeyT> lkeys = histories(l);
    const std::vector<KeyT> rkeys = histories(r);
    auto holds = [](const std::vector<KeyT>& keys, KeyT k) {
      return std::binary_search(keys.begin(), keys.end(), k);
    };
    std::vector<ROffer> out;

    for (const ROffer& a : lo) {
      if (!holds(rkeys, a.key)) {
        out.push_back({a.key, a.base, rebuild_node(t->op(), a.result, r), a.synced});
        continue;
      }
      // Shared key: both sides must undo it together.  If the other side
      // cannot offer it right now (blocked behind a keyless marker), the
      // key cannot be reversed here at all.
      for (const ROffer& b : ro) {
        if (b.key != a.key) continue;
        ActionLabel base;
        if (a.base.kind == LabelKind::QuantumOp &&
            b.base.kind == LabelKind::QuantumOp && a.base.name == b.base.name) {
          base = a.base;
        } else if (a.base.kind == LabelKind::CommAction &&
                   b.base.kind == LabelKind::CommAction) {
          auto g = m_.gamma_lookup(a.base.name, b.base.name);
          if (!g) continue;  // malformed shared key: underivable
          base = ActionLabel::comm(*g);
        } else {
          continue;  // malformed shared key: underivable
        }
        out.push_back(
            {a.key, base, rebuild_node(t->op(), a.result, b.result), true});
      }
    }
    for (const ROffer& b : ro) {
      if (holds(lkeys, b.key)) continue;  // joint or blocked: handled above
      out.push_back({b.key, b.base, rebuild_node(t->op(), l, b.result), b.synced});
    }
    return out;
  }

  const Model& m_;
};

Rho step_rho(const Rho& rho, const Model& m, const std::string& effect_base) {
  if (is_symbolic(rho) || effect_base.empty()) return rho;
  return apply_effect(std::get<DensityMatrix>(rho), m.effect_of(effect_base));
}

}  // namespace

std::size_t Configuration::fingerprint() const {
  std::size_t h = term->hash();
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(rho_fingerprint(rho));
  for (const auto& [k, s] : snapshots) {
    mix(static_cast<std::size_t>(k));
    mix(rho_fingerprint(s));
  }
  return h;
}

bool config_equal(const Configuration& a, const Configuration& b) {
  if (!ac_equal(a.term, b.term)) return false;
  if (!rho_equal(a.rho, b.rho)) return false;
  if (a.snapshots.size() != b.snapshots.size()) return false;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    if (a.snapshots[i].first != b.snapshots[i].first) return false;
    if (!rho_equal(a.snapshots[i].second, b.snapshots[i].second)) return false;
  }
  return true;
}

Configuration make_config(TermPtr t, Rho rho) {
  Configuration c;
  c.term = std::move(t);
  for (KeyT k : histories(c.term)) c.snapshots.emplace_back(k, rho);
  c.rho = std::move(rho);
  return c;
}

bool config_terminated(const Configuration& c) { return terminated(c.term); }

std::vector<std::pair<ActionLabel, Configuration>> forward_steps(
    const Configuration& c, const Model& m) {
  Stepper stepper(m);
  std::vector<std::pair<ActionLabel, Configuration>> out;
  const KeyT fresh_key = next_key(c.term);
  for (const Offer& o : stepper.offers(c.term)) {
    Configuration nc;
    nc.snapshots = c.snapshots;
    if (o.keyless) {
      nc.term = subst_pending(o.result, kKeylessMarker);
    } else {
      nc.term = subst_pending(o.result, fresh_key);
      nc.snapshots.emplace_back(fresh_key, c.rho);
    }
    nc.rho = step_rho(c.rho, m, o.effect_base);
    bool dup = false;
    for (const auto& [lab, cfg] : out)
      if (lab == o.label && config_equal(cfg, nc)) { dup = true; break; }
    if (!dup) out.emplace_back(o.label, std::move(nc));
  }
  return out;
}

std::vector<std::pair<ActionLabel, Configuration>> reverse_steps(
    const Configuration& c, const Model& m) {
  std::vector<std::pair<ActionLabel, Configuration>> out;
  const KeyT maxk = c.term->max_key();
  if (maxk == 0) return out;  // nothing keyed, nothing reversible
  Stepper stepper(m);
  for (const ROffer& o : stepper.roffers(c.term)) {
    if (o.key != maxk) continue;  // strict LIFO: undo the newest key only
    if (c.snapshots.empty() || c.snapshots.back().first != maxk)
      throw std::logic_error("snapshot stack out of sync with history keys");
    Configuration nc;
    nc.term = o.result;
    nc.rho = c.snapshots.back().second;
    nc.snapshots.assign(c.snapshots.begin(), c.snapshots.end() - 1);
    ActionLabel lab = o.base.with_key(o.key);
    bool dup = false;
    for (const auto& [elab, cfg] : out)
      if (elab == lab && config_equal(cfg, nc)) { dup = true; break; }
    if (!dup) out.emplace_back(std::move(lab), std::move(nc));
  }
  return out;
}

namespace {

Lts build_lts_impl(const Configuration& c0, const Model& m, StepLimits lim,
                   bool with_reverse, bool canonical) {
  Lts lts;
  std::unordered_map<std::size_t, std::vector<int>> index;
  std::vector<std::size_t> depth;
  std::deque<int> queue;

  auto intern = [&](const Configuration& c) -> int {
    const std::size_t fp = c.fingerprint();
    for (int id : index[fp])
      if (config_equal(lts.states[static_cast<std::size_t>(id)], c)) return id;
    if (lts.states.size() >= lim.max_states) return -1;
    const int id = static_cast<int>(lts.states.size());
    lts.states.push_back(c);
    lts.terminating.push_back(config_terminated(c) ? 1 : 0);
    index[fp].push_back(id);
    return id;
  };

  const Configuration root = canonical ? fcanon(c0) : c0;
  intern(root);
  depth.push_back(0);
  queue.push_back(0);

  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const Configuration cur = lts.states[static_cast<std::size_t>(id)];  // copy: states may grow
    const std::size_t d = depth[static_cast<std::size_t>(id)];

    auto handle = [&](const std::vector<std::pair<ActionLabel, Configuration>>& steps,
                      std::vector<Lts::Edge>& edges) {
      if (d >= lim.max_depth) {
        if (!steps.empty()) lts.truncated = true;
        return;
      }
      for (const auto& [label, next] : steps) {
        const Configuration target = canonical ? fcanon(next) : next;
        const std::size_t before = lts.states.size();
        const int j = intern(target);
        if (j < 0) {
          lts.truncated = true;
          continue;
        }
        if (lts.states.size() > before) {  // newly discovered
          depth.push_back(d + 1);
          queue.push_back(j);
        }
        edges.push_back({id, label, j});
      }
    };

    handle(forward_steps(cur, m), lts.forward);
    if (with_reverse) handle(reverse_steps(cur, m), lts.reverse);
  }
  return lts;
}

}  // namespace

Lts build_lts(const Configuration& c0, const Model& m, StepLimits lim) {
  return build_lts_impl(c0, m, lim, /*with_reverse=*/true, /*canonical=*/false);
}

Lts build_forward_canonical_lts(const Configuration& c0, const Model& m,
                                StepLimits lim) {
  return build_lts_impl(c0, m, lim, /*with_reverse=*/false, /*canonical=*/true);
}

std::string export_lts(const Lts& l) {
  std::ostringstream out;
  for (const auto& e : l.forward)
    out << "F " << e.src << " " << e.label.render() << " " << e.dst << "\n";
  for (const auto& e : l.reverse)
    out << "R " << e.src << " " << e.label.render() << " " << e.dst << "\n";
  for (std::size_t i = 0; i < l.terminating.size(); ++i)
    if (l.terminating[i]) out << "T " << i << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Forward canonicalization
// ---------------------------------------------------------------------------

namespace {

TermPtr done_marker() {
  static const TermPtr t = Term::atom(ActionLabel::tau().with_key(kKeylessMarker));
  return t;
}

TermPtr fc(const TermPtr& t) {
  if (terminated(t)) return done_marker();
  switch (t->op()) {
    case Op::Atom:
    case Op::RecVar:
      return t;
    case Op::Sum: {
      const int ci = committed_summand(t);
      if (ci >= 0) return fc(t->kid(static_cast<std::size_t>(ci)));
      std::vector<TermPtr> kids;
      kids.reserve(t->kids().size());
      for (const auto& k : t->kids()) kids.push_back(fc(k));
      return Term::sum(std::move(kids));
    }
    case Op::Seq: {
      if (terminated(t->kid(0))) return fc(t->kid(1));
      return Term::seq(fc(t->kid(0)), fc(t->kid(1)));
    }
    case Op::StaticPar:
    case Op::Parallel: {
      TermPtr a = fc(t->kid(0)), b = fc(t->kid(1));
      if (cmp(b, a) < 0) std::swap(a, b);
      return Term::spar(a, b);
    }
    case Op::CommMerge:
    case Op::EntMerge: {
      TermPtr a = fc(t->kid(0)), b = fc(t->kid(1));
      if (cmp(b, a) < 0) std::swap(a, b);
      if (t->kid(0)->has_executed() && t->kid(1)->has_executed())
        return Term::spar(a, b);  // merged nodes continue with | power
      return t->op() == Op::CommMerge ? Term::cmerge(a, b) : Term::emerge(a, b);
    }
    case Op::Encap:
      return Term::encap(t->names(), fc(t->kid(0)));
    case Op::Abstract:
      return Term::abstraction(t->names(), fc(t->kid(0)));
  }
  return t;
}

TermPtr renumber(const TermPtr& t, const std::unordered_map<KeyT, KeyT>& map) {
  switch (t->op()) {
    case Op::Atom: {
      const ActionLabel& l = t->label();
      if (!l.is_history()) return t;
      return Term::atom(l.with_key(map.at(*l.key)));
    }
    case Op::RecVar:
      return t;
    case Op::Sum: {
      std::vector<TermPtr> kids;
      kids.reserve(t->kids().size());
      for (const auto& k : t->kids()) kids.push_back(renumber(k, map));
      return Term::sum(std::move(kids));
    }
    case Op::Seq:
      return Term::seq(renumber(t->kid(0), map), renumber(t->kid(1), map));
    case Op::StaticPar:
      return Term::spar(renumber(t->kid(0), map), renumber(t->kid(1), map));
    case Op::CommMerge:
      return Term::cmerge(renumber(t->kid(0), map), renumber(t->kid(1), map));
    case Op::EntMerge:
      return Term::emerge(renumber(t->kid(0), map), renumber(t->kid(1), map));
    case Op::Parallel:
      return Term::par(renumber(t->kid(0), map), renumber(t->kid(1), map));
    case Op::Encap:
      return Term::encap(t->names(), renumber(t->kid(0), map));
    case Op::Abstract:
      return Term::abstraction(t->names(), renumber(t->kid(0), map));
  }
  return t;
}

}  // namespace

TermPtr fcanon_term(const TermPtr& t) {
  TermPtr s = fc(t);
  const std::vector<KeyT> keys = histories(s);
  if (keys.empty()) return s;
  std::unordered_map<KeyT, KeyT> map;
  KeyT next = 1;
  for (KeyT k : keys) map.emplace(k, next++);
  return renumber(s, map);
}

Configuration fcanon(const Configuration& c) {
  return make_config(fcanon_term(c.term), c.rho);
}

}  // namespace rqpap
