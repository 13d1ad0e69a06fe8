#include "rqpap/rewrite.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rqpap/parser.hpp"

namespace rqpap {

const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::RQP1: return "RQP1";
    case RuleId::RQP2: return "RQP2";
    case RuleId::RQP3: return "RQP3";
    case RuleId::RQP4: return "RQP4";
    case RuleId::RQP5: return "RQP5";
    case RuleId::RQP6: return "RQP6";
    case RuleId::RQP7: return "RQP7";
    case RuleId::RQC8: return "RQC8";
    case RuleId::RQC9: return "RQC9";
    case RuleId::RQC10: return "RQC10";
    case RuleId::RQC11: return "RQC11";
    case RuleId::RQC12: return "RQC12";
    case RuleId::RQC13: return "RQC13";
    case RuleId::RQC14: return "RQC14";
    case RuleId::RQC15: return "RQC15";
    case RuleId::RQC16: return "RQC16";
    case RuleId::RQC17: return "RQC17";
    case RuleId::RQE18: return "RQE18";
    case RuleId::RQE19: return "RQE19";
    case RuleId::RQE20: return "RQE20";
    case RuleId::RQE21: return "RQE21";
    case RuleId::RQE22: return "RQE22";
    case RuleId::RQE23: return "RQE23";
    case RuleId::RQE24: return "RQE24";
    case RuleId::RQE25: return "RQE25";
    case RuleId::RQE26: return "RQE26";
    case RuleId::RQE27: return "RQE27";
    case RuleId::RQE28: return "RQE28";
    case RuleId::RQE29: return "RQE29";
    case RuleId::RQE30: return "RQE30";
    case RuleId::RQE31: return "RQE31";
    case RuleId::RQE32: return "RQE32";
    case RuleId::RQE33: return "RQE33";
    case RuleId::RQE34: return "RQE34";
    case RuleId::RQE35: return "RQE35";
    case RuleId::RQE36: return "RQE36";
    case RuleId::RQE37: return "RQE37";
    case RuleId::BaseIdem: return "BASE-IDEM";
    case RuleId::BaseDeltaAbs: return "BASE-DELTA-ABS";
    case RuleId::BaseDeltaSeq: return "BASE-DELTA-SEQ";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
//  Pattern helpers.
// ---------------------------------------------------------------------------

bool is_delta_term(const TermPtr& t) {
  return t->op() == Op::Atom && t->label().is_delta();
}

// A fresh atom of any kind (action, tau, delta): no key stamped.
bool fresh_atom(const TermPtr& t) {
  return t->op() == Op::Atom && t->label().is_fresh();
}

// A fresh action atom (upsilon/omega in the axiom schemas): delta excluded.
bool fresh_act(const TermPtr& t) {
  return fresh_atom(t) && !t->label().is_delta();
}

// A history atom upsilon[m] with a proper (reversible) key.
bool hist_act(const TermPtr& t) {
  return t->op() == Op::Atom && t->label().is_history();
}

// (upsilon . x): a sequence headed by a fresh action atom.
bool seq_fresh_head(const TermPtr& t) {
  return t->op() == Op::Seq && fresh_act(t->kid(0));
}

// (upsilon[m] . x): a sequence headed by a history atom.
bool seq_hist_head(const TermPtr& t) {
  return t->op() == Op::Seq && hist_act(t->kid(0));
}

const ActionLabel& head_label(const TermPtr& t) {
  return t->op() == Op::Seq ? t->kid(0)->label() : t->label();
}

TermPtr gamma_atom(const Model& m, const ActionLabel& a, const ActionLabel& b) {
  auto g = m.gamma_lookup(a.name, b.name);
  if (!g) return nullptr;
  ActionLabel lab = ActionLabel::comm(*g);
  if (a.key) lab = lab.with_key(*a.key);
  return Term::atom(lab);
}

using Match = std::optional<std::pair<RuleId, TermPtr>>;

Match match_emerge(const TermPtr& t, const Model&) {
  const TermPtr& l = t->kid(0);
  const TermPtr& r = t->kid(1);
  const TermPtr d = Term::delta();
  // Deadlock table first (mismatching labels / deadlock operands).
  if (fresh_act(l) && fresh_act(r) && l->label() != r->label())
    return {{RuleId::RQE28, d}};
  if (hist_act(l) && hist_act(r) && l->label() != r->label())
    return {{RuleId::RQE29, d}};
  if (is_delta_term(l)) return {{RuleId::RQE30, d}};
  if (is_delta_term(r)) return {{RuleId::RQE31, d}};
  if (fresh_act(l) && seq_fresh_head(r) && l->label() != head_label(r))
    return {{RuleId::RQE32, d}};
  if (hist_act(l) && seq_hist_head(r) && l->label() != head_label(r))
    return {{RuleId::RQE33, d}};
  if (seq_fresh_head(l) && fresh_act(r) && head_label(l) != r->label())
    return {{RuleId::RQE34, d}};
  if (seq_hist_head(l) && hist_act(r) && head_label(l) != r->label())
    return {{RuleId::RQE35, d}};
  if (seq_fresh_head(l) && seq_fresh_head(r) && head_label(l) != head_label(r))
    return {{RuleId::RQE36, d}};
  if (seq_hist_head(l) && seq_hist_head(r) && head_label(l) != head_label(r))
    return {{RuleId::RQE37, d}};
  // Matching-label entanglement rules.
  if (fresh_act(l) && fresh_act(r) && l->label() == r->label())
    return {{RuleId::RQE18, l}};
  if (hist_act(l) && hist_act(r) && l->label() == r->label())
    return {{RuleId::RQE19, l}};
  if (fresh_act(l) && seq_fresh_head(r) && l->label() == head_label(r))
    return {{RuleId::RQE20, r}};
  if (hist_act(l) && seq_hist_head(r) && l->label() == head_label(r))
    return {{RuleId::RQE21, r}};
  if (seq_fresh_head(l) && fresh_act(r) && head_label(l) == r->label())
    return {{RuleId::RQE22, l}};
  if (seq_hist_head(l) && hist_act(r) && head_label(l) == r->label())
    return {{RuleId::RQE23, l}};
  if (seq_fresh_head(l) && seq_fresh_head(r) && head_label(l) == head_label(r))
    return {{RuleId::RQE24,
             Term::seq(l->kid(0), Term::par(l->kid(1), r->kid(1)))}};
  if (seq_hist_head(l) && seq_hist_head(r) && head_label(l) == head_label(r))
    return {{RuleId::RQE25,
             Term::seq(l->kid(0), Term::par(l->kid(1), r->kid(1)))}};
  // Distribution over sums.
  if (l->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : l->kids()) ks.push_back(Term::emerge(s, r));
    return {{RuleId::RQE26, Term::sum(std::move(ks))}};
  }
  if (r->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : r->kids()) ks.push_back(Term::emerge(l, s));
    return {{RuleId::RQE27, Term::sum(std::move(ks))}};
  }
  return std::nullopt;
}

Match match_cmerge(const TermPtr& t, const Model& m) {
  const TermPtr& l = t->kid(0);
  const TermPtr& r = t->kid(1);
  const TermPtr d = Term::delta();
  // Fresh redexes: an undefined gamma means the merge can never take its
  // first step, so it rewrites to deadlock under the same rule.
  if (fresh_atom(l) && fresh_atom(r)) {
    TermPtr g = gamma_atom(m, l->label(), r->label());
    return {{RuleId::RQC8, g ? g : d}};
  }
  if (hist_act(l) && hist_act(r) && l->label().key == r->label().key)
    if (TermPtr g = gamma_atom(m, l->label(), r->label()))
      return {{RuleId::RQC9, g}};
  if (fresh_atom(l) && seq_fresh_head(r)) {
    TermPtr g = gamma_atom(m, l->label(), head_label(r));
    return {{RuleId::RQC10, g ? Term::seq(g, r->kid(1)) : d}};
  }
  if (hist_act(l) && seq_hist_head(r) &&
      l->label().key == head_label(r).key)
    if (TermPtr g = gamma_atom(m, l->label(), head_label(r)))
      return {{RuleId::RQC11, Term::seq(g, r->kid(1))}};
  if (seq_fresh_head(l) && fresh_atom(r)) {
    TermPtr g = gamma_atom(m, head_label(l), r->label());
    return {{RuleId::RQC12, g ? Term::seq(g, l->kid(1)) : d}};
  }
  if (seq_hist_head(l) && hist_act(r) &&
      head_label(l).key == r->label().key)
    if (TermPtr g = gamma_atom(m, head_label(l), r->label()))
      return {{RuleId::RQC13, Term::seq(g, l->kid(1))}};
  if (seq_fresh_head(l) && seq_fresh_head(r)) {
    TermPtr g = gamma_atom(m, head_label(l), head_label(r));
    return {{RuleId::RQC14,
             g ? Term::seq(g, Term::par(l->kid(1), r->kid(1))) : d}};
  }
  if (seq_hist_head(l) && seq_hist_head(r) &&
      head_label(l).key == head_label(r).key)
    if (TermPtr g = gamma_atom(m, head_label(l), head_label(r)))
      return {{RuleId::RQC15,
               Term::seq(g, Term::par(l->kid(1), r->kid(1)))}};
  if (l->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : l->kids()) ks.push_back(Term::cmerge(s, r));
    return {{RuleId::RQC16, Term::sum(std::move(ks))}};
  }
  if (r->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : r->kids()) ks.push_back(Term::cmerge(l, s));
    return {{RuleId::RQC17, Term::sum(std::move(ks))}};
  }
  return std::nullopt;
}

Match match_spar(const TermPtr& t, const Model&) {
  const TermPtr& l = t->kid(0);
  const TermPtr& r = t->kid(1);
  if (ac_equal(l, r)) return {{RuleId::RQP2, l}};
  if (l->op() == Op::StaticPar)
    return {{RuleId::RQP3,
             Term::spar(l->kid(0), Term::spar(l->kid(1), r))}};
  if (r->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : r->kids()) ks.push_back(Term::spar(l, s));
    return {{RuleId::RQP4, Term::sum(std::move(ks))}};
  }
  if (l->op() == Op::Sum) {
    std::vector<TermPtr> ks;
    for (const TermPtr& s : l->kids()) ks.push_back(Term::spar(s, r));
    return {{RuleId::RQP5, Term::sum(std::move(ks))}};
  }
  return std::nullopt;
}

Match match_seq(const TermPtr& t, const Model&) {
  const TermPtr& l = t->kid(0);
  const TermPtr& r = t->kid(1);
  if (r->op() == Op::StaticPar)
    return {{RuleId::RQP6,
             Term::spar(Term::seq(l, r->kid(0)), Term::seq(l, r->kid(1)))}};
  if (l->op() == Op::StaticPar)
    return {{RuleId::RQP7,
             Term::spar(Term::seq(l->kid(0), r), Term::seq(l->kid(1), r))}};
  if (is_delta_term(l)) return {{RuleId::BaseDeltaSeq, Term::delta()}};
  return std::nullopt;
}

Match match_sum(const TermPtr& t, const Model&) {
  const auto& ks = t->kids();
  // x + x = x: drop duplicate summands (kids are sorted, so equal summands
  // are adjacent).
  bool dup = false;
  for (std::size_t i = 0; i + 1 < ks.size() && !dup; ++i)
    if (cmp(ks[i], ks[i + 1]) == 0) dup = true;
  if (dup) {
    std::vector<TermPtr> uniq;
    for (const TermPtr& k : ks)
      if (uniq.empty() || cmp(uniq.back(), k) != 0) uniq.push_back(k);
    return {{RuleId::BaseIdem, Term::sum(std::move(uniq))}};
  }
  // x + delta = x: drop deadlock summands while something else remains.
  bool has_delta = false, has_other = false;
  for (const TermPtr& k : ks) (is_delta_term(k) ? has_delta : has_other) = true;
  if (has_delta && has_other) {
    std::vector<TermPtr> live;
    for (const TermPtr& k : ks)
      if (!is_delta_term(k)) live.push_back(k);
    return {{RuleId::BaseDeltaAbs, Term::sum(std::move(live))}};
  }
  return std::nullopt;
}

Match match_node(const TermPtr& t, const Model& m) {
  switch (t->op()) {
    case Op::Parallel:
      return {{RuleId::RQP1,
               Term::sum({Term::spar(t->kid(0), t->kid(1)),
                          Term::cmerge(t->kid(0), t->kid(1)),
                          Term::emerge(t->kid(0), t->kid(1))})}};
    case Op::EntMerge:
      return match_emerge(t, m);
    case Op::CommMerge:
      return match_cmerge(t, m);
    case Op::StaticPar:
      return match_spar(t, m);
    case Op::Seq:
      return match_seq(t, m);
    case Op::Sum:
      return match_sum(t, m);
    default:
      return std::nullopt;
  }
}

struct Candidate {
  std::vector<int> path;
  RuleId rule;
  TermPtr redex;
  TermPtr replacement;
};

// Innermost strategy: a node is a candidate only if no descendant is.
void collect_innermost(const TermPtr& t, const Model& m,
                       std::vector<int>& path, std::vector<Candidate>& out) {
  const std::size_t before = out.size();
  for (std::size_t i = 0; i < t->kids().size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_innermost(t->kid(i), m, path, out);
    path.pop_back();
  }
  if (out.size() != before) return;
  if (Match r = match_node(t, m))
    out.push_back({path, r->first, t, r->second});
}

TermPtr rebuild(const TermPtr& t, const std::vector<int>& path, std::size_t i,
                const TermPtr& repl) {
  if (i == path.size()) return repl;
  std::vector<TermPtr> ks(t->kids().begin(), t->kids().end());
  ks[static_cast<std::size_t>(path[i])] =
      rebuild(t->kid(static_cast<std::size_t>(path[i])), path, i + 1, repl);
  switch (t->op()) {
    case Op::Sum:
      return Term::sum(std::move(ks));
    case Op::Seq:
      return Term::seq(ks[0], ks[1]);
    case Op::StaticPar:
      return Term::spar(ks[0], ks[1]);
    case Op::CommMerge:
      return Term::cmerge(ks[0], ks[1]);
    case Op::EntMerge:
      return Term::emerge(ks[0], ks[1]);
    case Op::Parallel:
      return Term::par(ks[0], ks[1]);
    default:
      throw std::logic_error("rebuild: unexpected operator");
  }
}

std::string render_path(const std::vector<int>& path) {
  if (path.empty()) return "/";
  std::string s;
  for (int i : path) s += "/" + std::to_string(i);
  return s;
}

void require_algebraic(const TermPtr& t) {
  if (!algebraic(t))
    throw std::invalid_argument(
        "normalization is defined on the algebraic fragment only "
        "(no recursion variables, encapsulation, or abstraction)");
}

}  // namespace

std::optional<SingleRewrite> rewrite_once(const TermPtr& t, const Model& m,
                                          std::mt19937_64* rng) {
  require_algebraic(t);
  std::vector<Candidate> cands;
  std::vector<int> path;
  collect_innermost(t, m, path, cands);
  if (cands.empty()) return std::nullopt;
  std::size_t pick = 0;
  if (rng && cands.size() > 1)
    pick = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(*rng);
  const Candidate& c = cands[pick];
  SingleRewrite out;
  out.result = rebuild(t, c.path, 0, c.replacement);
  out.step = {c.rule, render_path(c.path), weight(c.redex),
              weight(c.replacement)};
  return out;
}

NormalizeResult normalize(const TermPtr& t, const Model& m, std::size_t fuel,
                          std::mt19937_64* rng) {
  require_algebraic(t);
  NormalizeResult res;
  res.term = ac_canonical(t);
  std::set<std::string> seen{render(res.term)};
  for (std::size_t i = 0; i < fuel; ++i) {
    auto one = rewrite_once(res.term, m, rng);
    if (!one) return res;
    res.term = one->result;
    res.trace.steps.push_back(one->step);
    if (!seen.insert(render(res.term)).second) {
      res.complete = false;
      res.stop_reason = "cycle detected";
      return res;
    }
  }
  if (rewrite_once(res.term, m, rng)) {
    res.complete = false;
    res.stop_reason = "fuel exhausted";
  }
  return res;
}

bool axiom_equal(const TermPtr& s, const TermPtr& t, const Model& m) {
  NormalizeResult ns = normalize(s, m);
  NormalizeResult nt = normalize(t, m);
  if (!ns.complete || !nt.complete)
    throw std::runtime_error("axiom_equal: normalization did not complete (" +
                             (ns.complete ? nt.stop_reason : ns.stop_reason) +
                             ")");
  return ac_equal(ns.term, nt.term);
}

std::string RewriteTrace::render() const {
  std::ostringstream os;
  for (const RewriteStep& s : steps)
    os << rule_name(s.rule) << " @ " << s.path << " : " << s.before << " -> "
       << s.after << "\n";
  return os.str();
}

WeightAudit weight_audit(const RewriteTrace& trace) {
  WeightAudit audit;
  audit.steps = trace.steps.size();
  for (const RewriteStep& s : trace.steps) {
    const bool decrease = s.after < s.before;
    const bool asserted =
        s.rule != RuleId::RQP6 && s.rule != RuleId::RQP7 &&
        s.rule != RuleId::BaseIdem && s.rule != RuleId::BaseDeltaAbs &&
        s.rule != RuleId::BaseDeltaSeq;
    if (!decrease) {
      audit.flagged.push_back({s, decrease, asserted});
      if (asserted) ++audit.violations;
    }
  }
  return audit;
}

}  // namespace rqpap
