#include "rqpap/bisim.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rqpap {
namespace {

// ---------------------------------------------------------------------------
//  Shared machinery: a disjoint union of LTSs with interned labels.
// ---------------------------------------------------------------------------

struct Move {
  int kind;  // 0 = forward, 1 = reverse
  int lab;
  int dst;
  bool operator<(const Move& o) const {
    return std::tie(kind, lab, dst) < std::tie(o.kind, o.lab, o.dst);
  }
  bool operator==(const Move& o) const {
    return kind == o.kind && lab == o.lab && dst == o.dst;
  }
};

struct Arena {
  int n = 0;
  std::vector<std::vector<Move>> mv;  // sorted, deduplicated
  std::vector<char> fin;
  std::vector<int> roots;                              // one per input LTS
  std::vector<std::pair<int, ActionLabel>> lab_names;  // id -> (kind, label)
};

void require_complete(const Lts& l) {
  if (l.truncated)
    throw std::invalid_argument(
        "equivalence checking requires complete transition systems "
        "(input was truncated by a step limit)");
}

Arena combine(const std::vector<const Lts*>& ls) {
  Arena a;
  std::map<std::pair<int, ActionLabel>, int> ids;
  auto lab_of = [&](int kind, const ActionLabel& l) {
    auto key = std::make_pair(kind, l);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(ids.size());
    ids.emplace(key, id);
    a.lab_names.push_back(key);
    return id;
  };
  int off = 0;
  for (const Lts* l : ls) {
    require_complete(*l);
    a.roots.push_back(off + l->root);
    a.mv.resize(off + l->num_states());
    a.fin.insert(a.fin.end(), l->terminating.begin(), l->terminating.end());
    for (const auto& e : l->forward)
      a.mv[off + e.src].push_back({0, lab_of(0, e.label), off + e.dst});
    for (const auto& e : l->reverse)
      a.mv[off + e.src].push_back({1, lab_of(1, e.label), off + e.dst});
    off += static_cast<int>(l->num_states());
  }
  a.n = off;
  for (auto& v : a.mv) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return a;
}

int distinct_count(const std::vector<int>& blk) {
  std::set<int> s(blk.begin(), blk.end());
  return static_cast<int>(s.size());
}

// Signature-based partition refinement.  Returns the block vector after each
// round (level 0 splits on the termination predicate alone); the last level
// is the fixpoint.  New block ids are assigned in state order, so the result
// is deterministic.
std::vector<std::vector<int>> refine_levels(const Arena& a) {
  std::vector<std::vector<int>> levels;
  std::vector<int> blk(a.n);
  for (int i = 0; i < a.n; ++i) blk[i] = a.fin[i] ? 1 : 0;
  levels.push_back(blk);
  while (true) {
    std::map<std::pair<int, std::vector<std::array<int, 3>>>, int> sig_ids;
    std::vector<int> nb(a.n);
    for (int i = 0; i < a.n; ++i) {
      std::vector<std::array<int, 3>> sig;
      sig.reserve(a.mv[i].size());
      for (const Move& m : a.mv[i])
        sig.push_back({m.kind, m.lab, blk[m.dst]});
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto key = std::make_pair(blk[i], std::move(sig));
      auto it = sig_ids.find(key);
      if (it == sig_ids.end())
        it = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size()))
                 .first;
      nb[i] = it->second;
    }
    if (distinct_count(nb) == distinct_count(blk)) break;  // splits only
    blk = std::move(nb);
    levels.push_back(blk);
  }
  return levels;
}

std::string render_move(const std::pair<int, ActionLabel>& lab) {
  return (lab.first == 1 ? "rev " : "fwd ") + lab.second.render();
}

// Builds a linear distinguishing experiment from the refinement levels: at
// the first level where the two states part ways there is a move one side
// has whose every same-labeled counterpart lands in an already-separated
// block; follow the cheapest counterpart and recurse.
struct Distinguisher {
  const Arena& a;
  const std::vector<std::vector<int>>& lv;

  int split_level(int s, int t) const {
    for (std::size_t k = 0; k < lv.size(); ++k)
      if (lv[k][s] != lv[k][t]) return static_cast<int>(k);
    return -1;
  }

  std::string experiment(int s, int t) const {
    int level = split_level(s, t);
    if (level <= 0) return a.fin[s] ? "P" : "not P";
    const std::vector<int>& prev = lv[level - 1];
    for (int side = 0; side < 2; ++side) {
      int x = side ? t : s;
      int y = side ? s : t;
      for (const Move& m : a.mv[x]) {
        bool all_separated = true;
        bool any = false;
        int best = -1;
        int best_level = INT_MAX;
        for (const Move& m2 : a.mv[y]) {
          if (m2.kind != m.kind || m2.lab != m.lab) continue;
          any = true;
          if (prev[m.dst] == prev[m2.dst]) {
            all_separated = false;
            break;
          }
          int sl = split_level(m.dst, m2.dst);
          if (sl >= 0 && sl < best_level) {
            best_level = sl;
            best = m2.dst;
          }
        }
        if (!all_separated) continue;
        std::string head =
            (side ? std::string("(right) ") : std::string()) +
            render_move(a.lab_names[m.lab]);
        if (!any) return head + " (unmatched)";
        return head + " then " +
               (side ? experiment(best, m.dst) : experiment(m.dst, best));
      }
    }
    return "(states separated, but no single-move experiment found)";
  }
};

EquivalenceVerdict verdict_from_blocks(const Lts& a, const Lts& b,
                                       const Arena& ar,
                                       const std::vector<std::vector<int>>& lv) {
  const std::vector<int>& blk = lv.back();
  const int n1 = static_cast<int>(a.num_states());
  EquivalenceVerdict v;
  v.related = blk[ar.roots[0]] == blk[ar.roots[1]];
  if (v.related) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < static_cast<int>(b.num_states()); ++j)
        if (blk[i] == blk[n1 + j]) v.witness.emplace_back(i, j);
  } else {
    v.distinguishing = Distinguisher{ar, lv}.experiment(ar.roots[0], ar.roots[1]);
  }
  return v;
}

// ---------------------------------------------------------------------------
//  Branching clauses.  Works directly on a pair of LTSs; stuttering closures
//  are precomputed.  The same checker drives the fixpoint and the witness
//  validator.
// ---------------------------------------------------------------------------

struct BrMove {
  ActionLabel label;
  int dst;
};

struct BrSide {
  std::vector<std::vector<BrMove>> fwd, rev;
  std::vector<char> fin;
  std::vector<std::vector<int>> fwd_tau_reach;  // includes the state itself
  std::vector<std::vector<int>> rev_tau_reach;  // includes the state itself
};

std::vector<std::vector<int>> tau_closure(
    int n, const std::vector<std::vector<BrMove>>& moves) {
  std::vector<std::vector<int>> reach(n);
  for (int s = 0; s < n; ++s) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      reach[s].push_back(cur);
      for (const BrMove& m : moves[cur])
        if (m.label.is_tau() && !seen[m.dst]) {
          seen[m.dst] = 1;
          stack.push_back(m.dst);
        }
    }
    std::sort(reach[s].begin(), reach[s].end());
  }
  return reach;
}

BrSide make_side(const Lts& l) {
  require_complete(l);
  BrSide s;
  int n = static_cast<int>(l.num_states());
  s.fwd.resize(n);
  s.rev.resize(n);
  s.fin.assign(l.terminating.begin(), l.terminating.end());
  for (const auto& e : l.forward) s.fwd[e.src].push_back({e.label, e.dst});
  for (const auto& e : l.reverse) s.rev[e.src].push_back({e.label, e.dst});
  s.fwd_tau_reach = tau_closure(n, s.fwd);
  s.rev_tau_reach = tau_closure(n, s.rev);
  return s;
}

using Rel = std::function<bool(int, int)>;

// One direction of the branching clauses: every move/termination of state i
// (in side `a`) must be answered by state j (in side `b`), where `rel(x, y)`
// reads "x of side a is related to y of side b".
bool branching_half_ok(const BrSide& a, const BrSide& b, int i, int j,
                       const Rel& rel, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  // Forward moves, up to forward tau-stuttering on the answering side.
  for (const BrMove& m : a.fwd[i]) {
    if (m.label.is_tau() && rel(m.dst, j)) continue;
    bool found = false;
    for (int j0 : b.fwd_tau_reach[j]) {
      if (!rel(i, j0)) continue;
      for (const BrMove& m2 : b.fwd[j0])
        if (m2.label == m.label && rel(m.dst, m2.dst)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found)
      return fail("forward " + m.label.render() + " has no branching match");
  }
  // Termination, up to forward tau-stuttering.
  if (a.fin[i]) {
    bool found = false;
    for (int j0 : b.fwd_tau_reach[j])
      if (rel(i, j0) && b.fin[j0]) {
        found = true;
        break;
      }
    if (!found) return fail("termination has no forward-stuttering match");
  }
  // Reverse moves, up to reverse tau-stuttering on the answering side.
  // Silent steps take no history key here, so reverse tau-transitions do not
  // occur and the closure is the identity; the clause then demands an exact
  // reverse answer.
  for (const BrMove& m : a.rev[i]) {
    if (m.label.is_tau() && rel(m.dst, j)) continue;
    bool found = false;
    for (int j0 : b.rev_tau_reach[j]) {
      if (!rel(i, j0)) continue;
      for (const BrMove& m2 : b.rev[j0])
        if (m2.label == m.label && rel(m.dst, m2.dst)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found)
      return fail("reverse " + m.label.render() + " has no branching match");
  }
  // Termination, up to reverse tau-stuttering (identity in practice).
  if (a.fin[i]) {
    bool found = false;
    for (int j0 : b.rev_tau_reach[j])
      if (rel(i, j0) && b.fin[j0]) {
        found = true;
        break;
      }
    if (!found) return fail("termination has no reverse-stuttering match");
  }
  return true;
}

bool branching_pair_ok(const BrSide& s1, const BrSide& s2, int i, int j,
                       const Rel& rel, std::string* why) {
  Rel flip = [&rel](int x, int y) { return rel(y, x); };
  if (!branching_half_ok(s1, s2, i, j, rel, why)) {
    if (why) *why = "left state " + std::to_string(i) + " vs right state " +
                    std::to_string(j) + ": " + *why;
    return false;
  }
  if (!branching_half_ok(s2, s1, j, i, flip, why)) {
    if (why) *why = "right state " + std::to_string(j) + " vs left state " +
                    std::to_string(i) + ": " + *why;
    return false;
  }
  return true;
}

struct BranchingResult {
  std::vector<std::vector<char>> rel;  // n1 x n2
  std::string root_reason;             // why the root pair fell, if it did
};

BranchingResult branching_fixpoint(const Lts& a, const Lts& b,
                                   const BrSide& s1, const BrSide& s2) {
  const int n1 = static_cast<int>(a.num_states());
  const int n2 = static_cast<int>(b.num_states());
  BranchingResult out;
  out.rel.assign(n1, std::vector<char>(n2, 1));
  Rel rel = [&out](int x, int y) { return out.rel[x][y] != 0; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        if (!out.rel[i][j]) continue;
        std::string why;
        if (!branching_pair_ok(s1, s2, i, j, rel, &why)) {
          out.rel[i][j] = 0;
          changed = true;
          if (i == a.root && j == b.root) out.root_reason = why;
        }
      }
  }
  return out;
}

EquivalenceVerdict verdict_from_rel(const Lts& a, const Lts& b,
                                    const std::vector<std::vector<char>>& rel,
                                    const std::string& reason) {
  EquivalenceVerdict v;
  v.related = rel[a.root][b.root] != 0;
  if (v.related) {
    for (int i = 0; i < static_cast<int>(a.num_states()); ++i)
      for (int j = 0; j < static_cast<int>(b.num_states()); ++j)
        if (rel[i][j]) v.witness.emplace_back(i, j);
  } else {
    v.distinguishing =
        reason.empty() ? "the roots satisfy no common branching relation"
                       : reason;
  }
  return v;
}

// Exact matching of the transitions out of the two roots, landing in
// branching-related states; used by the rooted check on top of the
// branching fixpoint.
bool roots_match_exactly(const Lts& a, const Lts& b, const BrSide& s1,
                         const BrSide& s2,
                         const std::vector<std::vector<char>>& rel,
                         std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = "at the roots: " + msg;
    return false;
  };
  if (s1.fin[a.root] != s2.fin[b.root])
    return fail("termination differs");
  auto half = [&](const std::vector<BrMove>& from,
                  const std::vector<BrMove>& onto, bool left_moves) {
    for (const BrMove& m : from) {
      bool found = false;
      for (const BrMove& m2 : onto)
        if (m2.label == m.label &&
            (left_moves ? rel[m.dst][m2.dst] : rel[m2.dst][m.dst])) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  if (!half(s1.fwd[a.root], s2.fwd[b.root], true))
    return fail("a forward root transition of the left system is unmatched");
  if (!half(s2.fwd[b.root], s1.fwd[a.root], false))
    return fail("a forward root transition of the right system is unmatched");
  if (!half(s1.rev[a.root], s2.rev[b.root], true))
    return fail("a reverse root transition of the left system is unmatched");
  if (!half(s2.rev[b.root], s1.rev[a.root], false))
    return fail("a reverse root transition of the right system is unmatched");
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
//  Strong forward-reverse bisimilarity.
// ---------------------------------------------------------------------------

EquivalenceVerdict fr_bisimilar(const Lts& a, const Lts& b) {
  Arena ar = combine({&a, &b});
  auto levels = refine_levels(ar);
  return verdict_from_blocks(a, b, ar, levels);
}

EquivalenceVerdict fr_bisimilar_naive(const Lts& a, const Lts& b) {
  Arena ar = combine({&a, &b});
  const int n1 = static_cast<int>(a.num_states());
  const int n2 = static_cast<int>(b.num_states());
  std::vector<std::vector<char>> R(n1, std::vector<char>(n2, 0));
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      R[i][j] = ar.fin[i] == ar.fin[n1 + j];
  std::string root_reason =
      R[a.root][b.root] ? std::string()
                        : std::string("termination differs at the roots");
  auto matches = [&](int i, int j, std::string* why) {
    for (const Move& m : ar.mv[i]) {
      bool found = false;
      for (const Move& m2 : ar.mv[n1 + j])
        if (m2.kind == m.kind && m2.lab == m.lab && R[m.dst][m2.dst - n1]) {
          found = true;
          break;
        }
      if (!found) {
        if (why)
          *why = render_move(ar.lab_names[m.lab]) +
                 " of the left system has no strong match";
        return false;
      }
    }
    for (const Move& m : ar.mv[n1 + j]) {
      bool found = false;
      for (const Move& m2 : ar.mv[i])
        if (m2.kind == m.kind && m2.lab == m.lab && R[m2.dst][m.dst - n1]) {
          found = true;
          break;
        }
      if (!found) {
        if (why)
          *why = render_move(ar.lab_names[m.lab]) +
                 " of the right system has no strong match";
        return false;
      }
    }
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        if (!R[i][j]) continue;
        std::string why;
        if (!matches(i, j, &why)) {
          R[i][j] = 0;
          changed = true;
          if (i == a.root && j == b.root) root_reason = why;
        }
      }
  }
  return verdict_from_rel(a, b, R, root_reason);
}

// ---------------------------------------------------------------------------
//  Branching and rooted branching.
// ---------------------------------------------------------------------------

EquivalenceVerdict branching_fr_bisimilar(const Lts& a, const Lts& b) {
  BrSide s1 = make_side(a), s2 = make_side(b);
  BranchingResult r = branching_fixpoint(a, b, s1, s2);
  return verdict_from_rel(a, b, r.rel, r.root_reason);
}

EquivalenceVerdict rooted_branching_fr_bisimilar(const Lts& a, const Lts& b) {
  BrSide s1 = make_side(a), s2 = make_side(b);
  BranchingResult r = branching_fixpoint(a, b, s1, s2);
  EquivalenceVerdict v;
  std::string why;
  if (!roots_match_exactly(a, b, s1, s2, r.rel, &why)) {
    v.related = false;
    v.distinguishing = why;
    return v;
  }
  v.related = true;
  v.witness.emplace_back(a.root, b.root);
  for (int i = 0; i < static_cast<int>(a.num_states()); ++i)
    for (int j = 0; j < static_cast<int>(b.num_states()); ++j)
      if (r.rel[i][j]) v.witness.emplace_back(i, j);
  std::sort(v.witness.begin(), v.witness.end());
  v.witness.erase(std::unique(v.witness.begin(), v.witness.end()),
                  v.witness.end());
  return v;
}

EquivalenceVerdict check_equivalence(const Lts& a, const Lts& b, EqMode mode) {
  switch (mode) {
    case EqMode::Fr:
      return fr_bisimilar(a, b);
    case EqMode::Branching:
      return branching_fr_bisimilar(a, b);
    case EqMode::Rooted:
      return rooted_branching_fr_bisimilar(a, b);
  }
  throw std::logic_error("unknown equivalence mode");
}

// ---------------------------------------------------------------------------
//  Witness validation.
// ---------------------------------------------------------------------------

bool validate_witness(const Lts& a, const Lts& b, const EquivalenceVerdict& v,
                      EqMode mode) {
  if (!v.related) return false;
  std::set<std::pair<int, int>> pairs(v.witness.begin(), v.witness.end());
  if (!pairs.count({a.root, b.root})) return false;
  for (const auto& [i, j] : pairs)
    if (i < 0 || j < 0 || i >= static_cast<int>(a.num_states()) ||
        j >= static_cast<int>(b.num_states()))
      return false;
  Rel rel = [&pairs](int x, int y) {
    return pairs.count({x, y}) != 0;
  };

  if (mode == EqMode::Fr) {
    Arena ar = combine({&a, &b});
    const int n1 = static_cast<int>(a.num_states());
    for (const auto& [i, j] : pairs) {
      if (ar.fin[i] != ar.fin[n1 + j]) return false;
      for (const Move& m : ar.mv[i]) {
        bool found = false;
        for (const Move& m2 : ar.mv[n1 + j])
          if (m2.kind == m.kind && m2.lab == m.lab &&
              rel(m.dst, m2.dst - n1)) {
            found = true;
            break;
          }
        if (!found) return false;
      }
      for (const Move& m : ar.mv[n1 + j]) {
        bool found = false;
        for (const Move& m2 : ar.mv[i])
          if (m2.kind == m.kind && m2.lab == m.lab &&
              rel(m2.dst, m.dst - n1)) {
            found = true;
            break;
          }
        if (!found) return false;
      }
    }
    return true;
  }

  BrSide s1 = make_side(a), s2 = make_side(b);
  for (const auto& [i, j] : pairs)
    if (!branching_pair_ok(s1, s2, i, j, rel, nullptr)) return false;
  if (mode == EqMode::Rooted) {
    std::vector<std::vector<char>> rm(a.num_states(),
                                      std::vector<char>(b.num_states(), 0));
    for (const auto& [i, j] : pairs) rm[i][j] = 1;
    if (!roots_match_exactly(a, b, s1, s2, rm, nullptr)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
//  Joint partition over many systems (used by equivalence sweeps).
// ---------------------------------------------------------------------------

std::vector<int> strong_fr_root_partition(const std::vector<const Lts*>& ltss) {
  if (ltss.empty()) return {};
  Arena ar = combine(ltss);
  auto levels = refine_levels(ar);
  const std::vector<int>& blk = levels.back();
  std::vector<int> out;
  out.reserve(ar.roots.size());
  for (int r : ar.roots) out.push_back(blk[r]);
  return out;
}

// ---------------------------------------------------------------------------
//  Configuration equivalence with the structural cross-check.
// ---------------------------------------------------------------------------

namespace {

// Quantum states at terminated states of a concrete LTS.
std::vector<const DensityMatrix*> terminal_states(const Lts& l) {
  std::vector<const DensityMatrix*> out;
  for (std::size_t i = 0; i < l.num_states(); ++i)
    if (l.terminating[i])
      if (const auto* dm = std::get_if<DensityMatrix>(&l.states[i].rho))
        out.push_back(dm);
  return out;
}

}  // namespace

bool terminal_quantum_states_agree(const Lts& a, const Lts& b) {
  auto ta = terminal_states(a), tb = terminal_states(b);
  auto covered = [](const std::vector<const DensityMatrix*>& xs,
                    const std::vector<const DensityMatrix*>& ys) {
    for (const DensityMatrix* x : xs) {
      bool found = false;
      for (const DensityMatrix* y : ys)
        if (x->approx_equal(*y)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  return covered(ta, tb) && covered(tb, ta);
}

EquivalenceVerdict config_equivalent(const Configuration& c1,
                                     const Configuration& c2, EqMode mode,
                                     const Model& m, StepLimits lim) {
  if (!rho_equal(c1.rho, c2.rho))
    throw std::invalid_argument(
        "configuration equivalence requires equal initial quantum states");
  Lts l1 = build_lts(c1, m, lim);
  Lts l2 = build_lts(c2, m, lim);
  EquivalenceVerdict direct = check_equivalence(l1, l2, mode);

  // Structural cross-check: the same relation on the term-only systems,
  // plus agreement of the terminal quantum states when they are concrete.
  Lts t1 = build_lts(make_config(c1.term), m, lim);
  Lts t2 = build_lts(make_config(c2.term), m, lim);
  bool reduced = check_equivalence(t1, t2, mode).related;
  if (reduced && !is_symbolic(c1.rho))
    reduced = terminal_quantum_states_agree(l1, l2);
  if (reduced != direct.related) {
    std::ostringstream os;
    os << "consistency alarm: direct verdict "
       << (direct.related ? "related" : "not related")
       << " disagrees with the structural cross-check";
    direct.note = os.str();
  }
  return direct;
}

// ---------------------------------------------------------------------------
//  Export.
// ---------------------------------------------------------------------------

std::string export_verdict(const EquivalenceVerdict& v) {
  std::ostringstream os;
  os << "RELATED " << (v.related ? "yes" : "no") << "\n";
  if (v.related) {
    for (const auto& [i, j] : v.witness)
      os << "WITNESS " << i << " " << j << "\n";
  } else {
    os << "DISTINGUISH " << v.distinguishing << "\n";
  }
  return os.str();
}

}  // namespace rqpap
