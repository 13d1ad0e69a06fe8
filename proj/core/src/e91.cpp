#include "rqpap/e91.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "rqpap/parser.hpp"
#include "rqpap/sos.hpp"

namespace rqpap {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> domain_names(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int k = 1; k <= n; ++k) out.push_back(stem + std::to_string(k));
  return out;
}

TermPtr comm_atom(const std::string& n) { return Term::atom(ActionLabel::comm(n)); }
TermPtr qop_atom(const std::string& n) { return Term::atom(ActionLabel::quantum(n)); }

/// receive_1 . receive_2 . ... folded from a list of labels into a chain
/// ending at `tail` (tail may be empty for a plain final action).
TermPtr chain(const std::vector<TermPtr>& atoms, TermPtr tail) {
  TermPtr acc = tail;
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it)
    acc = acc ? Term::seq(*it, acc) : *it;
  return acc;
}

/// Post-measurement mixture for one EPR pair: both qubits measured in the
/// standard basis, (|00><00| + |11><11|) / 2.
DensityMatrix measured_pair() {
  DensityMatrix d;
  d.qubits = 2;
  d.m = Mat::Zero(4, 4);
  d.m(0, 0) = 0.5;
  d.m(3, 3) = 0.5;
  return d;
}

const char* kAliceNames[] = {"A", "A1", "A2", "A3", "A4", "A5", "A6"};
const char* kBobNames[] = {"B", "B1", "B2", "B3", "B4", "B5", "B6"};

}  // namespace

E91Build build_e91(int n_pairs, int domain_size, bool swapped, bool concrete) {
  if (n_pairs < 1 || n_pairs > 2)
    throw std::invalid_argument("n_pairs must be 1 or 2");
  if (domain_size < 1 || domain_size > 2)
    throw std::invalid_argument("domain_size must be 1 or 2");

  E91Build b;
  b.n_pairs = n_pairs;
  b.domain_size = domain_size;
  b.swapped = swapped;
  Model& m = b.model;

  const std::vector<std::string> recv_A = domain_names("receive_A_d", domain_size);
  const std::vector<std::string> send_B = domain_names("send_B_d", domain_size);
  const std::string send_Q = "send_Q_qb", recv_Q = "receive_Q_qb", c_Q = "c_Q_qb";
  const std::string send_Pb = "send_P_Bb", recv_Pb = "receive_P_Bb", c_Pb = "c_P_Bb";
  const std::string send_Pa = "send_P_Ba", recv_Pa = "receive_P_Ba", c_Pa = "c_P_Ba";
  const std::string cmp = "cmp";
  const std::string M_qa = "M_qa_Ka", M_qb = "M_qb_Kb";

  for (const auto& n : recv_A) m.declare_comm(n);
  for (const auto& n : send_B) m.declare_comm(n);
  for (const auto& n : {send_Q, recv_Q, c_Q, send_Pb, recv_Pb, c_Pb, send_Pa,
                        recv_Pa, c_Pa, cmp})
    m.declare_comm(n);
  m.declare_qop(M_qa);
  m.declare_qop(M_qb);
  m.declare_gamma(send_Q, recv_Q, c_Q);
  m.declare_gamma(send_Pb, recv_Pb, c_Pb);
  m.declare_gamma(send_Pa, recv_Pa, c_Pa);

  b.H = {send_Q, recv_Q, send_Pb, recv_Pb, send_Pa, recv_Pa, M_qa, M_qb};
  b.I = {c_Q, c_Pb, c_Pa, M_qa, M_qb, cmp};

  // Bob performs the two measurement operations in the written order; the
  // swapped variant exchanges them (his own string first).
  const std::string bob_m1 = swapped ? M_qb : M_qa;
  const std::string bob_m2 = swapped ? M_qa : M_qb;

  // Two-phase spec construction (as in the parser): register every variable
  // first so equation bodies may reference later ones, then fill the bodies.
  auto spec = std::make_shared<RecSpec>();
  spec->name = "E91";
  for (int i = 0; i < 7; ++i) spec->equations.emplace_back(kAliceNames[i], nullptr);
  for (int j = 0; j < 7; ++j) spec->equations.emplace_back(kBobNames[j], nullptr);
  auto X = [&spec](const std::string& v) { return Term::recvar(v, spec); };
  auto eq = [&spec](const std::string& v, TermPtr body) {
    for (auto& [name, rhs] : spec->equations)
      if (name == v) {
        rhs = std::move(body);
        return;
      }
  };

  {
    std::vector<TermPtr> in;
    for (const auto& n : recv_A) in.push_back(Term::seq(comm_atom(n), X("A1")));
    eq("A", Term::sum(std::move(in)));
  }
  eq("A1", Term::seq(comm_atom(send_Q), X("A2")));
  eq("A2", Term::seq(qop_atom(M_qa), X("A3")));
  eq("A3", Term::seq(qop_atom(M_qb), X("A4")));
  eq("A4", Term::seq(comm_atom(recv_Pb), X("A5")));
  eq("A5", Term::seq(comm_atom(send_Pa), X("A6")));
  eq("A6", Term::seq(comm_atom(cmp), X("A")));

  eq("B", Term::seq(comm_atom(recv_Q), X("B1")));
  eq("B1", Term::seq(qop_atom(bob_m1), X("B2")));
  eq("B2", Term::seq(qop_atom(bob_m2), X("B3")));
  eq("B3", Term::seq(comm_atom(send_Pb), X("B4")));
  eq("B4", Term::seq(comm_atom(recv_Pa), X("B5")));
  eq("B5", Term::seq(comm_atom(cmp), X("B6")));
  {
    std::vector<TermPtr> out;
    for (const auto& n : send_B) out.push_back(Term::seq(comm_atom(n), X("B")));
    eq("B6", Term::sum(std::move(out)));
  }

  auto sspec = std::make_shared<RecSpec>();
  sspec->name = "E91Spec";
  sspec->equations.emplace_back("S", nullptr);
  {
    std::vector<TermPtr> loops;
    for (const auto& i : recv_A)
      for (const auto& o : send_B)
        loops.push_back(Term::seq(
            comm_atom(i),
            Term::seq(comm_atom(o), Term::recvar("S", sspec))));
    sspec->equations.front().second = Term::sum(std::move(loops));
  }

  b.restricted = Term::encap(b.H, Term::par(X("A"), X("B")));
  b.lhs = Term::abstraction(b.I, b.restricted);
  b.rhs = Term::recvar("S", sspec);

  // One non-recursive round: the processes end after Alice's comparison and
  // Bob's final send instead of restarting.
  {
    TermPtr tail_A = chain({comm_atom(send_Q), qop_atom(M_qa), qop_atom(M_qb),
                            comm_atom(recv_Pb), comm_atom(send_Pa)},
                           comm_atom(cmp));
    std::vector<TermPtr> in;
    for (const auto& n : recv_A) in.push_back(Term::seq(comm_atom(n), tail_A));
    TermPtr once_A = Term::sum(std::move(in));

    std::vector<TermPtr> sends;
    for (const auto& n : send_B) sends.push_back(comm_atom(n));
    TermPtr once_B =
        chain({comm_atom(recv_Q), qop_atom(bob_m1), qop_atom(bob_m2),
               comm_atom(send_Pb), comm_atom(recv_Pa), comm_atom(cmp)},
              Term::sum(std::move(sends)));
    b.round_lhs = Term::encap(b.H, Term::par(once_A, once_B));

    std::vector<TermPtr> sends2;
    for (const auto& n : send_B) sends2.push_back(comm_atom(n));
    TermPtr derived_tail =
        chain({comm_atom(c_Q), qop_atom(M_qa), qop_atom(M_qb), comm_atom(c_Pb),
               comm_atom(c_Pa), comm_atom(cmp), comm_atom(cmp)},
              Term::sum(std::move(sends2)));
    std::vector<TermPtr> rounds;
    for (const auto& n : recv_A)
      rounds.push_back(Term::seq(comm_atom(n), derived_tail));
    b.round_rhs = Term::sum(std::move(rounds));
  }

  if (concrete) {
    std::vector<int> evens, odds;
    for (int p = 0; p < n_pairs; ++p) {
      evens.push_back(2 * p);
      odds.push_back(2 * p + 1);
    }
    m.effects[M_qa] = QuantumEffect::measure_std(evens);
    m.effects[M_qb] = QuantumEffect::measure_std(odds);
    DensityMatrix rho = bell_state(1);
    for (int p = 1; p < n_pairs; ++p) rho = kron(rho, bell_state(1));
    m.initial_rho = std::move(rho);
  }

  m.specs[spec->name] = spec;
  m.specs[sspec->name] = sspec;
  m.terms["System"] = b.lhs;
  m.terms["Spec"] = b.rhs;
  m.terms["Alice"] = X("A");
  m.terms["Bob"] = X("B");
  m.terms["Round"] = b.round_lhs;
  m.terms["RoundSpec"] = b.round_rhs;
  return b;
}

namespace {

// ---------------------------------------------------------------------------
// Derivation summary: one equation per protocol phase of the restricted
// (encapsulated, unabstracted) system, generated from operational steps.
// ---------------------------------------------------------------------------

struct PhaseTable {
  // canonical term -> printable name, for all Alice x Bob phase pairs
  std::vector<std::pair<TermPtr, std::string>> entries;

  std::string name_of(const TermPtr& canonical) const {
    for (const auto& [t, n] : entries)
      if (ac_equal(t, canonical)) return n;
    return render(canonical);
  }
};

std::string phase_name(int i, int j) {
  return std::string("dH(") + kAliceNames[i] + " || " + kBobNames[j] + ")";
}

PhaseTable make_phase_table(const E91Build& b) {
  PhaseTable tab;
  auto spec_of = [&b](const char* v) {
    // Both recursion variables live in the same specification; reuse the
    // build's terms to reach it.
    return Term::recvar(v, b.model.terms.at("Alice")->spec());
  };
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      TermPtr t = Term::encap(
          b.H, Term::par(spec_of(kAliceNames[i]), spec_of(kBobNames[j])));
      tab.entries.emplace_back(fcanon_term(t), phase_name(i, j));
    }
  }
  return tab;
}

std::vector<std::string> derivation_equations(const E91Build& b) {
  const PhaseTable tab = make_phase_table(b);
  // The nine phases of one protocol round, in derivation order.
  const std::pair<int, int> phases[] = {{0, 0}, {1, 0}, {2, 1}, {3, 2}, {4, 3},
                                        {5, 4}, {6, 5}, {0, 5}, {0, 6}};
  const std::string expected[] = {"receive_A_d1", "c_Q_qb",  "M_qa_Ka",
                                  "M_qb_Kb",      "c_P_Bb",  "c_P_Ba",
                                  "cmp",          "cmp",     "send_B_d1"};

  std::vector<std::string> lines;
  for (int k = 0; k < 9; ++k) {
    auto [i, j] = phases[k];
    TermPtr state = fcanon_term(Term::encap(
        b.H,
        Term::par(Term::recvar(kAliceNames[i], b.model.terms.at("Alice")->spec()),
                  Term::recvar(kBobNames[j],
                               b.model.terms.at("Alice")->spec()))));
    auto steps = forward_steps(make_config(state), b.model);

    std::vector<std::string> summands;
    auto push_unique = [&summands](std::string s) {
      if (std::find(summands.begin(), summands.end(), s) == summands.end())
        summands.push_back(std::move(s));
    };
    // Lead with the summand the derivation names, then everything else.
    for (const auto& [lab, succ] : steps)
      if (lab.name == expected[k])
        push_unique(lab.render() + " . " + tab.name_of(fcanon_term(succ.term)));
    for (const auto& [lab, succ] : steps)
      push_unique(lab.render() + " . " + tab.name_of(fcanon_term(succ.term)));

    std::string line = phase_name(i, j) + " = ";
    if (summands.empty()) {
      line += "(stuck: no derivable transitions)";
    } else {
      for (std::size_t s = 0; s < summands.size(); ++s)
        line += (s ? " + " : "") + summands[s];
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Shape of the abstracted system: a pure two-phase external cycle?
// ---------------------------------------------------------------------------

struct LoopShape {
  bool ok = false;
  std::string note;
  std::set<std::string> input_labels, output_labels;
};

LoopShape loop_shape(const Lts& l) {
  LoopShape out;
  const std::size_t n = l.states.size();
  std::vector<std::vector<int>> taus(n);
  std::vector<std::vector<std::pair<std::string, int>>> vis(n);
  for (const auto& e : l.forward) {
    if (e.label.is_tau())
      taus[static_cast<std::size_t>(e.src)].push_back(e.dst);
    else
      vis[static_cast<std::size_t>(e.src)].push_back({e.label.render(), e.dst});
  }
  auto closure = [&taus](std::vector<int> seed) {
    std::set<int> seen(seed.begin(), seed.end());
    while (!seed.empty()) {
      int s = seed.back();
      seed.pop_back();
      for (int d : taus[static_cast<std::size_t>(s)])
        if (seen.insert(d).second) seed.push_back(d);
    }
    return seen;
  };

  const std::set<int> c0 = closure({l.root});
  std::set<std::string> l0;
  std::vector<int> mid_seed;
  for (int s : c0)
    for (const auto& [lab, dst] : vis[static_cast<std::size_t>(s)]) {
      l0.insert(lab);
      mid_seed.push_back(dst);
    }
  const std::set<int> c1 = closure(mid_seed);
  std::set<std::string> l1;
  bool returns = true;
  for (int s : c1)
    for (const auto& [lab, dst] : vis[static_cast<std::size_t>(s)]) {
      l1.insert(lab);
      if (!c0.count(dst)) returns = false;
    }
  out.input_labels = l0;
  out.output_labels = l1;

  if (l0.empty() || l1.empty()) {
    out.note = "the external loop is missing a phase (no visible actions)";
    return out;
  }
  std::vector<std::string> overlap;
  std::set_intersection(l0.begin(), l0.end(), l1.begin(), l1.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) {
    out.note = "after the input phase, `" + overlap.front() +
               "` is enabled again before the output completes "
               "(pipelined rounds break the two-action cycle)";
    return out;
  }
  if (!returns) {
    out.note = "the output phase does not return to the initial phase";
    return out;
  }
  std::size_t covered = 0;
  for (std::size_t s = 0; s < n; ++s)
    if (c0.count(static_cast<int>(s)) || c1.count(static_cast<int>(s)))
      ++covered;
  if (covered != n) {
    out.note = "states outside the two-phase cycle: " +
               std::to_string(n - covered);
    return out;
  }
  out.ok = true;
  std::string ins, outs;
  for (const auto& s : l0) ins += (ins.empty() ? "" : " + ") + s;
  for (const auto& s : l1) outs += (outs.empty() ? "" : " + ") + s;
  out.note = "two-phase external cycle: (" + ins + ") then (" + outs + ")";
  return out;
}

}  // namespace

VerificationReport verify_e91(const E91Options& opts) {
  const auto t0 = Clock::now();
  const E91Build b =
      build_e91(opts.n_pairs, opts.domain_size, opts.swapped_measurements,
                opts.concrete);

  VerificationReport rep;
  rep.mode = opts.concrete ? "concrete" : "symbolic";
  rep.n_pairs = opts.n_pairs;
  rep.domain_size = opts.domain_size;
  rep.swapped = opts.swapped_measurements;

  const StepLimits lim{20000, 2000};
  const Lts lsys = build_forward_canonical_lts(make_config(b.lhs), b.model, lim);
  const Lts lspec = build_forward_canonical_lts(make_config(b.rhs), b.model, lim);
  rep.lhs_states = lsys.states.size();
  rep.lhs_edges = lsys.forward.size();
  rep.rhs_states = lspec.states.size();
  rep.rhs_edges = lspec.forward.size();

  rep.verdict = rooted_branching_fr_bisimilar(lsys, lspec);

  const LoopShape shape = loop_shape(lsys);
  rep.loop_shape_ok = shape.ok;
  rep.loop_shape_note = shape.note;

  rep.derivation.push_back("system = " + render(b.lhs));
  for (auto& line : derivation_equations(b)) rep.derivation.push_back(std::move(line));
  if (shape.ok) {
    std::string ins, outs;
    for (const auto& s : shape.input_labels) ins += (ins.empty() ? "" : " + ") + s;
    for (const auto& s : shape.output_labels) outs += (outs.empty() ? "" : " + ") + s;
    rep.derivation.push_back("tau_I(dH(A || B)) = (" + ins + ") . (" + outs +
                             ") . tau_I(dH(A || B))");
  } else {
    rep.derivation.push_back("tau_I collapse: " + shape.note);
  }
  rep.derivation.push_back("spec = " + render(b.rhs));

  if (opts.concrete || opts.full_fr) {
    Configuration cl = opts.concrete
                           ? make_config(b.round_lhs, *b.model.initial_rho)
                           : make_config(b.round_lhs);
    Configuration cr = opts.concrete
                           ? make_config(b.round_rhs, *b.model.initial_rho)
                           : make_config(b.round_rhs);
    const Lts rl = build_lts(cl, b.model, lim);
    const Lts rr = build_lts(cr, b.model, lim);

    if (opts.concrete) {
      rep.concrete_checked = true;
      DensityMatrix expect = measured_pair();
      for (int p = 1; p < opts.n_pairs; ++p) expect = kron(expect, measured_pair());

      std::size_t terminals = 0, mismatches = 0;
      auto check_terminals = [&](const Lts& l) {
        for (std::size_t i = 0; i < l.states.size(); ++i) {
          if (!l.terminating[i]) continue;
          ++terminals;
          const auto* dm = std::get_if<DensityMatrix>(&l.states[i].rho);
          if (!dm || !dm->approx_equal(expect)) ++mismatches;
        }
      };
      check_terminals(rl);
      check_terminals(rr);
      const bool sets_agree = terminal_quantum_states_agree(rl, rr);
      rep.concrete_ok = terminals > 0 && mismatches == 0 && sets_agree;
      std::ostringstream note;
      if (terminals == 0)
        note << "no terminating round states";
      else if (mismatches > 0)
        note << mismatches << " of " << terminals
             << " terminal states deviate from the post-measurement mixture";
      else if (!sets_agree)
        note << "terminal quantum states of round and derived form disagree";
      else
        note << terminals
             << " terminal states match the post-measurement mixture "
                "(|00><00| + |11><11|)/2 per pair within 1e-9";
      rep.concrete_note = note.str();
    }

    if (opts.full_fr) {
      rep.full_fr_checked = true;
      rep.full_fr_verdict = fr_bisimilar(rl, rr);
    }
  }

  rep.seconds = elapsed(t0);
  return rep;
}

std::string VerificationReport::render() const {
  std::ostringstream os;
  os << protocol << " verification  (" << mode << ", " << n_pairs
     << (n_pairs == 1 ? " pair" : " pairs") << ", domain " << domain_size;
  if (swapped) os << ", swapped measurements";
  os << ")\n";
  os << "  rooted branching equivalence: "
     << (verdict.related ? "related" : "NOT related") << "\n";
  if (!verdict.related && !verdict.distinguishing.empty())
    os << "    distinguished by: " << verdict.distinguishing << "\n";
  if (!verdict.note.empty()) os << "    note: " << verdict.note << "\n";
  os << "  system LTS: " << lhs_states << " states, " << lhs_edges
     << " forward edges; spec LTS: " << rhs_states << " states, " << rhs_edges
     << " forward edges\n";
  os << "  external loop: " << (loop_shape_ok ? "ok" : "FAIL") << " — "
     << loop_shape_note << "\n";
  if (concrete_checked)
    os << "  concrete round: " << (concrete_ok ? "ok" : "FAIL") << " — "
       << concrete_note << "\n";
  if (full_fr_checked) {
    os << "  full forward-reverse check (one restricted round vs its derived "
          "sequential form): "
       << (full_fr_verdict.related ? "related" : "NOT related") << "\n";
    if (!full_fr_verdict.related && !full_fr_verdict.distinguishing.empty())
      os << "    distinguished by: " << full_fr_verdict.distinguishing << "\n";
  }
  os << "  derivation:\n";
  for (const auto& line : derivation) os << "    " << line << "\n";
  os << "  wall time: " << std::fixed << std::setprecision(3) << seconds
     << " s\n";
  return os.str();
}

}  // namespace rqpap
