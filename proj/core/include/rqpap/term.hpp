// ============================================================================
//  rqpap/term.hpp — process terms
//
//  Terms are immutable shared trees.  Design notes:
//
//   * Sum is an n-ary multiset (>= 2 children), flattened and ordered by the
//     structural total order at construction, so commutativity/associativity
//     of + are part of term identity: structural equality IS equality modulo
//     AC of +.  Duplicates are kept (idempotence is a rewrite rule, not an
//     identity).
//   * Executed atoms carry history keys in their labels (`a[3]`); a term is
//     "fresh" when no atom anywhere is executed.  Keyless markers (`a[~]`)
//     count as executed but carry no key.
//   * Recursion is by reference into a guarded linear specification: the
//     term <X|S> points at equation X of spec S.  Recursion variables compare
//     by (spec name, variable name); specification names are assumed unique
//     within a model.
// ============================================================================
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rqpap/action.hpp"

namespace rqpap {

class Term;
using TermPtr = std::shared_ptr<const Term>;
using Weight = boost::multiprecision::cpp_int;

enum class Op : std::uint8_t {
  Atom,       ///< action label (fresh or executed), tau, or delta
  Sum,        ///< n-ary alternative composition  x + y + ...
  Seq,        ///< sequential composition  x . y
  StaticPar,  ///< static parallel  x | y
  CommMerge,  ///< communication merge  x >< y
  EntMerge,   ///< entanglement merge  x ## y
  Parallel,   ///< full parallel  x || y
  Encap,      ///< encapsulation  encap{H}(x)
  Abstract,   ///< abstraction  abs{I}(x)
  RecVar,     ///< recursion variable  <X|spec>
};

/// A guarded linear recursive specification: X_i = sum of a or a.X_j.
struct RecSpec {
  std::string name;
  std::vector<std::pair<std::string, TermPtr>> equations;

  const TermPtr* find(const std::string& var) const {
    for (const auto& [v, rhs] : equations)
      if (v == var) return &rhs;
    return nullptr;
  }
};
using RecSpecPtr = std::shared_ptr<const RecSpec>;

class Term : public std::enable_shared_from_this<Term> {
 public:
  // ---- factories (the only way to build; they maintain Sum canonicity) ----
  static TermPtr atom(ActionLabel label);
  static TermPtr delta() { return atom(ActionLabel::delta()); }
  static TermPtr tau() { return atom(ActionLabel::tau()); }
  /// Flattens nested sums and orders the multiset; a single element is
  /// returned as itself; empty input is rejected.
  static TermPtr sum(std::vector<TermPtr> summands);
  static TermPtr seq(TermPtr l, TermPtr r);
  static TermPtr spar(TermPtr l, TermPtr r);
  static TermPtr cmerge(TermPtr l, TermPtr r);
  static TermPtr emerge(TermPtr l, TermPtr r);
  static TermPtr par(TermPtr l, TermPtr r);
  static TermPtr encap(std::set<std::string> h, TermPtr t);
  static TermPtr abstraction(std::set<std::string> i, TermPtr t);
  static TermPtr recvar(std::string var, RecSpecPtr spec);

  Op op() const { return op_; }
  const ActionLabel& label() const { return label_; }          // Atom only
  const std::vector<TermPtr>& kids() const { return kids_; }
  const TermPtr& kid(std::size_t i) const { return kids_[i]; }
  const std::set<std::string>& names() const { return names_; }  // Encap/Abstract
  const std::string& var() const { return var_; }                // RecVar
  const RecSpecPtr& spec() const { return spec_; }               // RecVar

  bool has_executed() const { return has_executed_; }
  bool is_fresh() const { return !has_executed_; }
  KeyT max_key() const { return max_key_; }
  std::size_t hash() const { return hash_; }

  /// Structural total order; equal modulo AC of + iff cmp == 0.
  static int cmp(const Term& a, const Term& b);
  static bool equal(const TermPtr& a, const TermPtr& b);

 private:
  Term() = default;

  Op op_ = Op::Atom;
  ActionLabel label_;
  std::vector<TermPtr> kids_;
  std::set<std::string> names_;
  std::string var_;
  RecSpecPtr spec_;

  bool has_executed_ = false;
  KeyT max_key_ = 0;
  std::size_t hash_ = 0;

  void finish();  // compute caches
};

inline int cmp(const TermPtr& a, const TermPtr& b) { return Term::cmp(*a, *b); }
inline bool ac_equal(const TermPtr& a, const TermPtr& b) { return Term::equal(a, b); }

/// Deep re-canonicalization (idempotent; construction already canonicalizes).
TermPtr ac_canonical(const TermPtr& t);

/// Successful-termination predicate P: every reachable-forward atom executed.
/// A committed Sum delegates to its committed summand; an uncommitted Sum,
/// delta, fresh atoms, and recursion variables are not terminated.
bool terminated(const TermPtr& t);

/// Index of the unique summand holding executed content; -1 if the choice is
/// still open, -2 if several summands hold executed content (malformed input
/// — unreachable by stepping, treated as stuck).  Precondition: t is a Sum.
int committed_summand(const TermPtr& t);

/// All history keys in the term, ascending (keyless markers excluded).
std::vector<KeyT> histories(const TermPtr& t);

/// 1 + max history key (1 for fresh terms).
KeyT next_key(const TermPtr& t);

/// True if the term uses only Atom/Sum/Seq/StaticPar/CommMerge/EntMerge/
/// Parallel (the algebraic fragment that the axioms speak about).
bool algebraic(const TermPtr& t);

/// True if any of the given operators occurs in the term.
bool contains_op(const TermPtr& t, std::initializer_list<Op> ops);

/// Termination-measure weight: atoms (incl. delta/tau and executed atoms)
/// weigh 2; w(x+y) = w(x)+w(y); w(x.y) = w(x)^3 w(y)^3; the three merges
/// weigh w(x)^2 w(y)^2; w(x||y) = 3 w(x)^2 w(y)^2 + 1.
/// Precondition: algebraic(t).
Weight weight(const TermPtr& t);

}  // namespace rqpap
