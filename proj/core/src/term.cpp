#include "rqpap/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace rqpap {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

}  // namespace

void Term::finish() {
  std::size_t h = static_cast<std::size_t>(op_) * 0x100000001b3ull;
  switch (op_) {
    case Op::Atom:
      h = mix(h, label_.hash());
      has_executed_ = label_.is_executed();
      max_key_ = label_.is_history() ? *label_.key : 0;
      break;
    case Op::RecVar:
      h = mix(h, std::hash<std::string>{}(spec_->name));
      h = mix(h, std::hash<std::string>{}(var_));
      break;
    default:
      for (const auto& k : kids_) {
        h = mix(h, k->hash_);
        has_executed_ = has_executed_ || k->has_executed_;
        max_key_ = std::max(max_key_, k->max_key_);
      }
      for (const auto& n : names_) h = mix(h, std::hash<std::string>{}(n));
      break;
  }
  hash_ = h;
}

int Term::cmp(const Term& a, const Term& b) {
  if (&a == &b) return 0;
  if (a.op_ != b.op_) return a.op_ < b.op_ ? -1 : 1;
  switch (a.op_) {
    case Op::Atom:
      return a.label_.cmp(b.label_);
    case Op::RecVar: {
      if (int c = a.spec_->name.compare(b.spec_->name); c != 0) return c < 0 ? -1 : 1;
      if (int c = a.var_.compare(b.var_); c != 0) return c < 0 ? -1 : 1;
      return 0;
    }
    case Op::Encap:
    case Op::Abstract: {
      if (a.names_ != b.names_) return a.names_ < b.names_ ? -1 : 1;
      return cmp(*a.kids_[0], *b.kids_[0]);
    }
    default: {
      if (a.kids_.size() != b.kids_.size())
        return a.kids_.size() < b.kids_.size() ? -1 : 1;
      for (std::size_t i = 0; i < a.kids_.size(); ++i)
        if (int c = cmp(*a.kids_[i], *b.kids_[i]); c != 0) return c;
      return 0;
    }
  }
}

bool Term::equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->hash_ != b->hash_) return false;
  return cmp(*a, *b) == 0;
}

TermPtr Term::atom(ActionLabel label) {
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Atom;
  t->label_ = std::move(label);
  t->finish();
  return t;
}

TermPtr Term::sum(std::vector<TermPtr> summands) {
  std::vector<TermPtr> flat;
  flat.reserve(summands.size());
  for (auto& s : summands) {
    if (!s) throw std::invalid_argument("sum: null summand");
    if (s->op() == Op::Sum)
      flat.insert(flat.end(), s->kids().begin(), s->kids().end());
    else
      flat.push_back(std::move(s));
  }
  if (flat.empty()) throw std::invalid_argument("sum: needs at least one summand");
  if (flat.size() == 1) return flat[0];
  std::stable_sort(flat.begin(), flat.end(),
                   [](const TermPtr& a, const TermPtr& b) { return cmp(*a, *b) < 0; });
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Sum;
  t->kids_ = std::move(flat);
  t->finish();
  return t;
}

TermPtr Term::seq(TermPtr l, TermPtr r) {
  if (!l || !r) throw std::invalid_argument("seq: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Seq;
  t->kids_ = {std::move(l), std::move(r)};
  t->finish();
  return t;
}

TermPtr Term::spar(TermPtr l, TermPtr r) {
  if (!l || !r) throw std::invalid_argument("spar: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::StaticPar;
  t->kids_ = {std::move(l), std::move(r)};
  t->finish();
  return t;
}

TermPtr Term::cmerge(TermPtr l, TermPtr r) {
  if (!l || !r) throw std::invalid_argument("cmerge: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::CommMerge;
  t->kids_ = {std::move(l), std::move(r)};
  t->finish();
  return t;
}

TermPtr Term::emerge(TermPtr l, TermPtr r) {
  if (!l || !r) throw std::invalid_argument("emerge: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::EntMerge;
  t->kids_ = {std::move(l), std::move(r)};
  t->finish();
  return t;
}

TermPtr Term::par(TermPtr l, TermPtr r) {
  if (!l || !r) throw std::invalid_argument("par: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Parallel;
  t->kids_ = {std::move(l), std::move(r)};
  t->finish();
  return t;
}

TermPtr Term::encap(std::set<std::string> h, TermPtr inner) {
  if (!inner) throw std::invalid_argument("encap: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Encap;
  t->names_ = std::move(h);
  t->kids_ = {std::move(inner)};
  t->finish();
  return t;
}

TermPtr Term::abstraction(std::set<std::string> i, TermPtr inner) {
  if (!inner) throw std::invalid_argument("abstraction: null child");
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::Abstract;
  t->names_ = std::move(i);
  t->kids_ = {std::move(inner)};
  t->finish();
  return t;
}

TermPtr Term::recvar(std::string var, RecSpecPtr spec) {
  if (!spec) throw std::invalid_argument("recvar: null spec");
  if (!spec->find(var))
    throw std::invalid_argument("recvar: no equation for " + var + " in spec " + spec->name);
  auto t = std::shared_ptr<Term>(new Term());
  t->op_ = Op::RecVar;
  t->var_ = std::move(var);
  t->spec_ = std::move(spec);
  t->finish();
  return t;
}

TermPtr ac_canonical(const TermPtr& t) {
  switch (t->op()) {
    case Op::Atom:
    case Op::RecVar:
      return t;
    case Op::Sum: {
      std::vector<TermPtr> ks;
      ks.reserve(t->kids().size());
      for (const auto& k : t->kids()) ks.push_back(ac_canonical(k));
      return Term::sum(std::move(ks));
    }
    case Op::Seq: return Term::seq(ac_canonical(t->kid(0)), ac_canonical(t->kid(1)));
    case Op::StaticPar: return Term::spar(ac_canonical(t->kid(0)), ac_canonical(t->kid(1)));
    case Op::CommMerge: return Term::cmerge(ac_canonical(t->kid(0)), ac_canonical(t->kid(1)));
    case Op::EntMerge: return Term::emerge(ac_canonical(t->kid(0)), ac_canonical(t->kid(1)));
    case Op::Parallel: return Term::par(ac_canonical(t->kid(0)), ac_canonical(t->kid(1)));
    case Op::Encap: return Term::encap(t->names(), ac_canonical(t->kid(0)));
    case Op::Abstract: return Term::abstraction(t->names(), ac_canonical(t->kid(0)));
  }
  return t;
}

int committed_summand(const TermPtr& t) {
  if (t->op() != Op::Sum) throw std::invalid_argument("committed_summand: not a Sum");
  int found = -1;
  for (std::size_t i = 0; i < t->kids().size(); ++i) {
    if (t->kid(i)->has_executed()) {
      if (found >= 0) return -2;  // malformed: two committed branches
      found = static_cast<int>(i);
    }
  }
  return found;
}

bool terminated(const TermPtr& t) {
  switch (t->op()) {
    case Op::Atom:
      return t->label().is_executed();  // histories and keyless markers
    case Op::Sum: {
      const int c = committed_summand(t);
      return c >= 0 && terminated(t->kid(c));
    }
    case Op::Seq:
    case Op::StaticPar:
    case Op::CommMerge:
    case Op::EntMerge:
    case Op::Parallel:
      return terminated(t->kid(0)) && terminated(t->kid(1));
    case Op::Encap:
    case Op::Abstract:
      return terminated(t->kid(0));
    case Op::RecVar:
      return false;
  }
  return false;
}

namespace {
void collect_keys(const TermPtr& t, std::vector<KeyT>& out) {
  if (t->op() == Op::Atom) {
    if (t->label().is_history()) out.push_back(*t->label().key);
    return;
  }
  for (const auto& k : t->kids()) collect_keys(k, out);
}
}  // namespace

std::vector<KeyT> histories(const TermPtr& t) {
  std::vector<KeyT> out;
  collect_keys(t, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

KeyT next_key(const TermPtr& t) { return t->max_key() + 1; }

bool algebraic(const TermPtr& t) {
  switch (t->op()) {
    case Op::Encap:
    case Op::Abstract:
    case Op::RecVar:
      return false;
    case Op::Atom:
      return true;
    default:
      for (const auto& k : t->kids())
        if (!algebraic(k)) return false;
      return true;
  }
}

bool contains_op(const TermPtr& t, std::initializer_list<Op> ops) {
  for (Op o : ops)
    if (t->op() == o) return true;
  for (const auto& k : t->kids())
    if (contains_op(k, ops)) return true;
  return false;
}

Weight weight(const TermPtr& t) {
  switch (t->op()) {
    case Op::Atom:
      return 2;
    case Op::Sum: {
      Weight w = 0;
      for (const auto& k : t->kids()) w += weight(k);
      return w;
    }
    case Op::Seq: {
      const Weight l = weight(t->kid(0)), r = weight(t->kid(1));
      return l * l * l * r * r * r;
    }
    case Op::StaticPar:
    case Op::CommMerge:
    case Op::EntMerge: {
      const Weight l = weight(t->kid(0)), r = weight(t->kid(1));
      return l * l * r * r;
    }
    case Op::Parallel: {
      const Weight l = weight(t->kid(0)), r = weight(t->kid(1));
      return 3 * l * l * r * r + 1;
    }
    default:
      throw std::domain_error("weight: defined on the algebraic fragment only");
  }
}

}  // namespace rqpap
