#include "rqpap/gen.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

#include "rqpap/parser.hpp"

namespace rqpap {

namespace {

TermPtr gen_term(std::size_t depth, const std::vector<ActionLabel>& labels,
                 std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> lab(0, labels.size() - 1);
  if (depth <= 1) return Term::atom(labels[lab(rng)]);
  switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0:
      return Term::atom(labels[lab(rng)]);
    case 1:
      return Term::sum({gen_term(depth - 1, labels, rng),
                        gen_term(depth - 1, labels, rng)});
    case 2:
      return Term::seq(gen_term(depth - 1, labels, rng),
                       gen_term(depth - 1, labels, rng));
    case 3:
      return Term::spar(gen_term(depth - 1, labels, rng),
                        gen_term(depth - 1, labels, rng));
    case 4:
      return Term::cmerge(gen_term(depth - 1, labels, rng),
                          gen_term(depth - 1, labels, rng));
    case 5:
      return Term::emerge(gen_term(depth - 1, labels, rng),
                          gen_term(depth - 1, labels, rng));
    default:
      return Term::par(gen_term(depth - 1, labels, rng),
                       gen_term(depth - 1, labels, rng));
  }
}

}  // namespace

TermPtr random_term(std::size_t depth, const std::vector<ActionLabel>& labels,
                    std::uint64_t seed) {
  if (depth < 1) throw std::invalid_argument("random_term: depth must be >= 1");
  if (labels.empty())
    throw std::invalid_argument("random_term: label set must be nonempty");
  std::mt19937_64 rng(seed);
  return gen_term(depth, labels, rng);
}

std::vector<TermPtr> enumerate_terms(std::size_t max_ops,
                                     const std::vector<ActionLabel>& labels) {
  if (labels.empty())
    throw std::invalid_argument("enumerate_terms: label set must be nonempty");
  // by_ops[k] = distinct terms with exactly k binary operator nodes.
  std::vector<std::map<std::string, TermPtr>> by_ops(max_ops + 1);
  for (const ActionLabel& l : labels) {
    TermPtr a = Term::atom(l);
    by_ops[0].emplace(render(a), a);
  }
  for (std::size_t k = 1; k <= max_ops; ++k) {
    auto add = [&](TermPtr t) {
      std::string key = render(t);
      by_ops[k].emplace(std::move(key), std::move(t));
    };
    for (std::size_t i = 0; i + 1 <= k; ++i) {
      const std::size_t j = k - 1 - i;
      for (const auto& [kl, l] : by_ops[i])
        for (const auto& [kr, r] : by_ops[j]) {
          add(Term::sum({l, r}));
          add(Term::seq(l, r));
          add(Term::spar(l, r));
          add(Term::cmerge(l, r));
          add(Term::emerge(l, r));
          add(Term::par(l, r));
        }
    }
  }
  std::vector<TermPtr> out;
  for (const auto& level : by_ops)
    for (const auto& [key, t] : level) out.push_back(t);
  return out;
}

Lts random_lts(std::size_t max_states, std::uint64_t seed) {
  if (max_states < 1)
    throw std::invalid_argument("random_lts: need at least one state");
  std::mt19937_64 rng(seed);
  Lts l;
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(1, max_states)(rng);
  const Configuration dummy = make_config(Term::atom(ActionLabel::quantum("s")));
  l.states.assign(n, dummy);
  l.root = 0;
  l.terminating.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    l.terminating[i] = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
  const char* names[] = {"u", "v", "w"};
  std::uniform_int_distribution<int> name(0, 2);
  std::uniform_int_distribution<int> st(0, static_cast<int>(n) - 1);
  const std::size_t fwd_edges =
      std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
  for (std::size_t e = 0; e < fwd_edges; ++e)
    l.forward.push_back(
        {st(rng), ActionLabel::quantum(names[name(rng)]), st(rng)});
  const std::size_t rev_edges =
      std::uniform_int_distribution<std::size_t>(0, n)(rng);
  std::uniform_int_distribution<KeyT> key(1, 3);
  for (std::size_t e = 0; e < rev_edges; ++e)
    l.reverse.push_back(
        {st(rng), ActionLabel::quantum(names[name(rng)]).with_key(key(rng)),
         st(rng)});
  return l;
}

}  // namespace rqpap
