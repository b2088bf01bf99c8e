#pragma once

#include <algorithm>
#include <cmath>
#include <array>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "problem.hpp"
#include "random.hpp"

namespace designsearch {

enum class Encoding { ng, xp };

inline std::string to_string(Encoding e) { return e == Encoding::ng ? "ng" : "xp"; }

inline Encoding parse_encoding(const std::string& s) {
  if (s == "ng") return Encoding::ng;
  if (s == "xp") return Encoding::xp;
  throw std::invalid_argument("unknown encoding '" + s + "'");
}

// Naive grouping: alleles[i] in {1..c} is the class of element i.
struct NgGenotype {
  std::vector<int> alleles;
  std::optional<int> rate_gene;

  friend bool operator==(const NgGenotype&, const NgGenotype&) = default;
};

// Extended permutation of {0..e+c-1}; values >= e are end-of-class markers.
struct XpGenotype {
  std::vector<int> perm;
  std::optional<int> rate_gene;

  friend bool operator==(const XpGenotype&, const XpGenotype&) = default;
};

// Candidate mutation rates for the self-adaptive gene. For NG a rate is a
// per-locus probability after division by the genotype length.
struct RateSet {
  // Per-genotype rate multipliers: NG divides by the genotype length, XP uses
  // them directly as event probabilities. Both are capped at 1.
  std::vector<double> rates{0.001, 0.002, 0.01, 0.02, 0.1, 0.2, 1.0, 2.0, 5.0, 10.0};
  double reset_prob = 0.1;

  int size() const noexcept { return static_cast<int>(rates.size()); }

  void validate() const {
    if (rates.empty()) throw std::invalid_argument("rate set must not be empty");
    for (double r : rates)
      if (!(r > 0.0 && std::isfinite(r))) throw std::invalid_argument("rates must be positive and finite");
    if (!(reset_prob >= 0.0 && reset_prob <= 1.0)) throw std::invalid_argument("reset probability must lie in [0, 1]");
  }

  double locus_rate(int gene, int length) const { return std::min(1.0, rates.at(static_cast<std::size_t>(gene)) / length); }
  double event_rate(int gene) const { return std::min(1.0, rates.at(static_cast<std::size_t>(gene))); }
};

// ---------------------------------------------------------------------------
// Decoding.

inline Assignment decode_assignment(const NgGenotype& g, int class_count) {
  Assignment a{std::vector<int>(g.alleles.size()), class_count};
  for (std::size_t i = 0; i < g.alleles.size(); ++i) a.class_of[i] = g.alleles[i] - 1;
  return a;
}

// Read cyclically from just after the first marker; each marker closes a class.
inline Assignment decode_assignment(const XpGenotype& g, int element_count, int class_count) {
  const int n = static_cast<int>(g.perm.size());
  Assignment a{std::vector<int>(static_cast<std::size_t>(element_count), 0), class_count};
  int start = 0;
  while (start < n && g.perm[static_cast<std::size_t>(start)] < element_count) ++start;
  int cls = 0;
  for (int k = 1; k <= n; ++k) {
    const int v = g.perm[static_cast<std::size_t>((start + k) % n)];
    if (v >= element_count)
      ++cls;
    else
      a.class_of[static_cast<std::size_t>(v)] = cls;
  }
  return a;
}

inline Assignment decode_assignment(const NgGenotype& g, const DesignProblem& p) {
  return decode_assignment(g, p.class_count());
}

inline Assignment decode_assignment(const XpGenotype& g, const DesignProblem& p) {
  return decode_assignment(g, p.element_count(), p.class_count());
}

template <class Genotype>
Design decode(const Genotype& g, const DesignProblem& p) {
  return Design::from_assignment(decode_assignment(g, p), p);
}

// ---------------------------------------------------------------------------
// Initialization.

inline NgGenotype random_ng(const DesignProblem& p, Rng& rng, const RateSet* rates = nullptr) {
  NgGenotype g;
  g.alleles.resize(static_cast<std::size_t>(p.element_count()));
  for (int& v : g.alleles) v = uniform_int(rng, 1, p.class_count());
  if (rates) g.rate_gene = uniform_int(rng, 0, rates->size() - 1);
  return g;
}

inline XpGenotype random_xp(const DesignProblem& p, Rng& rng, const RateSet* rates = nullptr) {
  XpGenotype g;
  g.perm.resize(static_cast<std::size_t>(p.element_count() + p.class_count()));
  std::iota(g.perm.begin(), g.perm.end(), 0);
  std::shuffle(g.perm.begin(), g.perm.end(), rng);
  if (rates) g.rate_gene = uniform_int(rng, 0, rates->size() - 1);
  return g;
}

template <class Genotype>
Genotype random_genotype(const DesignProblem& p, Rng& rng, const RateSet* rates = nullptr) {
  if constexpr (std::is_same_v<Genotype, NgGenotype>)
    return random_ng(p, rng, rates);
  else
    return random_xp(p, rng, rates);
}

// ---------------------------------------------------------------------------
// Mutation.

inline NgGenotype mutate_ng(NgGenotype g, double rate, int class_count, Rng& rng) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("mutation rate must lie in (0, 1]");
  for (int& v : g.alleles)
    if (bernoulli(rng, rate)) v = uniform_int(rng, 1, class_count);
  return g;
}

enum class XpEvent { swap, insert, invert };

inline void apply_xp_event(std::vector<int>& perm, XpEvent event, Rng& rng) {
  const int n = static_cast<int>(perm.size());
  if (n < 2) return;
  int i = uniform_int(rng, 0, n - 1);
  int j = uniform_int(rng, 0, n - 1);
  switch (event) {
    case XpEvent::swap:
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      break;
    case XpEvent::insert: {
      const int v = perm[static_cast<std::size_t>(i)];
      perm.erase(perm.begin() + i);
      perm.insert(perm.begin() + j, v);
      break;
    }
    case XpEvent::invert:
      if (i > j) std::swap(i, j);
      std::reverse(perm.begin() + i, perm.begin() + j + 1);
      break;
  }
}

inline XpEvent random_xp_event(Rng& rng) { return static_cast<XpEvent>(uniform_int(rng, 0, 2)); }

// Exactly one event, type chosen uniformly.
inline XpGenotype mutate_xp(XpGenotype g, Rng& rng) {
  apply_xp_event(g.perm, random_xp_event(rng), rng);
  return g;
}

// Fixed-rate XP mutation: one random event with probability `rate`.
inline XpGenotype mutate_xp(XpGenotype g, double rate, Rng& rng) {
  if (bernoulli(rng, rate)) return mutate_xp(std::move(g), rng);
  return g;
}

// Reset the rate gene with reset_prob, then mutate at the encoded rate.
inline NgGenotype self_adapt_mutate(NgGenotype g, const RateSet& rates, int class_count, Rng& rng) {
  if (!g.rate_gene) throw std::invalid_argument("self-adaptive mutation needs a rate gene");
  if (bernoulli(rng, rates.reset_prob)) g.rate_gene = uniform_int(rng, 0, rates.size() - 1);
  const double rate = rates.locus_rate(*g.rate_gene, static_cast<int>(g.alleles.size()));
  for (int& v : g.alleles)
    if (bernoulli(rng, rate)) v = uniform_int(rng, 1, class_count);
  return g;
}

// Each of the three event types is tried once at the encoded rate.
inline XpGenotype self_adapt_mutate(XpGenotype g, const RateSet& rates, Rng& rng) {
  if (!g.rate_gene) throw std::invalid_argument("self-adaptive mutation needs a rate gene");
  if (bernoulli(rng, rates.reset_prob)) g.rate_gene = uniform_int(rng, 0, rates.size() - 1);
  const double rate = rates.event_rate(*g.rate_gene);
  for (XpEvent e : {XpEvent::swap, XpEvent::insert, XpEvent::invert})
    if (bernoulli(rng, rate)) apply_xp_event(g.perm, e, rng);
  return g;
}

// ---------------------------------------------------------------------------
// Crossover.

enum class Crossover { one_point, uniform, order_based, edge_recombination };

inline std::string to_string(Crossover c) {
  switch (c) {
    case Crossover::one_point: return "onepoint";
    case Crossover::uniform: return "uniform";
    case Crossover::order_based: return "order";
    case Crossover::edge_recombination: return "edge";
  }
  return "?";
}

inline Crossover parse_crossover(const std::string& s) {
  if (s == "onepoint" || s == "one-point") return Crossover::one_point;
  if (s == "uniform") return Crossover::uniform;
  if (s == "order" || s == "order-based") return Crossover::order_based;
  if (s == "edge" || s == "edge-recombination") return Crossover::edge_recombination;
  throw std::invalid_argument("unknown crossover '" + s + "'");
}

inline bool compatible(Crossover c, Encoding e) {
  const bool ng_op = c == Crossover::one_point || c == Crossover::uniform;
  return ng_op == (e == Encoding::ng);
}

// Tails from `cut` onward are exchanged.
inline std::pair<NgGenotype, NgGenotype> one_point_crossover(const NgGenotype& p1, const NgGenotype& p2,
                                                            std::size_t cut) {
  NgGenotype c1 = p1, c2 = p2;
  for (std::size_t i = cut; i < p1.alleles.size(); ++i) std::swap(c1.alleles[i], c2.alleles[i]);
  return {std::move(c1), std::move(c2)};
}

inline std::pair<NgGenotype, NgGenotype> uniform_crossover(const NgGenotype& p1, const NgGenotype& p2, Rng& rng) {
  NgGenotype c1 = p1, c2 = p2;
  for (std::size_t i = 0; i < p1.alleles.size(); ++i)
    if (bernoulli(rng, 0.5)) std::swap(c1.alleles[i], c2.alleles[i]);
  return {std::move(c1), std::move(c2)};
}

// Order-based crossover (Syswerda, in Davis's handbook): a random subset of
// positions is chosen; the values `donor` holds there are rewritten in
// `base` in the relative order they have in `donor`. Other loci keep their
// place.
inline std::vector<int> order_based_child(const std::vector<int>& base, const std::vector<int>& donor,
                                          const std::vector<char>& selected) {
  const std::size_t n = base.size();
  std::vector<char> moving(n, 0);
  std::vector<int> donor_order;
  for (std::size_t i = 0; i < n; ++i)
    if (selected[i]) {
      moving[static_cast<std::size_t>(donor[i])] = 1;
      donor_order.push_back(donor[i]);
    }
  std::vector<int> child = base;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (moving[static_cast<std::size_t>(base[i])]) child[i] = donor_order[next++];
  return child;
}

inline std::pair<XpGenotype, XpGenotype> order_crossover(const XpGenotype& p1, const XpGenotype& p2, Rng& rng) {
  std::vector<char> selected(p1.perm.size());
  for (auto& s : selected) s = bernoulli(rng, 0.5);
  XpGenotype c1{order_based_child(p1.perm, p2.perm, selected), p1.rate_gene};
  XpGenotype c2{order_based_child(p2.perm, p1.perm, selected), p2.rate_gene};
  return {std::move(c1), std::move(c2)};
}

// Whitley edge recombination. The edge table is the union of both parents'
// cyclic adjacencies; the walk prefers the neighbour with the fewest
// remaining edges (ties at random) and jumps randomly on a dead end.
inline std::vector<int> edge_child(const std::vector<int>& a, const std::vector<int>& b, int start, Rng& rng) {
  const std::size_t n = a.size();
  std::vector<std::vector<int>> edges(n);
  auto link = [&](const std::vector<int>& p) {
    for (std::size_t i = 0; i < n; ++i) {
      const int u = p[i], v = p[(i + 1) % n];
      if (u == v) continue;
      auto& eu = edges[static_cast<std::size_t>(u)];
      auto& ev = edges[static_cast<std::size_t>(v)];
      if (std::find(eu.begin(), eu.end(), v) == eu.end()) eu.push_back(v);
      if (std::find(ev.begin(), ev.end(), u) == ev.end()) ev.push_back(u);
    }
  };
  link(a);
  link(b);

  std::vector<char> visited(n, 0);
  std::vector<int> child;
  child.reserve(n);
  int current = start;
  std::vector<int> candidates;
  while (true) {
    child.push_back(current);
    visited[static_cast<std::size_t>(current)] = 1;
    for (int nb : edges[static_cast<std::size_t>(current)]) {
      auto& en = edges[static_cast<std::size_t>(nb)];
      en.erase(std::remove(en.begin(), en.end(), current), en.end());
    }
    if (child.size() == n) break;

    candidates.clear();
    std::size_t best = n + 1;
    for (int nb : edges[static_cast<std::size_t>(current)]) {
      if (visited[static_cast<std::size_t>(nb)]) continue;
      const std::size_t deg = edges[static_cast<std::size_t>(nb)].size();
      if (deg < best) {
        best = deg;
        candidates.assign(1, nb);
      } else if (deg == best) {
        candidates.push_back(nb);
      }
    }
    if (candidates.empty())
      for (std::size_t v = 0; v < n; ++v)
        if (!visited[v]) candidates.push_back(static_cast<int>(v));
    current = candidates[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1))];
  }
  return child;
}

inline std::pair<XpGenotype, XpGenotype> edge_crossover(const XpGenotype& p1, const XpGenotype& p2, Rng& rng) {
  XpGenotype c1{edge_child(p1.perm, p2.perm, p1.perm.front(), rng), p1.rate_gene};
  XpGenotype c2{edge_child(p1.perm, p2.perm, p2.perm.front(), rng), p2.rate_gene};
  return {std::move(c1), std::move(c2)};
}

inline std::pair<NgGenotype, NgGenotype> crossover(const NgGenotype& p1, const NgGenotype& p2, Crossover op,
                                                   Rng& rng) {
  if (p1.alleles.size() != p2.alleles.size()) throw std::invalid_argument("parents differ in length");
  switch (op) {
    case Crossover::one_point: {
      const int d = static_cast<int>(p1.alleles.size());
      const int cut = d < 2 ? 0 : uniform_int(rng, 1, d - 1);
      return one_point_crossover(p1, p2, static_cast<std::size_t>(cut));
    }
    case Crossover::uniform:
      return uniform_crossover(p1, p2, rng);
    default:
      throw std::invalid_argument(to_string(op) + " crossover does not apply to the NG encoding");
  }
}

inline std::pair<XpGenotype, XpGenotype> crossover(const XpGenotype& p1, const XpGenotype& p2, Crossover op,
                                                   Rng& rng) {
  if (p1.perm.size() != p2.perm.size()) throw std::invalid_argument("parents differ in length");
  switch (op) {
    case Crossover::order_based:
      return order_crossover(p1, p2, rng);
    case Crossover::edge_recombination:
      return edge_crossover(p1, p2, rng);
    default:
      throw std::invalid_argument(to_string(op) + " crossover does not apply to the XP encoding");
  }
}

// ---------------------------------------------------------------------------
// Invariant checks, used by tests and by engines in debug paths.

inline bool valid_ng(const NgGenotype& g, const DesignProblem& p) {
  if (static_cast<int>(g.alleles.size()) != p.element_count()) return false;
  return std::all_of(g.alleles.begin(), g.alleles.end(), [&](int v) { return v >= 1 && v <= p.class_count(); });
}

inline bool valid_xp(const XpGenotype& g, const DesignProblem& p) {
  const std::size_t n = static_cast<std::size_t>(p.element_count() + p.class_count());
  if (g.perm.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : g.perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

}  // namespace designsearch
