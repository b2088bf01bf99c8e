#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "encodings.hpp"
#include "evaluation.hpp"

namespace designsearch {

// Symmetric trail strengths over the e + c nodes of the XP graph (elements
// then markers). Frozen pairs stay pinned at their high value.
class PheromoneMatrix {
 public:
  explicit PheromoneMatrix(int nodes, double tau0 = 1.0)
      : n_(nodes), tau0_(tau0), tau_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), tau0) {
    if (nodes < 1) throw std::invalid_argument("pheromone matrix needs at least one node");
    if (tau0 < 0.0) throw std::invalid_argument("initial pheromone must be non-negative");
  }

  int nodes() const noexcept { return n_; }
  double tau0() const noexcept { return tau0_; }

  double at(int i, int j) const { return tau_[index(i, j)]; }

  void set(int i, int j, double v) {
    if (v < 0.0) throw std::invalid_argument("pheromone must be non-negative");
    tau_[index(i, j)] = v;
    tau_[index(j, i)] = v;
  }

  void add(int i, int j, double amount) { set(i, j, at(i, j) + amount); }

  void evaporate(double rho) {
    for (double& t : tau_) t *= (1.0 - rho);
  }

  // Pins every pair in `pairs` at `level`; returns a handle for unpinning.
  int pin(const std::vector<std::pair<int, int>>& pairs, double level) {
    const int handle = next_handle_++;
    pins_[handle] = {pairs, level};
    reapply_pins();
    return handle;
  }

  // Removes a pin group and restores its pairs to tau0 (unless still pinned by another group).
  void unpin(int handle) {
    auto it = pins_.find(handle);
    if (it == pins_.end()) throw std::out_of_range("unknown frozen group " + std::to_string(handle));
    const auto pairs = it->second.first;
    pins_.erase(it);
    for (const auto& [i, j] : pairs) set(i, j, tau0_);
    reapply_pins();
  }

  void reapply_pins() {
    for (const auto& [_, group] : pins_)
      for (const auto& [i, j] : group.first) set(i, j, group.second);
  }

  bool is_pinned(int i, int j) const {
    for (const auto& [_, group] : pins_)
      for (const auto& [a, b] : group.first)
        if ((a == i && b == j) || (a == j && b == i)) return true;
    return false;
  }

  std::size_t pin_groups() const noexcept { return pins_.size(); }
  std::span<const double> raw() const noexcept { return tau_; }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("pheromone index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_;
  double tau0_;
  std::vector<double> tau_;
  std::map<int, std::pair<std::vector<std::pair<int, int>>, double>> pins_;
  int next_handle_ = 0;
};

// Trail construction against a fixed pheromone snapshot; caches tau^alpha.
class TrailBuilder {
 public:
  TrailBuilder(const PheromoneMatrix& pher, double alpha) : n_(pher.nodes()), weights_(pher.raw().begin(), pher.raw().end()) {
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    if (alpha == 0.0)
      std::fill(weights_.begin(), weights_.end(), 1.0);
    else if (alpha != 1.0)
      for (double& w : weights_) w = std::pow(w, alpha);
  }

  // Random start node, then unvisited nodes with probability proportional to
  // tau[current][next]^alpha (uniform if every weight is zero).
  XpGenotype build(Rng& rng) const {
    std::vector<int> unvisited(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) unvisited[static_cast<std::size_t>(i)] = i;
    XpGenotype trail;
    trail.perm.reserve(static_cast<std::size_t>(n_));
    std::size_t pick = static_cast<std::size_t>(uniform_int(rng, 0, n_ - 1));
    std::vector<double> cumulative(static_cast<std::size_t>(n_));
    while (true) {
      const int current = unvisited[pick];
      trail.perm.push_back(current);
      unvisited[pick] = unvisited.back();
      unvisited.pop_back();
      if (unvisited.empty()) break;

      const double* row = &weights_[static_cast<std::size_t>(current) * static_cast<std::size_t>(n_)];
      double total = 0.0;
      for (std::size_t k = 0; k < unvisited.size(); ++k) {
        total += row[unvisited[k]];
        cumulative[k] = total;
      }
      if (!(total > 0.0) || !std::isfinite(total)) {
        pick = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(unvisited.size()) - 1));
        continue;
      }
      const double r = unit(rng) * total;
      pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(),
                                                       cumulative.begin() + static_cast<long>(unvisited.size()), r) -
                                      cumulative.begin());
      if (pick >= unvisited.size()) pick = unvisited.size() - 1;
    }
    return trail;
  }

 private:
  int n_;
  std::vector<double> weights_;
};

inline XpGenotype construct_trail(const PheromoneMatrix& pher, double alpha, Rng& rng) {
  return TrailBuilder(pher, alpha).build(rng);
}

struct ScoredTrail {
  const XpGenotype* trail = nullptr;
  double fitness = 0.0;  // 0..100
};

// Evaporate everything by rho, then every link of every trail (including the
// closing link) gains mu * fitness / 100. Pinned pairs are restored last.
inline void update_pheromone(PheromoneMatrix& pher, std::span<const ScoredTrail> trails, double mu, double rho) {
  if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
  pher.evaporate(rho);
  for (const auto& t : trails) {
    const double amount = mu * t.fitness / 100.0;
    if (amount <= 0.0) continue;
    const auto& perm = t.trail->perm;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const int u = perm[k], v = perm[(k + 1) % perm.size()];
      if (u != v) pher.add(u, v, amount);
    }
  }
  pher.reapply_pins();
}

// Pins all pairs inside a feasible class so constructed trails keep its
// elements contiguous. Returns the handle used to unfreeze.
inline int freeze_class(PheromoneMatrix& pher, const DesignProblem& problem, const std::vector<int>& elements,
                        double tau_high) {
  bool has_attr = false, has_method = false;
  std::set<int> unique(elements.begin(), elements.end());
  for (int e : unique) {
    if (e < 0 || e >= problem.element_count()) throw std::invalid_argument("element index out of range");
    (problem.is_attribute(e) ? has_attr : has_method) = true;
  }
  if (!has_attr || !has_method)
    throw std::invalid_argument("only a feasible class (at least one attribute and one method) can be frozen");
  std::vector<std::pair<int, int>> pairs;
  for (auto i = unique.begin(); i != unique.end(); ++i)
    for (auto j = std::next(i); j != unique.end(); ++j) pairs.emplace_back(*i, *j);
  return pher.pin(pairs, tau_high);
}

inline void unfreeze_class(PheromoneMatrix& pher, int handle) { pher.unpin(handle); }

struct AcoConfig {
  double alpha = 1.5;
  double mu = 3.0;
  double rho = 0.1;
  int colony_size = 25;
  int regeneration_cap = 50;
  double tau0 = 1.0;
  double tau_high = 1e6;
  SearchSettings search;

  void validate() const {
    search.validate();
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    if (colony_size < 1) throw std::invalid_argument("colony size must be at least 1");
    if (regeneration_cap < 0) throw std::invalid_argument("regeneration cap must be non-negative");
  }
};

// One ant's outcome for an iteration.
struct AntTrail {
  XpGenotype trail;
  Assignment assignment;
  bool feasible = false;
};

// Pheromone state plus colony construction; drives both batch runs and
// interactive sessions.
class AntColony {
 public:
  AntColony(const DesignProblem& problem, AcoConfig cfg)
      : problem_(problem), cfg_(std::move(cfg)), pher_(problem.element_count() + problem.class_count(), cfg_.tau0) {
    cfg_.validate();
  }

  const AcoConfig& config() const noexcept { return cfg_; }
  PheromoneMatrix& pheromone() noexcept { return pher_; }
  const PheromoneMatrix& pheromone() const noexcept { return pher_; }

  // One iteration's worth of trails. In direct mode an ant rebuilds an
  // infeasible trail up to `attempts_cap` more times; a negative cap means
  // rebuild until feasible.
  std::vector<AntTrail> construct(Rng& rng, bool direct, long attempts_cap) const {
    const TrailBuilder builder(pher_, cfg_.alpha);
    std::vector<AntTrail> ants;
    ants.reserve(static_cast<std::size_t>(cfg_.colony_size));
    for (int k = 0; k < cfg_.colony_size; ++k) {
      AntTrail ant;
      long rebuilds = 0;
      while (true) {
        ant.trail = builder.build(rng);
        ant.assignment = decode_assignment(ant.trail, problem_);
        ant.feasible = is_feasible(ant.assignment, problem_);
        if (ant.feasible || !direct) break;
        if (attempts_cap >= 0 && rebuilds >= attempts_cap) break;
        if (attempts_cap < 0 && rebuilds >= kRebuildValve)
          throw std::runtime_error("ant failed to build a feasible trail after " + std::to_string(kRebuildValve) +
                                   " attempts");
        ++rebuilds;
      }
      ants.push_back(std::move(ant));
    }
    return ants;
  }

  void learn(const std::vector<AntTrail>& ants, std::span<const double> fitness) {
    std::vector<ScoredTrail> scored;
    scored.reserve(fitness.size());
    for (std::size_t k = 0; k < fitness.size(); ++k) scored.push_back({&ants[k].trail, fitness[k]});
    update_pheromone(pher_, scored, cfg_.mu, cfg_.rho);
  }

  int freeze(const std::vector<int>& elements) { return freeze_class(pher_, problem_, elements, cfg_.tau_high); }
  void unfreeze(int handle) { unfreeze_class(pher_, handle); }

  static constexpr long kRebuildValve = 1'000'000;

 private:
  const DesignProblem& problem_;
  AcoConfig cfg_;
  PheromoneMatrix pher_;
};

inline RunRecord run_aco(const DesignProblem& p, const AcoConfig& cfg, std::uint64_t seed,
                         EvaluationObserver observer = {}) {
  AntColony colony(p, cfg);
  Evaluator eval(p, cfg.search, seed, std::move(observer));
  Rng rng(derive_seed(seed, 0xac0ULL));
  const bool direct = cfg.search.constraint == ConstraintMode::direct;

  while (!eval.done()) {
    const auto ants = colony.construct(rng, direct, cfg.regeneration_cap);
    std::vector<double> fitness;
    fitness.reserve(ants.size());
    for (const auto& ant : ants) {
      if (eval.done()) break;
      // Cap-exhausted ants still cost an evaluation; they score 0 and deposit nothing.
      fitness.push_back(eval.evaluate(ant.assignment));
    }
    if (fitness.size() < ants.size()) break;
    colony.learn(ants, fitness);
  }
  return eval.record("aco", Encoding::xp, seed);
}

}  // namespace designsearch
