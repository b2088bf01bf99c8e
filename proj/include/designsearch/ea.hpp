#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "encodings.hpp"
#include "evaluation.hpp"

namespace designsearch {

struct FixedRate {
  double rate = 0.01;
};

struct SelfAdaptive {
  RateSet rates;
};

using MutationScheme = std::variant<FixedRate, SelfAdaptive>;

struct EaConfig {
  Encoding encoding = Encoding::ng;
  int population_size = 25;
  int tournament_size = 2;
  std::optional<Crossover> crossover;  // uniform (NG) / order-based (XP) when unset
  double crossover_prob = 0.6;
  MutationScheme mutation = SelfAdaptive{};
  SearchSettings search;
  long max_consecutive_failures = 1'000'000;

  Crossover crossover_operator() const {
    return crossover.value_or(encoding == Encoding::ng ? Crossover::uniform : Crossover::order_based);
  }

  void validate() const {
    search.validate();
    if (population_size < 2) throw std::invalid_argument("population size must be at least 2");
    if (tournament_size < 1) throw std::invalid_argument("tournament size must be at least 1");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
      throw std::invalid_argument("crossover probability must lie in [0, 1]");
    if (!compatible(crossover_operator(), encoding))
      throw std::invalid_argument(to_string(crossover_operator()) + " crossover is incompatible with " +
                                  to_string(encoding));
    if (const auto* f = std::get_if<FixedRate>(&mutation); f && !(f->rate > 0.0 && f->rate <= 1.0))
      throw std::invalid_argument("fixed mutation rate must lie in (0, 1]");
    if (const auto* s = std::get_if<SelfAdaptive>(&mutation)) s->rates.validate();
  }

  bool self_adaptive() const noexcept { return std::holds_alternative<SelfAdaptive>(mutation); }
  const RateSet* rate_set() const noexcept {
    const auto* s = std::get_if<SelfAdaptive>(&mutation);
    return s ? &s->rates : nullptr;
  }
};

// k draws with replacement; highest fitness wins, ties to the lowest index.
inline std::size_t tournament_select(std::span<const double> fitness, int k, Rng& rng) {
  if (fitness.empty()) throw std::invalid_argument("tournament over an empty population");
  const int n = static_cast<int>(fitness.size());
  std::size_t best = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
  for (int i = 1; i < k; ++i) {
    const auto c = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
    if (fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best)) best = c;
  }
  return best;
}

inline std::size_t argmax(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

// Generational breeding with an elite of one. Stateless apart from the
// problem and configuration; also drives interactive sessions.
template <class Genotype>
class EaBreeder {
 public:
  EaBreeder(const DesignProblem& problem, EaConfig cfg) : problem_(problem), cfg_(std::move(cfg)) { cfg_.validate(); }

  const EaConfig& config() const noexcept { return cfg_; }

  std::vector<Genotype> initial_population(Rng& rng) const {
    std::vector<Genotype> pop;
    pop.reserve(static_cast<std::size_t>(cfg_.population_size));
    auto make = [&] { return random_genotype<Genotype>(problem_, rng, cfg_.rate_set()); };
    for (int i = 0; i < cfg_.population_size; ++i)
      pop.push_back(direct() ? draw_feasible<Genotype>(problem_, make, cfg_.max_consecutive_failures) : make());
    return pop;
  }

  Genotype mutate(Genotype g, Rng& rng) const {
    if (const auto* s = std::get_if<SelfAdaptive>(&cfg_.mutation)) {
      if constexpr (std::is_same_v<Genotype, NgGenotype>)
        return self_adapt_mutate(std::move(g), s->rates, problem_.class_count(), rng);
      else
        return self_adapt_mutate(std::move(g), s->rates, rng);
    }
    const double rate = std::get<FixedRate>(cfg_.mutation).rate;
    if constexpr (std::is_same_v<Genotype, NgGenotype>)
      return mutate_ng(std::move(g), rate, problem_.class_count(), rng);
    else
      return mutate_xp(std::move(g), rate, rng);
  }

  std::pair<Genotype, Genotype> vary(const Genotype& p1, const Genotype& p2, Rng& rng) const {
    auto children = bernoulli(rng, cfg_.crossover_prob) ? crossover(p1, p2, cfg_.crossover_operator(), rng)
                                                        : std::pair<Genotype, Genotype>{p1, p2};
    return {mutate(std::move(children.first), rng), mutate(std::move(children.second), rng)};
  }

  // Next generation: slot 0 holds an unchanged copy of the current best.
  // Returns nullopt if direct-mode regeneration hits the failure valve.
  std::optional<std::vector<Genotype>> next_generation(const std::vector<Genotype>& pop,
                                                       std::span<const double> fitness, Rng& rng) const {
    const std::size_t n = pop.size();
    std::vector<Genotype> next;
    next.reserve(n);
    next.push_back(pop[argmax(fitness)]);
    while (next.size() < n) {
      const Genotype& p1 = pop[tournament_select(fitness, cfg_.tournament_size, rng)];
      const Genotype& p2 = pop[tournament_select(fitness, cfg_.tournament_size, rng)];
      const std::size_t want = std::min<std::size_t>(2, n - next.size());
      if (!direct()) {
        auto [c1, c2] = vary(p1, p2, rng);
        next.push_back(std::move(c1));
        if (want == 2) next.push_back(std::move(c2));
        continue;
      }
      std::size_t got = 0;
      long failures = 0;
      while (got < want) {
        auto [c1, c2] = vary(p1, p2, rng);
        bool accepted = false;
        for (Genotype* c : {&c1, &c2}) {
          if (got < want && is_feasible(decode_assignment(*c, problem_), problem_)) {
            next.push_back(std::move(*c));
            ++got;
            accepted = true;
          }
        }
        if (accepted) {
          failures = 0;
        } else if (++failures >= cfg_.max_consecutive_failures) {
          return std::nullopt;
        }
      }
    }
    return next;
  }

 private:
  bool direct() const noexcept { return cfg_.search.constraint == ConstraintMode::direct; }

  const DesignProblem& problem_;
  EaConfig cfg_;
};

namespace detail {

template <class Genotype>
RunRecord run_ea_impl(const DesignProblem& p, const EaConfig& cfg, std::uint64_t seed, EvaluationObserver observer) {
  EaBreeder<Genotype> breeder(p, cfg);
  Evaluator eval(p, cfg.search, seed, std::move(observer));
  Rng rng(derive_seed(seed, 0xea5ULL));
  const bool reevaluate_elite = cfg.search.objective == Objective::multi;

  std::vector<Genotype> pop = breeder.initial_population(rng);
  std::vector<double> fitness;
  fitness.reserve(pop.size());
  for (const auto& g : pop) {
    if (eval.done()) break;
    fitness.push_back(eval.evaluate(decode_assignment(g, p)));
  }

  bool aborted = false;
  while (!eval.done()) {
    auto next = breeder.next_generation(pop, fitness, rng);
    if (!next) {
      aborted = true;
      break;
    }
    std::vector<double> next_fitness;
    next_fitness.reserve(next->size());
    next_fitness.push_back(reevaluate_elite ? eval.evaluate(decode_assignment(next->front(), p))
                                            : fitness[argmax(fitness)]);
    for (std::size_t i = 1; i < next->size() && !eval.done(); ++i)
      next_fitness.push_back(eval.evaluate(decode_assignment((*next)[i], p)));
    if (next_fitness.size() < next->size()) break;  // budget ran out mid-generation
    pop = std::move(*next);
    fitness = std::move(next_fitness);
  }

  auto record = eval.record("ea", cfg.encoding, seed);
  record.aborted = aborted;
  return record;
}

}  // namespace detail

inline RunRecord run_ea(const DesignProblem& p, const EaConfig& cfg, std::uint64_t seed,
                        EvaluationObserver observer = {}) {
  if (cfg.encoding == Encoding::ng) return detail::run_ea_impl<NgGenotype>(p, cfg, seed, std::move(observer));
  return detail::run_ea_impl<XpGenotype>(p, cfg, seed, std::move(observer));
}

}  // namespace designsearch
