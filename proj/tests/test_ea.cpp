#include <gtest/gtest.h>

#include <cmath>

#include <designsearch/ea.hpp>
#include <designsearch/fixtures.hpp>
#include <designsearch/oracle.hpp>

using namespace designsearch;

namespace {

EaConfig toy_config(Encoding enc, long budget, double target) {
  EaConfig c;
  c.encoding = enc;
  c.population_size = 10;
  c.search.budget = budget;
  c.search.target_fitness = target;
  c.search.constraint = ConstraintMode::direct;
  return c;
}

// Probability that rank r (0 = best, n distinct values) wins a k-tournament with replacement.
double tournament_oracle(int n, int k, int r) {
  const double worse_or_equal = static_cast<double>(n - r) / n;
  const double strictly_worse = static_cast<double>(n - r - 1) / n;
  return std::pow(worse_or_equal, k) - std::pow(strictly_worse, k);
}

}  // namespace

TEST(Tournament, MatchesExactSelectionDistribution) {
  const std::vector<double> fitness{5, 9, 1, 7, 3};  // ranks: 9,7,5,3,1
  const std::vector<int> rank_of{2, 0, 4, 1, 3};
  Rng rng(1);
  for (int k : {1, 2, 3}) {
    std::vector<int> counts(5, 0);
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) ++counts[tournament_select(fitness, k, rng)];
    for (int i = 0; i < 5; ++i) {
      const double p = tournament_oracle(5, k, rank_of[static_cast<std::size_t>(i)]);
      const double sd = std::sqrt(p * (1 - p) / draws);
      EXPECT_NEAR(counts[static_cast<std::size_t>(i)] / static_cast<double>(draws), p, 4 * sd + 1e-9) << "k=" << k;
    }
  }
}

TEST(Tournament, TiesGoToLowestIndex) {
  const std::vector<double> fitness{4, 4, 4};
  Rng rng(2);
  std::vector<int> counts(3, 0);
  for (int t = 0; t < 9000; ++t) ++counts[tournament_select(fitness, 2, rng)];
  // index i wins unless a lower index is drawn: P = ((3-i)^2 - (2-i)^2)/9
  EXPECT_NEAR(counts[0] / 9000.0, 5.0 / 9, 0.02);
  EXPECT_NEAR(counts[1] / 9000.0, 3.0 / 9, 0.02);
  EXPECT_NEAR(counts[2] / 9000.0, 1.0 / 9, 0.02);
  const std::vector<double> empty;
  EXPECT_THROW(tournament_select(empty, 2, rng), std::invalid_argument);
}

TEST(Ea, FindsToyOptimumWithinFiveHundredEvaluations) {
  const auto p = toy_problem();
  const double opt = brute_force_optimum(p).best_fitness;
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto r = run_ea(p, toy_config(enc, 500, opt - 1e-9), seed);
      hits += r.best_score >= opt - 1e-9;
    }
    EXPECT_GE(hits, 49) << to_string(enc);
  }
}

TEST(Ea, ElitismKeepsBestAndDirectModeStaysFeasible) {
  const auto p = generate_instance({8, 8, 24, 4, 0.8, 8, "e"});
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    auto cfg = toy_config(enc, 3000, 100);
    long infeasible = 0;
    const auto r = run_ea(p, cfg, 5, [&](const EvaluationEvent& ev) { infeasible += !ev.feasible; });
    EXPECT_EQ(infeasible, 0);
    EXPECT_LE(r.total_evaluations, 3000);
  }
}

TEST(Ea, GenerationBestNeverDecreases) {
  const auto p = generate_instance({8, 8, 24, 3, 0.8, 9, "e"});
  auto cfg = toy_config(Encoding::ng, 1000, 100);
  EaBreeder<NgGenotype> breeder(p, cfg);
  Rng rng(3);
  auto pop = breeder.initial_population(rng);
  auto score = [&](const std::vector<NgGenotype>& gs) {
    std::vector<double> f;
    for (const auto& g : gs) f.push_back(coupling_fitness(decode_assignment(g, p), p));
    return f;
  };
  auto fit = score(pop);
  double best = fit[argmax(fit)];
  for (int gen = 0; gen < 50; ++gen) {
    auto next = breeder.next_generation(pop, fit, rng);
    ASSERT_TRUE(next);
    EXPECT_EQ(next->front(), pop[argmax(fit)]);
    pop = std::move(*next);
    fit = score(pop);
    EXPECT_GE(fit[argmax(fit)], best);
    best = fit[argmax(fit)];
    for (const auto& g : pop) EXPECT_TRUE(is_feasible(decode_assignment(g, p), p));
  }
}

TEST(Ea, IndirectModeScoresInfeasibleAsZero) {
  const auto p = generate_instance({6, 6, 15, 4, 0.8, 10, "e"});
  EaConfig cfg;
  cfg.population_size = 20;
  cfg.search.budget = 2000;
  long infeasible = 0;
  run_ea(p, cfg, 11, [&](const EvaluationEvent& ev) {
    if (!ev.feasible) {
      ++infeasible;
      EXPECT_EQ(ev.score, 0.0);
    }
  });
  EXPECT_GT(infeasible, 0);
}

TEST(Ea, NoCrossoverTinyMutationConvergesOnElite) {
  const auto p = generate_instance({8, 8, 24, 3, 0.8, 12, "e"});
  EaConfig cfg;
  cfg.population_size = 20;
  cfg.tournament_size = 4;
  cfg.crossover_prob = 0.0;
  cfg.mutation = FixedRate{1e-9};
  EaBreeder<NgGenotype> breeder(p, cfg);
  Rng rng(4);
  auto pop = breeder.initial_population(rng);
  std::vector<double> fit;
  for (const auto& g : pop) fit.push_back(coupling_fitness(decode_assignment(g, p), p));
  const auto elite = pop[argmax(fit)];
  for (int gen = 0; gen < 60; ++gen) {
    pop = *breeder.next_generation(pop, fit, rng);
    fit.clear();
    for (const auto& g : pop) fit.push_back(coupling_fitness(decode_assignment(g, p), p));
  }
  for (const auto& g : pop) EXPECT_EQ(g.alleles, elite.alleles);
}

TEST(Ea, SeededRunsAreDeterministicAndBudgeted) {
  const auto p = generate_instance({8, 8, 24, 3, 0.8, 13, "e"});
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    EaConfig cfg;
    cfg.encoding = enc;
    cfg.search.budget = 2000;
    cfg.search.objective = Objective::multi;
    const auto a = run_ea(p, cfg, 21), b = run_ea(p, cfg, 21);
    EXPECT_EQ(a.best_score, b.best_score);
    EXPECT_EQ(a.aes, b.aes);
    EXPECT_EQ(a.best_design, b.best_design);
    EXPECT_LE(a.total_evaluations, 2000);
    EXPECT_LE(a.aes, a.total_evaluations);
  }
}

TEST(Ea, ConfigValidation) {
  EaConfig cfg;
  cfg.population_size = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.crossover = Crossover::edge_recombination;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.mutation = FixedRate{0.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.crossover_prob = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
