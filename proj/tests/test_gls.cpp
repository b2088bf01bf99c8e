#include <gtest/gtest.h>

#include <designsearch/fixtures.hpp>
#include <designsearch/gls.hpp>
#include <designsearch/oracle.hpp>

using namespace designsearch;

namespace {

SearchSettings budgeted(long budget, double target = 100.0) {
  SearchSettings s;
  s.budget = budget;
  s.target_fitness = target;
  return s;
}

}  // namespace

TEST(Gls, FindsToyOptimumQuickly) {
  const auto p = toy_problem();
  const double opt = brute_force_optimum(p).best_fitness;
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto r = run_gls(p, {enc, budgeted(1000, opt - 1e-9)}, seed);
      hits += r.best_score >= opt - 1e-9;
      EXPECT_LE(r.best_score, opt + 1e-9);
    }
    EXPECT_EQ(hits, 50) << to_string(enc);
  }
}

TEST(Gls, BudgetOfOneEvaluatesOnce) {
  const auto p = toy_problem();
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    const auto r = run_gls(p, {enc, budgeted(1)}, 3);
    EXPECT_EQ(r.total_evaluations, 1);
    EXPECT_EQ(r.aes, 1);
  }
}

TEST(Gls, ObserverSeesEveryEvaluationAndBestIsMonotone) {
  const auto p = generate_instance({8, 8, 24, 3, 0.8, 5, "g"});
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    long seen = 0;
    double running = -1.0;
    std::vector<double> best_trace;
    const auto r = run_gls(p, {enc, budgeted(3000)}, 9, [&](const EvaluationEvent& ev) {
      EXPECT_EQ(ev.index, ++seen);
      if (!ev.feasible) {
        EXPECT_EQ(ev.score, 0.0);
      }
      running = std::max(running, ev.score);
      best_trace.push_back(running);
    });
    EXPECT_EQ(r.total_evaluations, seen);
    EXPECT_LE(r.total_evaluations, 3000);
    EXPECT_DOUBLE_EQ(r.best_score, running);
    EXPECT_TRUE(std::is_sorted(best_trace.begin(), best_trace.end()));
    EXPECT_DOUBLE_EQ(best_trace[static_cast<std::size_t>(r.aes - 1)], r.best_score);
  }
}

TEST(Gls, DirectModeNeverEvaluatesInfeasible) {
  const auto p = generate_instance({8, 8, 24, 4, 0.8, 6, "g"});
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    auto s = budgeted(2000);
    s.constraint = ConstraintMode::direct;
    run_gls(p, {enc, s}, 4, [](const EvaluationEvent& ev) { EXPECT_TRUE(ev.feasible); });
  }
}

TEST(Gls, SeededRunsAreDeterministic) {
  const auto p = generate_instance({8, 8, 24, 3, 0.8, 7, "g"});
  for (auto enc : {Encoding::ng, Encoding::xp}) {
    const auto a = run_gls(p, {enc, budgeted(1500)}, 77);
    const auto b = run_gls(p, {enc, budgeted(1500)}, 77);
    EXPECT_EQ(a.best_score, b.best_score);
    EXPECT_EQ(a.aes, b.aes);
    EXPECT_EQ(a.best_design, b.best_design);
  }
}
