#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include <designsearch/experiment.hpp>
#include <designsearch/fixtures.hpp>
#include <designsearch/oracle.hpp>

using namespace designsearch;

namespace {

// Two-sided exact p by enumerating every way to pick a's ranks out of m + n.
double enumerated_p(int m, int n, double u_obs) {
  const int total = m + n;
  std::vector<int> counts;
  long all = 0;
  for (unsigned mask = 0; mask < (1u << total); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    int rank_sum = 0;
    for (int i = 0; i < total; ++i)
      if (mask & (1u << i)) rank_sum += i + 1;
    const int u = rank_sum - m * (m + 1) / 2;
    if (static_cast<int>(counts.size()) <= u) counts.resize(static_cast<std::size_t>(u + 1), 0);
    ++counts[static_cast<std::size_t>(u)];
    ++all;
  }
  double lower = 0, upper = 0;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (u <= u_obs) lower += counts[u];
    if (u >= u_obs) upper += counts[u];
  }
  return std::min(1.0, 2 * std::min(lower, upper) / static_cast<double>(all));
}

}  // namespace

TEST(RankTest, IdenticalSamplesAreNotSignificant) {
  const std::vector<double> a{3, 1, 4, 1, 5, 9, 2, 6};
  const auto r = rank_significance(a, a);
  EXPECT_EQ(r.direction, Direction::equal);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(RankTest, SeparatedSamples) {
  std::vector<double> a(50), b(50);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 51.0);
  const auto r = rank_significance(a, b);
  EXPECT_EQ(r.direction, Direction::b_greater);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_FALSE(r.exact);
  const auto s = rank_significance(b, a);
  EXPECT_EQ(s.direction, Direction::a_greater);
  EXPECT_NEAR(s.p_value, r.p_value, 1e-15);
}

TEST(RankTest, SingletonSamplesAreNeverSignificant) {
  const std::vector<double> a{1.0}, b{2.0};
  EXPECT_GE(rank_significance(a, b).p_value, 0.3);
  EXPECT_THROW(rank_significance(std::vector<double>{}, b), std::invalid_argument);
}

TEST(RankTest, ExactMatchesEnumeration) {
  Rng rng(1);
  for (int t = 0; t < 40; ++t) {
    const int m = uniform_int(rng, 1, 7), n = uniform_int(rng, 1, 7);
    std::vector<double> pool(static_cast<std::size_t>(m + n));
    std::iota(pool.begin(), pool.end(), 0.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<double> a(pool.begin(), pool.begin() + m), b(pool.begin() + m, pool.end());
    const auto r = rank_significance(a, b);
    ASSERT_TRUE(r.exact);
    EXPECT_NEAR(r.p_value, enumerated_p(m, n, r.u_a), 1e-12);
  }
}

TEST(RankTest, AgreesWithReferenceValues) {
  const std::vector<double> a{1.5, 3.2, 4.1, 7.7, 8.0}, b{2.2, 5.5, 6.1, 9.3, 10.4, 11.0};
  const auto r = rank_significance(a, b);
  EXPECT_DOUBLE_EQ(r.u_a, 8.0);
  EXPECT_NEAR(r.p_value, 0.24675324675324672, 1e-12);

  std::vector<double> x, y;
  for (int rep = 0; rep < 4; ++rep) {
    for (double v : {1, 2, 2, 3, 3, 3, 4, 5, 5, 6}) x.push_back(v);
    for (double v : {2, 3, 4, 4, 5, 6, 6, 7, 7, 8}) y.push_back(v);
  }
  const auto s = rank_significance(x, y);
  EXPECT_FALSE(s.exact);
  EXPECT_DOUBLE_EQ(s.u_a, 376.0);
  EXPECT_NEAR(s.p_value, 3.756470765490012e-05, 1e-9);
}

TEST(Summary, MeanAndSampleStddev) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(xs);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7.0), 1e-12);
}

TEST(Oracle, ToyOptimumAndPlantedPerfectDesign) {
  const auto r = brute_force_optimum(toy_problem());
  EXPECT_NEAR(r.best_fitness, 200.0 / 3.0, 1e-9);
  EXPECT_TRUE(r.witness.feasible());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = generate_instance({4, 4, 6, 2, 1.0, seed, "perfect"});
    EXPECT_DOUBLE_EQ(brute_force_optimum(p).best_fitness, 100.0);
  }
}

TEST(Oracle, CountsFeasibleDesigns) {
  // two attributes, two methods, two labelled classes: each class needs one of each
  const auto p = DesignProblem::with_counts("tiny", 2, 2, {{0, 0}}, 2);
  EXPECT_EQ(brute_force_optimum(p).feasible_designs, 4);
}

TEST(Oracle, GuardRejectsLargeInstances) {
  const auto fixtures = reference_fixtures();
  EXPECT_THROW(brute_force_optimum(fixtures.front().problem), InstanceTooLarge);
  EXPECT_THROW(brute_force_optimum(toy_problem(), Objective::multi), std::invalid_argument);
}

TEST(Fixtures, ReferenceDesignsReproduceKnownCoupling) {
  const auto fixtures = reference_fixtures();
  ASSERT_EQ(fixtures.size(), 3u);
  for (const auto& f : fixtures) {
    EXPECT_TRUE(f.design.feasible()) << f.problem.name();
    EXPECT_NEAR(coupling_fitness(f.design, f.problem), f.expected_f_cbo, 0.15) << f.problem.name();
  }
}

TEST(Experiment, RowsSummariesAndDeterministicCsv) {
  ExperimentPlan plan;
  plan.problems.push_back(std::make_shared<const DesignProblem>(toy_problem()));
  EaConfig ea;
  ea.search.budget = 200;
  AcoConfig aco;
  aco.search.budget = 200;
  plan.grid = {ea, aco};
  plan.runs = 3;
  plan.master_seed = 42;
  const auto res = run_experiment(plan);
  ASSERT_TRUE(res.ok());
  EXPECT_EQ(res.records.size(), 6u);
  ASSERT_EQ(res.summaries.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto best = res.best_scores(c);
    ASSERT_EQ(best.size(), 3u);
    EXPECT_NEAR(res.summaries[c].mbf, (best[0] + best[1] + best[2]) / 3.0, 1e-12);
  }

  std::ostringstream a, b, sum;
  write_records_csv(a, res, plan.runs);
  plan.threads = 1;
  write_records_csv(b, run_experiment(plan), plan.runs);
  EXPECT_EQ(a.str(), b.str());
  const auto rows = a.str();
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 7);
  write_summary_csv(sum, res);
  const auto summary = sum.str();
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 3);
}

TEST(Experiment, InvalidCellIsReportedNotRun) {
  ExperimentPlan plan;
  plan.problems.push_back(std::make_shared<const DesignProblem>(toy_problem()));
  EaConfig bad;
  bad.population_size = 1;
  plan.grid = {bad};
  plan.runs = 2;
  const auto res = run_experiment(plan);
  EXPECT_FALSE(res.ok());
  EXPECT_TRUE(res.records.empty());
  EXPECT_FALSE(res.summaries[0].error.empty());
}

TEST(Experiment, RunSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::size_t cell = 0; cell < 10; ++cell)
    for (int run = 0; run < 50; ++run) seen.insert(run_seed(7, cell, run));
  EXPECT_EQ(seen.size(), 500u);
}
