#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include <designsearch/fitness.hpp>
#include <designsearch/fixtures.hpp>

using namespace designsearch;

namespace {

// Reference f_CBO straight from the class sets.
double oracle_cbo(const Design& d, const DesignProblem& p) {
  std::map<int, int> owner;
  for (int k = 0; k < d.class_count(); ++k)
    for (int e : d.classes()[static_cast<std::size_t>(k)]) owner[e] = k;
  int cross = 0;
  for (const auto& u : p.uses()) cross += owner.at(u.attribute) != owner.at(p.attribute_count() + u.method);
  return 100.0 - 100.0 * cross / p.use_count();
}

double oracle_pop_sd(const std::vector<double>& xs) {
  long double m = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  long double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return static_cast<double>(std::sqrt(v / xs.size()));
}

Assignment random_assignment(int e, int c, Rng& rng) {
  Assignment a{std::vector<int>(static_cast<std::size_t>(e)), c};
  for (int& v : a.class_of) v = uniform_int(rng, 0, c - 1);
  return a;
}

}  // namespace

TEST(Coupling, ToyPairings) {
  const auto p = toy_problem();
  EXPECT_NEAR(coupling_fitness(Design({{0, 2}, {1, 3}}, true), p), 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(coupling_fitness(Design({{0, 3}, {1, 2}}, true), p), 100.0 / 3.0, 1e-9);
}

TEST(Coupling, AllInternalScoresHundred) {
  const auto p = generate_instance({8, 8, 20, 3, 1.0, 3, "mod1"});
  EXPECT_DOUBLE_EQ(coupling_fitness(*p.manual_design(), p), 100.0);
  const auto q = generate_instance({8, 8, 20, 3, 0.0, 3, "mod0"});
  EXPECT_DOUBLE_EQ(coupling_fitness(*q.manual_design(), q), 0.0);
}

TEST(Coupling, MatchesOracleAndIsAffineInCrossCount) {
  const auto p = generate_instance({9, 7, 25, 4, 0.6, 11, "r"});
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const auto a = random_assignment(p.element_count(), 4, rng);
    const auto d = Design::from_assignment(a, p);
    const double f = coupling_fitness(a, p);
    EXPECT_NEAR(f, oracle_cbo(d, p), 1e-9);
    EXPECT_NEAR(f, 100.0 - cross_boundary_uses(a, p) * 100.0 / p.use_count(), 1e-9);
  }
}

TEST(Coupling, InvariantUnderRelabelingAndReordering) {
  const auto p = generate_instance({9, 7, 25, 4, 0.6, 12, "r"});
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_assignment(p.element_count(), 4, rng);
    auto classes = Design::from_assignment(a, p).classes();
    const double f = coupling_fitness(Design(classes, false), p);
    std::shuffle(classes.begin(), classes.end(), rng);
    for (auto& cls : classes) std::shuffle(cls.begin(), cls.end(), rng);
    EXPECT_DOUBLE_EQ(coupling_fitness(Design(classes, false), p), f);
  }
}

TEST(Coupling, UndefinedWithoutUses) {
  const auto p = DesignProblem::with_counts("empty", 2, 2, {}, 2);
  EXPECT_THROW(coupling_fitness(Design({{0, 2}, {1, 3}}, true), p), std::domain_error);
}

TEST(Coupling, FixtureCbsHitsKnownValue) {
  const auto fx = reference_fixtures();
  ASSERT_EQ(fx.size(), 3u);
  EXPECT_NEAR(coupling_fitness(fx[0].design, fx[0].problem), 84.6, 0.15);
  EXPECT_NEAR(coupling_fitness(fx[0].design, fx[0].problem), 100.0 * 33 / 39, 1e-9);
}

TEST(Elegance, NacExamples) {
  // sizes 2 and 4
  EXPECT_NEAR(nac_fitness(Design({{0, 3}, {1, 2, 4, 5}}, true)), 100.0 * 5.0 / 6.0, 1e-9);
  // equal sizes
  EXPECT_DOUBLE_EQ(nac_fitness(Design({{0, 1, 3}, {2, 4, 5}}, true)), 100.0);
}

TEST(Elegance, AtmrExamples) {
  const auto p = DesignProblem::with_counts("r", 4, 2, {{0, 0}}, 2);
  // ratios 1/1 and 3/1
  EXPECT_NEAR(atmr_fitness(Design({{0, 4}, {1, 2, 3, 5}}, true), p), 100.0 * 5.0 / 6.0, 1e-9);
  const auto q = DesignProblem::with_counts("q", 2, 2, {{0, 0}}, 2);
  EXPECT_DOUBLE_EQ(atmr_fitness(Design({{0, 2}, {1, 3}}, true), q), 100.0);
}

TEST(Elegance, AtmrNeedsMethodsInEveryClass) {
  const auto p = DesignProblem::with_counts("r", 3, 1, {{0, 0}}, 1);
  EXPECT_THROW(atmr_fitness(ClassProfile({{0, 0, 0, 1}, 2}, p)), std::domain_error);
}

TEST(Elegance, NegativeWhenUnclampedAndBoundedWhenClamped) {
  // ratios 1 and 15: sd 7 > R
  const auto p = DesignProblem::with_counts("wide", 16, 2, {{0, 0}}, 2);
  std::vector<int> big{1};
  for (int a = 2; a < 16; ++a) big.push_back(a);
  big.push_back(17);
  const Design d({{0, 16}, big}, true);
  EXPECT_NEAR(atmr_fitness(d, p), 100.0 * (6.0 - 7.0) / 6.0, 1e-9);
  EXPECT_LT(atmr_fitness(d, p), 0.0);
  EXPECT_DOUBLE_EQ(atmr_fitness(d, p, {6.0, true}), 0.0);
}

TEST(Elegance, PropertyScoresMatchOracleAndRanges) {
  const auto p = generate_instance({12, 9, 30, 4, 0.5, 21, "e"});
  Rng rng(8);
  int checked = 0;
  while (checked < 300) {
    const auto a = random_assignment(p.element_count(), 4, rng);
    if (!is_feasible(a, p)) continue;
    ++checked;
    const ClassProfile prof(a, p);
    std::vector<double> sizes, ratios;
    for (int k = 0; k < 4; ++k) {
      sizes.push_back(prof.attributes[k] + prof.methods[k]);
      ratios.push_back(static_cast<double>(prof.attributes[k]) / prof.methods[k]);
    }
    const double nac = nac_fitness(prof), atmr = atmr_fitness(prof);
    EXPECT_NEAR(nac, 100.0 * (6.0 - oracle_pop_sd(sizes)) / 6.0, 1e-9);
    EXPECT_NEAR(atmr, 100.0 * (6.0 - oracle_pop_sd(ratios)) / 6.0, 1e-9);
    EXPECT_LE(nac, 100.0);
    EXPECT_LE(atmr, 100.0);
    const double cn = nac_fitness(prof, {6.0, true}), ca = atmr_fitness(prof, {6.0, true});
    EXPECT_GE(cn, 0.0);
    EXPECT_LE(cn, 100.0);
    EXPECT_GE(ca, 0.0);
    EXPECT_LE(ca, 100.0);
    EXPECT_EQ(nac == 100.0, oracle_pop_sd(sizes) == 0.0);
  }
}

TEST(Elegance, RejectsNonPositiveScale) {
  EXPECT_THROW(nac_fitness(Design({{0, 1}}, true), {0.0, false}), std::invalid_argument);
}

TEST(Measure, InfeasibleIsZeroed) {
  const auto p = toy_problem();
  const auto f = measure({{0, 1, 0, 0}, 2}, p);
  EXPECT_TRUE(f.infeasible_zeroed);
  EXPECT_EQ(f.f_cbo, 0.0);
  EXPECT_EQ(f.f_nac, 0.0);
  EXPECT_EQ(f.f_atmr, 0.0);
  EXPECT_FALSE(measure({{0, 1, 0, 1}, 2}, p).infeasible_zeroed);
}

TEST(MultiObjective, WeightsSumToOneWithBInRange) {
  SplitMix64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const auto w = sample_mo_weights(0.8, rng);
    EXPECT_NEAR(w.a + w.b + w.c, 1.0, 1e-12);
    EXPECT_GT(w.b, 0.0);
    EXPECT_LT(w.b, 0.2);
  }
  EXPECT_THROW(sample_mo_weights(1.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_mo_weights(0.0, rng), std::invalid_argument);
}

TEST(MultiObjective, ArithmeticExamples) {
  FitnessVector f;
  f.f_cbo = 50;
  f.f_nac = 80;
  f.f_atmr = 20;
  EXPECT_NEAR(weighted_sum(f, {0.8, 0.1, 0.1}), 50.0, 1e-12);
  SplitMix64 rng(9);
  FitnessVector perfect;
  perfect.f_cbo = perfect.f_nac = perfect.f_atmr = 100;
  FitnessVector coupling_only;
  coupling_only.f_cbo = 100;
  for (int i = 0; i < 100; ++i) {
    const auto w = sample_mo_weights(0.8, rng);
    EXPECT_NEAR(weighted_sum(perfect, w), 100.0, 1e-9);
    EXPECT_NEAR(weighted_sum(coupling_only, w), 80.0, 1e-9);
  }
}

TEST(MultiObjective, MeanOverWeightDistribution) {
  const auto fx = reference_fixtures()[1];
  const auto a = fx.design.assignment(fx.problem.element_count());
  const auto f = measure(a, fx.problem);
  SplitMix64 rng(77);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += mo_fitness(fx.design, fx.problem, 0.8, rng).first;
  EXPECT_NEAR(sum / n, 0.8 * f.f_cbo + 0.1 * (f.f_nac + f.f_atmr), 0.5);
}

TEST(MultiObjective, ReproducibleAndRequiresFeasible) {
  const auto p = toy_problem();
  const Design good({{0, 2}, {1, 3}}, true);
  SplitMix64 r1(5), r2(5);
  const auto x = mo_fitness(good, p, 0.8, r1), y = mo_fitness(good, p, 0.8, r2);
  EXPECT_EQ(x.first, y.first);
  EXPECT_EQ(x.second.b, y.second.b);
  EXPECT_THROW(mo_fitness(Design({{0, 1}, {2, 3}}, false), p, 0.8, r1), std::domain_error);
}
