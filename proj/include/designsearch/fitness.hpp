#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "problem.hpp"
#include "random.hpp"

namespace designsearch {

struct FitnessVector {
  double f_cbo = 0.0;
  double f_nac = 0.0;
  double f_atmr = 0.0;
  std::optional<double> f_mo;
  bool infeasible_zeroed = false;

  static FitnessVector zeroed() {
    FitnessVector f;
    f.infeasible_zeroed = true;
    return f;
  }
};

struct EleganceConfig {
  double scale = 6.0;  // R
  bool clamp = false;
};

struct MoWeights {
  double a = 0.8;
  double b = 0.1;
  double c = 0.1;
};

// Per-class attribute and method counts of an assignment.
struct ClassProfile {
  std::vector<int> attributes;
  std::vector<int> methods;

  ClassProfile(const Assignment& assignment, const DesignProblem& problem)
      : attributes(static_cast<std::size_t>(assignment.class_count), 0),
        methods(static_cast<std::size_t>(assignment.class_count), 0) {
    const int n_attr = problem.attribute_count();
    for (std::size_t e = 0; e < assignment.class_of.size(); ++e)
      ++(static_cast<int>(e) < n_attr ? attributes : methods)[static_cast<std::size_t>(assignment.class_of[e])];
  }
};

namespace detail {

inline double population_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double elegance_score(double spread, const EleganceConfig& cfg) {
  if (!(cfg.scale > 0.0)) throw std::invalid_argument("elegance scale R must be positive");
  if (cfg.clamp) spread = std::clamp(spread, 0.0, cfg.scale);
  return 100.0 * (cfg.scale - spread) / cfg.scale;
}

}  // namespace detail

inline int cross_boundary_uses(const Assignment& a, const DesignProblem& problem) {
  int cross = 0;
  for (const auto& u : problem.uses())
    cross += a.class_of[static_cast<std::size_t>(u.attribute)] !=
             a.class_of[static_cast<std::size_t>(problem.method_element(u.method))];
  return cross;
}

// (1 - CBO) * 100, where CBO is the fraction of uses crossing class boundaries.
inline double coupling_fitness(const Assignment& a, const DesignProblem& problem) {
  if (problem.use_count() == 0) throw std::domain_error("coupling is undefined for an instance without uses");
  const double cbo = static_cast<double>(cross_boundary_uses(a, problem)) / problem.use_count();
  return (1.0 - cbo) * 100.0;
}

inline double coupling_fitness(const Design& d, const DesignProblem& problem) {
  return coupling_fitness(d.assignment(problem.element_count()), problem);
}

// Spread of total element counts per class.
inline double nac_fitness(const ClassProfile& profile, const EleganceConfig& cfg = {}) {
  std::vector<double> sizes;
  sizes.reserve(profile.attributes.size());
  for (std::size_t k = 0; k < profile.attributes.size(); ++k)
    sizes.push_back(profile.attributes[k] + profile.methods[k]);
  return detail::elegance_score(detail::population_stddev(sizes), cfg);
}

inline double nac_fitness(const Design& d, const EleganceConfig& cfg = {}) {
  std::vector<double> sizes;
  for (const auto& cls : d.classes()) sizes.push_back(static_cast<double>(cls.size()));
  return detail::elegance_score(detail::population_stddev(sizes), cfg);
}

// Spread of attribute/method ratios per class. Every class needs a method.
inline double atmr_fitness(const ClassProfile& profile, const EleganceConfig& cfg = {}) {
  std::vector<double> ratios;
  ratios.reserve(profile.attributes.size());
  for (std::size_t k = 0; k < profile.attributes.size(); ++k) {
    if (profile.methods[k] == 0) throw std::domain_error("attribute/method ratio undefined for a class without methods");
    ratios.push_back(static_cast<double>(profile.attributes[k]) / profile.methods[k]);
  }
  return detail::elegance_score(detail::population_stddev(ratios), cfg);
}

inline double atmr_fitness(const Design& d, const DesignProblem& problem, const EleganceConfig& cfg = {}) {
  return atmr_fitness(ClassProfile(d.assignment(problem.element_count()), problem), cfg);
}

// b ~ U(0, 1-a), c = 1 - a - b.
template <class Urbg>
MoWeights sample_mo_weights(double a, Urbg& rng) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("coupling weight a must lie in (0, 1)");
  MoWeights w;
  w.a = a;
  w.b = (1.0 - a) * open_unit(rng);
  w.c = 1.0 - a - w.b;
  return w;
}

inline double weighted_sum(const FitnessVector& f, const MoWeights& w) {
  return w.a * f.f_cbo + w.b * f.f_nac + w.c * f.f_atmr;
}

// All three measures for a feasible assignment; an infeasible one is zeroed.
inline FitnessVector measure(const Assignment& a, const DesignProblem& problem, const EleganceConfig& cfg = {}) {
  const ClassProfile profile(a, problem);
  for (std::size_t k = 0; k < profile.attributes.size(); ++k)
    if (profile.attributes[k] == 0 || profile.methods[k] == 0) return FitnessVector::zeroed();
  FitnessVector f;
  f.f_cbo = coupling_fitness(a, problem);
  f.f_nac = nac_fitness(profile, cfg);
  f.f_atmr = atmr_fitness(profile, cfg);
  return f;
}

// Noisy weighted sum simulating a human evaluation; the design must be feasible.
template <class Urbg>
std::pair<double, MoWeights> mo_fitness(const Design& design, const DesignProblem& problem, double a, Urbg& rng,
                                        const EleganceConfig& cfg = {}) {
  const auto assignment = design.assignment(problem.element_count());
  if (!is_feasible(assignment, problem)) throw std::domain_error("multi-objective fitness requires a feasible design");
  const auto f = measure(assignment, problem, cfg);
  const auto w = sample_mo_weights(a, rng);
  return {weighted_sum(f, w), w};
}

}  // namespace designsearch
