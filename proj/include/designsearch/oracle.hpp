#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evaluation.hpp"
#include "fitness.hpp"
#include "problem.hpp"

namespace designsearch {

class InstanceTooLarge : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  double best_fitness = 0.0;
  Design witness;
  long feasible_designs = 0;
};

inline constexpr double kOracleGuard = 1e7;

// Exhaustive search over all c^e label vectors, skipping infeasible ones.
inline OracleResult brute_force_optimum(const DesignProblem& p, Objective objective = Objective::coupling) {
  if (objective != Objective::coupling)
    throw std::invalid_argument("the oracle only supports the deterministic coupling objective");
  const int e = p.element_count(), c = p.class_count();
  if (std::pow(static_cast<double>(c), static_cast<double>(e)) > kOracleGuard)
    throw InstanceTooLarge(std::to_string(c) + "^" + std::to_string(e) + " designs exceed the enumeration guard");

  Assignment a{std::vector<int>(static_cast<std::size_t>(e), 0), c};
  OracleResult result;
  result.best_fitness = -1.0;
  Assignment best;
  while (true) {
    if (is_feasible(a, p)) {
      ++result.feasible_designs;
      const double f = coupling_fitness(a, p);
      if (f > result.best_fitness) {
        result.best_fitness = f;
        best = a;
      }
    }
    int k = 0;
    while (k < e && ++a.class_of[static_cast<std::size_t>(k)] == c) a.class_of[static_cast<std::size_t>(k++)] = 0;
    if (k == e) break;
  }
  if (result.feasible_designs == 0) throw std::logic_error("no feasible design exists");
  result.witness = Design::from_assignment(best, p);
  return result;
}

}  // namespace designsearch
