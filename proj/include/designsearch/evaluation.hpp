#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "encodings.hpp"
#include "fitness.hpp"
#include "problem.hpp"
#include "random.hpp"

namespace designsearch {

enum class Objective { coupling, multi };
enum class ConstraintMode { indirect, direct };

inline std::string to_string(Objective o) { return o == Objective::coupling ? "cbo" : "mo"; }
inline std::string to_string(ConstraintMode m) { return m == ConstraintMode::indirect ? "indirect" : "direct"; }

inline Objective parse_objective(const std::string& s) {
  if (s == "cbo") return Objective::coupling;
  if (s == "mo") return Objective::multi;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

inline ConstraintMode parse_constraint(const std::string& s) {
  if (s == "indirect") return ConstraintMode::indirect;
  if (s == "direct") return ConstraintMode::direct;
  throw std::invalid_argument("unknown constraint mode '" + s + "'");
}

// Settings shared by every engine.
struct SearchSettings {
  Objective objective = Objective::coupling;
  ConstraintMode constraint = ConstraintMode::indirect;
  long budget = 1'000'000;
  double target_fitness = 100.0;
  EleganceConfig elegance;
  double mo_weight = 0.8;

  void validate() const {
    if (budget < 1) throw std::invalid_argument("budget must be at least 1");
    if (!(elegance.scale > 0.0)) throw std::invalid_argument("elegance scale must be positive");
    if (objective == Objective::multi && !(mo_weight > 0.0 && mo_weight < 1.0))
      throw std::invalid_argument("coupling weight a must lie in (0, 1)");
  }
};

struct RunRecord {
  std::string algorithm;
  Encoding encoding = Encoding::ng;
  std::string problem;
  std::uint64_t seed = 0;
  FitnessVector best;
  double best_score = 0.0;  // objective value of `best`
  Design best_design;
  long aes = 0;
  long total_evaluations = 0;
  double wall_ms = 0.0;
  bool aborted = false;
};

// One objective call as seen by an observer.
struct EvaluationEvent {
  long index = 0;  // 1-based
  const Assignment* assignment = nullptr;
  bool feasible = false;
  const FitnessVector* fitness = nullptr;
  double score = 0.0;
};

using EvaluationObserver = std::function<void(const EvaluationEvent&)>;

// Budgeted objective with best-so-far tracking. Infeasible assignments score
// exactly 0.0. Under the multi objective the weights of evaluation i come from
// a stream keyed on (seed, i), so the score does not depend on call history.
class Evaluator {
 public:
  Evaluator(const DesignProblem& problem, const SearchSettings& settings, std::uint64_t seed,
            EvaluationObserver observer = {})
      : problem_(problem),
        settings_(settings),
        weight_seed_(derive_seed(seed, 0x3e1ULL)),
        observer_(std::move(observer)),
        started_(std::chrono::steady_clock::now()) {
    settings_.validate();
  }

  double evaluate(const Assignment& a) {
    ++count_;
    const bool feasible = is_feasible(a, problem_);
    FitnessVector f = feasible ? measure(a, problem_, settings_.elegance) : FitnessVector::zeroed();
    double score = 0.0;
    if (feasible) {
      if (settings_.objective == Objective::coupling) {
        score = f.f_cbo;
      } else {
        SplitMix64 stream(derive_seed(weight_seed_, static_cast<std::uint64_t>(count_)));
        score = weighted_sum(f, sample_mo_weights(settings_.mo_weight, stream));
        f.f_mo = score;
      }
    } else if (settings_.objective == Objective::multi) {
      f.f_mo = 0.0;
    }
    if (observer_) observer_(EvaluationEvent{count_, &a, feasible, &f, score});
    if (!has_best_ || score > best_score_) {
      has_best_ = true;
      best_score_ = score;
      best_ = f;
      best_assignment_ = a;
      aes_ = count_;
    }
    return score;
  }

  bool done() const noexcept {
    return count_ >= settings_.budget || (has_best_ && best_score_ >= settings_.target_fitness);
  }

  long evaluations() const noexcept { return count_; }
  bool has_best() const noexcept { return has_best_; }
  double best_score() const noexcept { return best_score_; }
  const SearchSettings& settings() const noexcept { return settings_; }
  const DesignProblem& problem() const noexcept { return problem_; }

  RunRecord record(std::string algorithm, Encoding encoding, std::uint64_t seed) const {
    RunRecord r;
    r.algorithm = std::move(algorithm);
    r.encoding = encoding;
    r.problem = problem_.name();
    r.seed = seed;
    r.best = best_;
    r.best_score = best_score_;
    if (has_best_) r.best_design = Design::from_assignment(best_assignment_, problem_);
    r.aes = aes_;
    r.total_evaluations = count_;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_).count();
    return r;
  }

 private:
  const DesignProblem& problem_;
  SearchSettings settings_;
  std::uint64_t weight_seed_;
  EvaluationObserver observer_;
  std::chrono::steady_clock::time_point started_;

  long count_ = 0;
  bool has_best_ = false;
  double best_score_ = -std::numeric_limits<double>::infinity();
  FitnessVector best_;
  Assignment best_assignment_;
  long aes_ = 0;
};

// Draw genotypes until one decodes to a feasible design.
template <class Genotype, class Make>
Genotype draw_feasible(const DesignProblem& p, Make&& make, long max_draws) {
  for (long i = 0; i < max_draws; ++i) {
    Genotype g = make();
    if (is_feasible(decode_assignment(g, p), p)) return g;
  }
  throw std::runtime_error("no feasible genotype after " + std::to_string(max_draws) +
                           " draws; the instance looks over-constrained");
}

}  // namespace designsearch
