#pragma once

#include <algorithm>
#include <cstdint>

#include "encodings.hpp"
#include "evaluation.hpp"

namespace designsearch {

struct GlsConfig {
  Encoding encoding = Encoding::ng;
  SearchSettings search;
};

namespace detail {

constexpr long kMaxFeasibleDraws = 1'000'000;

// First-improvement scan over all single-allele changes, loci ascending and
// values ascending. Returns true if a move was accepted.
inline bool improve_ng(NgGenotype& g, double& fitness, Evaluator& eval, const DesignProblem& p, bool skip_infeasible) {
  Assignment a = decode_assignment(g, p);
  for (std::size_t locus = 0; locus < g.alleles.size(); ++locus) {
    const int original = g.alleles[locus];
    for (int v = 1; v <= p.class_count(); ++v) {
      if (v == original) continue;
      a.class_of[locus] = v - 1;
      if (!(skip_infeasible && !is_feasible(a, p))) {
        const double f = eval.evaluate(a);
        if (f > fitness) {
          g.alleles[locus] = v;
          fitness = f;
          return true;
        }
        if (eval.done()) return false;
      }
    }
    a.class_of[locus] = original - 1;
  }
  return false;
}

// First-improvement scan over 2-opt segment reversals, (i, j) lexicographic.
inline bool improve_xp(XpGenotype& g, double& fitness, Evaluator& eval, const DesignProblem& p, bool skip_infeasible) {
  const std::size_t n = g.perm.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::reverse(g.perm.begin() + static_cast<long>(i), g.perm.begin() + static_cast<long>(j) + 1);
      const Assignment a = decode_assignment(g, p);
      if (!(skip_infeasible && !is_feasible(a, p))) {
        const double f = eval.evaluate(a);
        if (f > fitness) {
          fitness = f;
          return true;
        }
        if (eval.done()) {
          std::reverse(g.perm.begin() + static_cast<long>(i), g.perm.begin() + static_cast<long>(j) + 1);
          return false;
        }
      }
      std::reverse(g.perm.begin() + static_cast<long>(i), g.perm.begin() + static_cast<long>(j) + 1);
    }
  }
  return false;
}

template <class Genotype>
RunRecord run_gls_impl(const DesignProblem& p, const GlsConfig& cfg, std::uint64_t seed,
                       EvaluationObserver observer) {
  Evaluator eval(p, cfg.search, seed, std::move(observer));
  Rng rng(derive_seed(seed, 0x915ULL));
  const bool direct = cfg.search.constraint == ConstraintMode::direct;

  while (!eval.done()) {
    Genotype g = direct ? draw_feasible<Genotype>(p, [&] { return random_genotype<Genotype>(p, rng); },
                                                  kMaxFeasibleDraws)
                        : random_genotype<Genotype>(p, rng);
    double fitness = eval.evaluate(decode_assignment(g, p));
    while (!eval.done()) {
      bool moved;
      if constexpr (std::is_same_v<Genotype, NgGenotype>)
        moved = improve_ng(g, fitness, eval, p, direct);
      else
        moved = improve_xp(g, fitness, eval, p, direct);
      if (!moved) break;  // local optimum (or budget): restart
    }
  }
  return eval.record("gls", cfg.encoding, seed);
}

}  // namespace detail

// (1+1) greedy local search with random restarts; the best-ever design is kept.
inline RunRecord run_gls(const DesignProblem& p, const GlsConfig& cfg, std::uint64_t seed,
                         EvaluationObserver observer = {}) {
  if (cfg.encoding == Encoding::ng) return detail::run_gls_impl<NgGenotype>(p, cfg, seed, std::move(observer));
  return detail::run_gls_impl<XpGenotype>(p, cfg, seed, std::move(observer));
}

}  // namespace designsearch
