#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "aco.hpp"
#include "ea.hpp"
#include "gls.hpp"
#include "stats.hpp"

namespace designsearch {

using AlgorithmConfig = std::variant<GlsConfig, EaConfig, AcoConfig>;

inline const SearchSettings& settings_of(const AlgorithmConfig& cfg) {
  return std::visit([](const auto& c) -> const SearchSettings& { return c.search; }, cfg);
}

inline SearchSettings& settings_of(AlgorithmConfig& cfg) {
  return std::visit([](auto& c) -> SearchSettings& { return c.search; }, cfg);
}

inline Encoding encoding_of(const AlgorithmConfig& cfg) {
  if (const auto* g = std::get_if<GlsConfig>(&cfg)) return g->encoding;
  if (const auto* e = std::get_if<EaConfig>(&cfg)) return e->encoding;
  return Encoding::xp;
}

inline std::string algorithm_name(const AlgorithmConfig& cfg) {
  static const char* names[] = {"gls", "ea", "aco"};
  return names[cfg.index()];
}

// Short human-readable description of a configuration cell.
inline std::string describe(const AlgorithmConfig& cfg) {
  std::ostringstream os;
  os << algorithm_name(cfg) << '-' << to_string(encoding_of(cfg));
  if (const auto* e = std::get_if<EaConfig>(&cfg)) {
    os << " pop=" << e->population_size << " k=" << e->tournament_size << " x=" << to_string(e->crossover_operator())
       << " px=" << e->crossover_prob;
    if (const auto* f = std::get_if<FixedRate>(&e->mutation))
      os << " mut=fixed:" << f->rate;
    else
      os << " mut=selfadaptive";
  } else if (const auto* a = std::get_if<AcoConfig>(&cfg)) {
    os << " alpha=" << a->alpha << " mu=" << a->mu << " rho=" << a->rho << " ants=" << a->colony_size;
  }
  const auto& s = settings_of(cfg);
  os << " obj=" << to_string(s.objective) << " constraint=" << to_string(s.constraint) << " budget=" << s.budget;
  return os.str();
}

inline RunRecord run_search(const DesignProblem& p, const AlgorithmConfig& cfg, std::uint64_t seed,
                            EvaluationObserver observer = {}) {
  return std::visit(
      [&](const auto& c) -> RunRecord {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GlsConfig>)
          return run_gls(p, c, seed, observer);
        else if constexpr (std::is_same_v<T, EaConfig>)
          return run_ea(p, c, seed, observer);
        else
          return run_aco(p, c, seed, observer);
      },
      cfg);
}

inline void validate_config(const AlgorithmConfig& cfg) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GlsConfig>)
          c.search.validate();
        else
          c.validate();
      },
      cfg);
}

struct ExperimentPlan {
  std::vector<std::shared_ptr<const DesignProblem>> problems;
  std::vector<AlgorithmConfig> grid;
  int runs = 50;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CellSummary {
  std::size_t cell = 0;
  std::string algorithm;
  Encoding encoding = Encoding::ng;
  std::string problem;
  std::string config;
  int runs = 0;
  double mbf = 0.0;
  double mbf_sd = 0.0;
  double mean_aes = 0.0;
  double mean_f_cbo = 0.0;
  double mean_f_nac = 0.0;
  double mean_f_atmr = 0.0;
  std::string error;  // nonempty if the cell was skipped
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // ordered by cell, then run
  std::vector<std::size_t> record_cell;
  std::vector<CellSummary> summaries;

  bool ok() const {
    return std::none_of(summaries.begin(), summaries.end(), [](const CellSummary& s) { return !s.error.empty(); });
  }

  // Best objective values of one cell, in run order.
  std::vector<double> best_scores(std::size_t cell) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (record_cell[i] == cell) out.push_back(records[i].best_score);
    return out;
  }
};

inline std::uint64_t run_seed(std::uint64_t master, std::size_t cell, int run) {
  return derive_seed(master, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(run));
}

// Runs index i on worker threads; results are written by index.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Cells are (problem x config); every cell runs `runs` times with seeds
// derived from (master seed, cell, run).
inline ExperimentResult run_experiment(const ExperimentPlan& plan) {
  if (plan.grid.empty() || plan.problems.empty()) throw std::invalid_argument("experiment plan has an empty grid");
  if (plan.runs < 1) throw std::invalid_argument("experiment plan needs at least one run per cell");

  struct Cell {
    const DesignProblem* problem;
    const AlgorithmConfig* config;
    std::string error;
  };
  std::vector<Cell> cells;
  for (const auto& p : plan.problems)
    for (const auto& cfg : plan.grid) {
      Cell cell{p.get(), &cfg, {}};
      try {
        validate_config(cfg);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }

  const std::size_t runs = static_cast<std::size_t>(plan.runs);
  std::vector<RunRecord> slots(cells.size() * runs);
  std::vector<std::string> run_errors(slots.size());
  parallel_for(slots.size(), plan.threads, [&](std::size_t i) {
    const auto& cell = cells[i / runs];
    if (!cell.error.empty()) return;
    const auto seed = run_seed(plan.master_seed, i / runs, static_cast<int>(i % runs));
    try {
      slots[i] = run_search(*cell.problem, *cell.config, seed);
    } catch (const std::exception& e) {
      run_errors[i] = e.what();
    }
  });

  ExperimentResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellSummary s;
    s.cell = c;
    s.algorithm = algorithm_name(*cells[c].config);
    s.encoding = encoding_of(*cells[c].config);
    s.problem = cells[c].problem->name();
    s.config = describe(*cells[c].config);
    s.error = cells[c].error;
    for (std::size_t r = 0; r < runs && s.error.empty(); ++r)
      if (!run_errors[c * runs + r].empty()) s.error = run_errors[c * runs + r];
    if (s.error.empty()) {
      std::vector<double> best;
      for (std::size_t r = 0; r < runs; ++r) {
        const auto& rec = slots[c * runs + r];
        best.push_back(rec.best_score);
        s.mean_aes += static_cast<double>(rec.aes);
        s.mean_f_cbo += rec.best.f_cbo;
        s.mean_f_nac += rec.best.f_nac;
        s.mean_f_atmr += rec.best.f_atmr;
        result.records.push_back(rec);
        result.record_cell.push_back(c);
      }
      const auto summary = summarize(best);
      s.runs = plan.runs;
      s.mbf = summary.mean;
      s.mbf_sd = summary.stddev;
      const double n = static_cast<double>(runs);
      s.mean_aes /= n;
      s.mean_f_cbo /= n;
      s.mean_f_nac /= n;
      s.mean_f_atmr /= n;
    }
    result.summaries.push_back(std::move(s));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV output.

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

struct CsvOptions {
  bool wall_time = false;  // wall_ms is 0 unless requested, keeping output reproducible
};

inline void write_records_csv(std::ostream& os, const ExperimentResult& result, int runs_per_cell,
                              const CsvOptions& opts = {}) {
  os << "algo,encoding,problem,run,seed,f_cbo,f_nac,f_atmr,f_mo,aes,evals,wall_ms\n";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    os << r.algorithm << ',' << to_string(r.encoding) << ',' << detail::csv_field(r.problem) << ','
       << (static_cast<int>(i) % runs_per_cell) << ',' << r.seed << ',' << detail::fixed(r.best.f_cbo) << ','
       << detail::fixed(r.best.f_nac) << ',' << detail::fixed(r.best.f_atmr) << ','
       << (r.best.f_mo ? detail::fixed(*r.best.f_mo) : std::string()) << ',' << r.aes << ',' << r.total_evaluations
       << ',' << (opts.wall_time ? detail::fixed(r.wall_ms, 3) : std::string("0")) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  os << "cell,algo,encoding,problem,config,runs,mbf,mbf_sd,mean_aes,mean_f_cbo,mean_f_nac,mean_f_atmr,error\n";
  for (const auto& s : result.summaries)
    os << s.cell << ',' << s.algorithm << ',' << to_string(s.encoding) << ',' << detail::csv_field(s.problem) << ','
       << detail::csv_field(s.config) << ',' << s.runs << ',' << detail::fixed(s.mbf) << ','
       << detail::fixed(s.mbf_sd) << ',' << detail::fixed(s.mean_aes, 2) << ',' << detail::fixed(s.mean_f_cbo) << ','
       << detail::fixed(s.mean_f_nac) << ',' << detail::fixed(s.mean_f_atmr) << ',' << detail::csv_field(s.error)
       << '\n';
}

}  // namespace designsearch
