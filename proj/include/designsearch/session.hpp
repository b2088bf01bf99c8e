#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aco.hpp"
#include "ea.hpp"
#include "fitness.hpp"
#include "problem.hpp"
#include "random.hpp"

namespace designsearch {

class SessionError : public std::runtime_error {
 public:
  enum class Kind { not_found, conflict, invalid, unsupported };
  SessionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

enum class SessionEngine { ea_ng, ea_xp, aco };

inline std::string to_string(SessionEngine e) {
  switch (e) {
    case SessionEngine::ea_ng: return "ea-ng";
    case SessionEngine::ea_xp: return "ea-xp";
    case SessionEngine::aco: return "aco";
  }
  return "?";
}

inline SessionEngine parse_session_engine(const std::string& s) {
  if (s == "ea-ng") return SessionEngine::ea_ng;
  if (s == "ea-xp") return SessionEngine::ea_xp;
  if (s == "aco") return SessionEngine::aco;
  throw SessionError(SessionError::Kind::invalid, "unknown interactive engine '" + s + "' (use ea-ng, ea-xp or aco)");
}

enum class SessionStatus { active, exhausted, completed };

inline std::string to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::active: return "active";
    case SessionStatus::exhausted: return "exhausted";
    case SessionStatus::completed: return "completed";
  }
  return "?";
}

struct SessionConfig {
  SessionEngine engine = SessionEngine::aco;
  int population_size = 10;
  long evaluation_cap = 250;
  double structure_weight = 0.8;  // a
  std::uint64_t seed = 1;
  // ACO overrides
  double alpha = 1.5;
  double mu = 3.0;
  double rho = 0.1;
  double tau_high = 1e6;

  void validate() const {
    if (population_size < 2) throw SessionError(SessionError::Kind::invalid, "population size must be at least 2");
    if (evaluation_cap < population_size)
      throw SessionError(SessionError::Kind::invalid, "evaluation cap must cover at least one population");
    if (!(structure_weight >= 0.0 && structure_weight <= 1.0))
      throw SessionError(SessionError::Kind::invalid, "structure weight must lie in [0, 1]");
  }
};

struct Rating {
  int index = 0;
  int level = 0;
};

inline constexpr int kRatingLevels = 7;

// a*f_CBO + (1-a)*rating, with levels 1..7 mapped onto [0, 100].
inline double session_fitness(double f_cbo, int level, double a) {
  if (level < 1 || level > kRatingLevels)
    throw SessionError(SessionError::Kind::invalid, "rating level must lie in 1.." + std::to_string(kRatingLevels));
  return a * f_cbo + (1.0 - a) * 100.0 * (level - 1) / (kRatingLevels - 1);
}

namespace detail {

class SessionEngineBase {
 public:
  virtual ~SessionEngineBase() = default;
  virtual std::vector<Assignment> candidates() const = 0;
  virtual void step(std::span<const double> fitness, Rng& rng) = 0;
  virtual bool supports_freeze() const { return false; }
  virtual int freeze(const std::vector<int>&) {
    throw SessionError(SessionError::Kind::unsupported, "freezing is only available for ACO sessions");
  }
  virtual void unfreeze(int) {
    throw SessionError(SessionError::Kind::unsupported, "freezing is only available for ACO sessions");
  }
};

template <class Genotype>
class EaSessionEngine : public SessionEngineBase {
 public:
  EaSessionEngine(const DesignProblem& p, const EaConfig& cfg, Rng& rng) : problem_(p), breeder_(p, cfg) {
    population_ = breeder_.initial_population(rng);
  }

  std::vector<Assignment> candidates() const override {
    std::vector<Assignment> out;
    for (const auto& g : population_) out.push_back(decode_assignment(g, problem_));
    return out;
  }

  void step(std::span<const double> fitness, Rng& rng) override {
    auto next = breeder_.next_generation(population_, fitness, rng);
    if (!next) throw std::runtime_error("no feasible offspring could be produced");
    population_ = std::move(*next);
  }

 private:
  const DesignProblem& problem_;
  EaBreeder<Genotype> breeder_;
  std::vector<Genotype> population_;
};

class AcoSessionEngine : public SessionEngineBase {
 public:
  AcoSessionEngine(const DesignProblem& p, const AcoConfig& cfg, Rng& rng) : colony_(p, cfg) {
    ants_ = colony_.construct(rng, true, -1);
  }

  std::vector<Assignment> candidates() const override {
    std::vector<Assignment> out;
    for (const auto& ant : ants_) out.push_back(ant.assignment);
    return out;
  }

  void step(std::span<const double> fitness, Rng& rng) override {
    colony_.learn(ants_, fitness);
    ants_ = colony_.construct(rng, true, -1);
  }

  bool supports_freeze() const override { return true; }
  int freeze(const std::vector<int>& elements) override { return colony_.freeze(elements); }
  void unfreeze(int handle) override { colony_.unfreeze(handle); }

 private:
  AntColony colony_;
  std::vector<AntTrail> ants_;
};

}  // namespace detail

struct FrozenClass {
  int handle = 0;
  std::vector<int> elements;
};

// One interactive search. Not thread-safe by itself; SessionStore
// serializes access.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const DesignProblem> problem, SessionConfig cfg)
      : id_(std::move(id)), problem_(std::move(problem)), cfg_(cfg), rng_(derive_seed(cfg.seed, 0x5e55ULL)) {
    cfg_.validate();
    if (cfg_.engine == SessionEngine::aco) {
      AcoConfig aco;
      aco.alpha = cfg_.alpha;
      aco.mu = cfg_.mu;
      aco.rho = cfg_.rho;
      aco.tau_high = cfg_.tau_high;
      aco.colony_size = cfg_.population_size;
      aco.search.constraint = ConstraintMode::direct;
      engine_ = std::make_unique<detail::AcoSessionEngine>(*problem_, aco, rng_);
    } else {
      EaConfig ea;
      ea.encoding = cfg_.engine == SessionEngine::ea_ng ? Encoding::ng : Encoding::xp;
      ea.population_size = cfg_.population_size;
      ea.search.constraint = ConstraintMode::direct;
      if (ea.encoding == Encoding::ng)
        engine_ = std::make_unique<detail::EaSessionEngine<NgGenotype>>(*problem_, ea, rng_);
      else
        engine_ = std::make_unique<detail::EaSessionEngine<XpGenotype>>(*problem_, ea, rng_);
    }
    candidates_ = engine_->candidates();
    log_.push_back({{"event", "create"},
                    {"engine", to_string(cfg_.engine)},
                    {"population", cfg_.population_size},
                    {"cap", cfg_.evaluation_cap},
                    {"a", cfg_.structure_weight},
                    {"seed", cfg_.seed},
                    {"alpha", cfg_.alpha},
                    {"mu", cfg_.mu},
                    {"rho", cfg_.rho},
                    {"tau_high", cfg_.tau_high}});
  }

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return cfg_; }
  const DesignProblem& problem() const noexcept { return *problem_; }
  SessionStatus status() const noexcept { return status_; }
  int generation() const noexcept { return generation_; }
  long evaluations() const noexcept { return evaluations_; }
  const std::vector<FrozenClass>& frozen() const noexcept { return frozen_; }
  const nlohmann::json& event_log() const noexcept { return log_; }

  const std::vector<Assignment>& population() const {
    require_active();
    return candidates_;
  }

  struct StepSummary {
    int generation = 0;
    long evaluations = 0;
    SessionStatus status = SessionStatus::active;
    std::vector<double> fitness;
  };

  StepSummary submit_ratings(const std::vector<Rating>& ratings) {
    require_active();
    const std::size_t n = candidates_.size();
    if (ratings.size() != n)
      throw SessionError(SessionError::Kind::invalid,
                         "expected " + std::to_string(n) + " ratings, got " + std::to_string(ratings.size()));
    std::vector<int> levels(n, 0);
    for (const auto& r : ratings) {
      if (r.index < 0 || static_cast<std::size_t>(r.index) >= n)
        throw SessionError(SessionError::Kind::invalid, "rating index " + std::to_string(r.index) + " out of range");
      if (levels[static_cast<std::size_t>(r.index)] != 0)
        throw SessionError(SessionError::Kind::invalid, "candidate " + std::to_string(r.index) + " rated twice");
      if (r.level < 1 || r.level > kRatingLevels)
        throw SessionError(SessionError::Kind::invalid, "rating level must lie in 1.." + std::to_string(kRatingLevels));
      levels[static_cast<std::size_t>(r.index)] = r.level;
    }

    StepSummary out;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = session_fitness(coupling_fitness(candidates_[i], *problem_), levels[i], cfg_.structure_weight);
      out.fitness.push_back(f);
      if (!best_ || f > best_->first) best_ = std::pair{f, candidates_[i]};
    }
    evaluations_ += static_cast<long>(n);
    ++generation_;
    nlohmann::json entry{{"event", "ratings"}, {"levels", levels}};
    log_.push_back(entry);

    if (best_ && best_->first >= 100.0)
      status_ = SessionStatus::completed;
    else if (evaluations_ + static_cast<long>(n) > cfg_.evaluation_cap)
      status_ = SessionStatus::exhausted;
    else {
      engine_->step(out.fitness, rng_);
      candidates_ = engine_->candidates();
    }
    out.generation = generation_;
    out.evaluations = evaluations_;
    out.status = status_;
    return out;
  }

  // Freezes class `class_index` of candidate `candidate`; returns its handle.
  int freeze(int candidate, int class_index) {
    require_active();
    if (!engine_->supports_freeze())
      throw SessionError(SessionError::Kind::unsupported, "freezing is only available for ACO sessions");
    if (candidate < 0 || static_cast<std::size_t>(candidate) >= candidates_.size())
      throw SessionError(SessionError::Kind::invalid, "candidate index out of range");
    const auto design = Design::from_assignment(candidates_[static_cast<std::size_t>(candidate)], *problem_);
    if (class_index < 0 || class_index >= design.class_count())
      throw SessionError(SessionError::Kind::invalid, "class index out of range");
    const auto elements = design.classes()[static_cast<std::size_t>(class_index)];
    int handle = 0;
    try {
      handle = engine_->freeze(elements);
    } catch (const std::invalid_argument& e) {
      throw SessionError(SessionError::Kind::invalid, e.what());
    }
    frozen_.push_back({handle, elements});
    log_.push_back({{"event", "freeze"}, {"candidate", candidate}, {"class", class_index}});
    return handle;
  }

  void unfreeze(int handle) {
    require_active();
    if (!engine_->supports_freeze())
      throw SessionError(SessionError::Kind::unsupported, "freezing is only available for ACO sessions");
    auto it = std::find_if(frozen_.begin(), frozen_.end(), [&](const FrozenClass& f) { return f.handle == handle; });
    if (it == frozen_.end()) throw SessionError(SessionError::Kind::not_found, "no frozen class " + std::to_string(handle));
    engine_->unfreeze(handle);
    frozen_.erase(it);
    log_.push_back({{"event", "unfreeze"}, {"handle", handle}});
  }

  std::optional<std::pair<double, Assignment>> best() const { return best_; }

  // Rebuilds a session from its event log.
  static std::unique_ptr<Session> replay(std::string id, std::shared_ptr<const DesignProblem> problem,
                                         const nlohmann::json& log) {
    if (!log.is_array() || log.empty() || log[0].value("event", "") != "create")
      throw SessionError(SessionError::Kind::invalid, "event log must start with a create event");
    const auto& c = log[0];
    SessionConfig cfg;
    cfg.engine = parse_session_engine(c.at("engine").get<std::string>());
    cfg.population_size = c.at("population").get<int>();
    cfg.evaluation_cap = c.at("cap").get<long>();
    cfg.structure_weight = c.at("a").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.alpha = c.at("alpha").get<double>();
    cfg.mu = c.at("mu").get<double>();
    cfg.rho = c.at("rho").get<double>();
    cfg.tau_high = c.at("tau_high").get<double>();
    auto s = std::make_unique<Session>(std::move(id), std::move(problem), cfg);
    for (std::size_t i = 1; i < log.size(); ++i) {
      const auto& e = log[i];
      const auto kind = e.at("event").get<std::string>();
      if (kind == "ratings") {
        const auto levels = e.at("levels").get<std::vector<int>>();
        std::vector<Rating> ratings;
        for (std::size_t k = 0; k < levels.size(); ++k) ratings.push_back({static_cast<int>(k), levels[k]});
        s->submit_ratings(ratings);
      } else if (kind == "freeze") {
        s->freeze(e.at("candidate").get<int>(), e.at("class").get<int>());
      } else if (kind == "unfreeze") {
        s->unfreeze(e.at("handle").get<int>());
      } else {
        throw SessionError(SessionError::Kind::invalid, "unknown event '" + kind + "'");
      }
    }
    return s;
  }

 private:
  void require_active() const {
    if (status_ != SessionStatus::active)
      throw SessionError(SessionError::Kind::conflict, "session " + id_ + " is " + to_string(status_));
  }

  std::string id_;
  std::shared_ptr<const DesignProblem> problem_;
  SessionConfig cfg_;
  Rng rng_;
  std::unique_ptr<detail::SessionEngineBase> engine_;
  std::vector<Assignment> candidates_;
  SessionStatus status_ = SessionStatus::active;
  int generation_ = 0;
  long evaluations_ = 0;
  std::vector<FrozenClass> frozen_;
  std::optional<std::pair<double, Assignment>> best_;
  nlohmann::json log_ = nlohmann::json::array();
};

// JSON views used by the wire API.

inline nlohmann::json render_design(const Assignment& a, const DesignProblem& p) {
  const auto design = Design::from_assignment(a, p);
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& cls : design.classes()) {
    nlohmann::json attrs = nlohmann::json::array(), methods = nlohmann::json::array();
    for (int e : cls) (p.is_attribute(e) ? attrs : methods).push_back(p.element_name(e));
    classes.push_back({{"attributes", attrs}, {"methods", methods}});
  }
  return classes;
}

inline nlohmann::json population_json(const Session& s) {
  nlohmann::json cands = nlohmann::json::array();
  const auto& pop = s.population();
  for (std::size_t i = 0; i < pop.size(); ++i)
    cands.push_back({{"index", i},
                     {"f_cbo", coupling_fitness(pop[i], s.problem())},
                     {"classes", render_design(pop[i], s.problem())}});
  return {{"generation", s.generation()}, {"candidates", cands}};
}

inline nlohmann::json status_json(const Session& s) {
  nlohmann::json frozen = nlohmann::json::array();
  for (const auto& f : s.frozen()) {
    nlohmann::json names = nlohmann::json::array();
    for (int e : f.elements) names.push_back(s.problem().element_name(e));
    frozen.push_back({{"id", f.handle}, {"elements", names}});
  }
  nlohmann::json j{{"id", s.id()},
                   {"problem", s.problem().name()},
                   {"engine", to_string(s.config().engine)},
                   {"status", to_string(s.status())},
                   {"generation", s.generation()},
                   {"evaluations", s.evaluations()},
                   {"cap", s.config().evaluation_cap},
                   {"frozen", frozen},
                   {"best", nullptr}};
  if (const auto b = s.best())
    j["best"] = {{"fitness", b->first},
                 {"f_cbo", coupling_fitness(b->second, s.problem())},
                 {"classes", render_design(b->second, s.problem())}};
  return j;
}

// Thread-safe registry. Mutating calls on a session that is already busy
// fail with a conflict instead of waiting.
class SessionStore {
 public:
  explicit SessionStore(std::uint64_t master_seed = 1) : master_seed_(master_seed) {}

  void add_problem(std::shared_ptr<const DesignProblem> p) {
    std::lock_guard lock(mutex_);
    problems_[p->name()] = std::move(p);
  }

  std::shared_ptr<const DesignProblem> problem(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = problems_.find(name);
    if (it == problems_.end()) throw SessionError(SessionError::Kind::not_found, "unknown problem '" + name + "'");
    return it->second;
  }

  std::vector<std::string> problem_names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, p] : problems_) out.push_back(name);
    return out;
  }

  // A seed of nullopt draws a fresh stream from the store's master seed.
  std::string create(std::shared_ptr<const DesignProblem> problem, SessionConfig cfg,
                     std::optional<std::uint64_t> seed = std::nullopt) {
    std::uint64_t serial;
    {
      std::lock_guard lock(mutex_);
      serial = next_serial_++;
    }
    cfg.seed = seed ? *seed : derive_seed(master_seed_, serial);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%llx", static_cast<unsigned long long>(mix64(master_seed_ ^ (serial + 1))));
    auto entry = std::make_shared<Entry>(buf, std::move(problem), cfg);
    std::lock_guard lock(mutex_);
    sessions_[entry->session.id()] = entry;
    return entry->session.id();
  }

  // Runs fn(session) under the session lock; blocking for reads.
  template <class Fn>
  auto read(const std::string& id, Fn&& fn) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return fn(static_cast<const Session&>(entry->session));
  }

  // Runs fn(session) if no other mutation is in flight.
  template <class Fn>
  auto mutate(const std::string& id, Fn&& fn) {
    auto entry = find(id);
    std::unique_lock lock(entry->mutex, std::try_to_lock);
    if (!lock.owns_lock()) throw SessionError(SessionError::Kind::conflict, "session " + id + " is busy");
    return fn(entry->session);
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  struct Entry {
    Entry(std::string id, std::shared_ptr<const DesignProblem> p, SessionConfig cfg)
        : session(std::move(id), std::move(p), cfg) {}
    mutable std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError(SessionError::Kind::not_found, "unknown session '" + id + "'");
    return it->second;
  }

  std::uint64_t master_seed_;
  mutable std::mutex mutex_;
  std::uint64_t next_serial_ = 0;
  std::map<std::string, std::shared_ptr<const DesignProblem>> problems_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace designsearch
