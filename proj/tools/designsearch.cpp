// designsearch: batch search, instance generation, oracle and session server.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <designsearch/experiment.hpp>
#include <designsearch/oracle.hpp>
#include <designsearch/server.hpp>

namespace ds = designsearch;

namespace {

struct SearchArgs {
  std::string algo = "ea";
  std::string encoding = "ng";
  std::vector<std::string> problems;
  std::string objective = "cbo";
  int runs = 50;
  long budget = 1'000'000;
  double target = 100.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string summary;
  double alpha = 1.5, mu = 3.0, rho = 0.1;
  int ants = 25;
  int pop = 25;
  int tournament = 2;
  double px = 0.6;
  std::string mutation = "selfadaptive";
  std::string crossover;
  std::string constraint = "indirect";
  bool clamp = false;
  bool timing = false;
  unsigned threads = 0;
};

ds::AlgorithmConfig build_config(const SearchArgs& a) {
  ds::SearchSettings s;
  s.objective = ds::parse_objective(a.objective);
  s.constraint = ds::parse_constraint(a.constraint);
  s.budget = a.budget;
  s.target_fitness = a.target;
  s.elegance.clamp = a.clamp;
  const auto enc = ds::parse_encoding(a.encoding);
  if (a.algo == "gls") return ds::GlsConfig{enc, s};
  if (a.algo == "aco") {
    if (enc != ds::Encoding::xp) throw std::invalid_argument("aco only supports the xp encoding");
    ds::AcoConfig c;
    c.alpha = a.alpha;
    c.mu = a.mu;
    c.rho = a.rho;
    c.colony_size = a.ants;
    c.search = s;
    return c;
  }
  if (a.algo != "ea") throw std::invalid_argument("unknown algorithm '" + a.algo + "' (use gls, ea or aco)");
  ds::EaConfig c;
  c.encoding = enc;
  c.population_size = a.pop;
  c.tournament_size = a.tournament;
  c.crossover_prob = a.px;
  if (!a.crossover.empty()) c.crossover = ds::parse_crossover(a.crossover);
  if (a.mutation == "selfadaptive")
    c.mutation = ds::SelfAdaptive{};
  else if (a.mutation.rfind("fixed:", 0) == 0)
    c.mutation = ds::FixedRate{std::stod(a.mutation.substr(6))};
  else
    throw std::invalid_argument("mutation must be 'selfadaptive' or 'fixed:<rate>'");
  c.search = s;
  return c;
}

int run_search_command(const SearchArgs& a) {
  ds::ExperimentPlan plan;
  for (const auto& path : a.problems) plan.problems.push_back(std::make_shared<const ds::DesignProblem>(ds::load_problem(path)));
  plan.grid.push_back(build_config(a));
  plan.runs = a.runs;
  plan.master_seed = a.seed;
  plan.threads = a.threads;
  const auto result = ds::run_experiment(plan);

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  ds::write_records_csv(out, result, a.runs, {a.timing});
  if (!a.summary.empty()) {
    std::ofstream sum(a.summary, std::ios::binary);
    if (!sum) throw std::runtime_error("cannot write " + a.summary);
    ds::write_summary_csv(sum, result);
  }
  for (const auto& s : result.summaries) {
    if (!s.error.empty()) {
      std::cerr << s.problem << ": " << s.error << "\n";
      continue;
    }
    std::cout << s.problem << "  " << s.config << "  MBF " << s.mbf << " (sd " << s.mbf_sd << ")  AES "
              << s.mean_aes << "\n";
  }
  return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive meta-heuristic search for class designs"};
  app.require_subcommand(1);

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "run seeded batch searches and write per-run CSV");
  search->add_option("--algo", sa.algo, "gls | ea | aco")->check(CLI::IsMember({"gls", "ea", "aco"}));
  search->add_option("--encoding", sa.encoding, "ng | xp")->check(CLI::IsMember({"ng", "xp"}));
  search->add_option("--problem", sa.problems, "instance JSON file (repeatable)")->required();
  search->add_option("--objective", sa.objective, "cbo | mo")->check(CLI::IsMember({"cbo", "mo"}));
  search->add_option("--runs", sa.runs, "runs per problem")->check(CLI::PositiveNumber);
  search->add_option("--budget", sa.budget, "evaluations per run")->check(CLI::PositiveNumber);
  search->add_option("--target", sa.target, "stop on reaching this fitness");
  search->add_option("--seed", sa.seed, "master seed");
  search->add_option("--out", sa.out, "per-run CSV output")->required();
  search->add_option("--summary", sa.summary, "per-cell summary CSV output");
  search->add_option("--alpha", sa.alpha, "ACO trail attractiveness");
  search->add_option("--mu", sa.mu, "ACO pheromone deposit");
  search->add_option("--rho", sa.rho, "ACO evaporation rate");
  search->add_option("--ants", sa.ants, "ACO colony size");
  search->add_option("--pop", sa.pop, "EA population size");
  search->add_option("--tournament", sa.tournament, "EA tournament size");
  search->add_option("--px", sa.px, "EA crossover probability");
  search->add_option("--mutation", sa.mutation, "selfadaptive | fixed:<rate>");
  search->add_option("--crossover", sa.crossover, "onepoint | uniform | order | edge");
  search->add_option("--constraint", sa.constraint, "indirect | direct")->check(CLI::IsMember({"indirect", "direct"}));
  search->add_flag("--clamp-elegance", sa.clamp, "clamp elegance scores at 0");
  search->add_flag("--timing", sa.timing, "record wall time (output no longer byte-reproducible)");
  search->add_option("--threads", sa.threads, "worker threads (0: all cores)");

  ds::InstanceSpec spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-instance", "generate a synthetic instance with a planted design");
  gen->add_option("--a", spec.attributes, "attributes")->required();
  gen->add_option("--m", spec.methods, "methods")->required();
  gen->add_option("--uses", spec.uses, "method/attribute uses")->required();
  gen->add_option("--classes", spec.classes, "classes")->required();
  gen->add_option("--modularity", spec.planted_modularity, "fraction of uses inside planted classes");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--name", spec.name, "instance name");
  gen->add_option("--out", gen_out, "output JSON file")->required();

  std::string oracle_problem;
  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum of a small instance");
  oracle->add_option("--problem", oracle_problem, "instance JSON file")->required();

  std::vector<std::string> serve_problems;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t serve_seed = 1;
  auto* serve = app.add_subcommand("serve", "run the interactive session HTTP service");
  serve->add_option("--problem", serve_problems, "instance JSON file (repeatable)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--seed", serve_seed, "master seed for session streams");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*search) return run_search_command(sa);
    if (*gen) {
      ds::save_problem(ds::generate_instance(spec), gen_out);
      return 0;
    }
    if (*oracle) {
      const auto p = ds::load_problem(oracle_problem);
      const auto r = ds::brute_force_optimum(p);
      nlohmann::json j{{"problem", p.name()},
                       {"f_cbo", r.best_fitness},
                       {"feasible_designs", r.feasible_designs},
                       {"design", ds::render_design(r.witness.assignment(p.element_count()), p)}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*serve) {
      ds::SessionStore store(serve_seed);
      for (const auto& path : serve_problems)
        store.add_problem(std::make_shared<const ds::DesignProblem>(ds::load_problem(path)));
      httplib::Server server;
      ds::mount_sessions(server, store);
      std::cout << "listening on " << host << ":" << port << "\n" << std::flush;
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
