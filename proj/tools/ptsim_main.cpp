#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptsim/driver.hpp"
#include "ptsim/forcing.hpp"
#include "ptsim/oracle.hpp"
#include "ptsim/ptree.hpp"

namespace {

using namespace ptsim;

// BITS literal or "random:SEED"
Bits parse_ground_set(const std::string& spec, std::size_t universe) {
  if (spec.rfind("random:", 0) == 0) {
    std::mt19937 rng(static_cast<unsigned>(std::stoul(spec.substr(7))));
    Bits out = Bits::zeros(universe);
    for (std::size_t p = 0; p < universe; ++p) out.set(p, rng() & 1u);
    return out;
  }
  Bits out = Bits::from_text(spec);
  if (out.size() != universe) throw std::invalid_argument("ground set length != universe");
  return out;
}

Registry load_registry(const std::string& path, std::size_t universe) {
  if (path.empty()) return Registry{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open registry file " + path);
  return parse_registry(in, universe);
}

int run_command(std::size_t universe, const std::string& a_spec, const std::string& c_spec,
                const std::string& registry_path, std::size_t stages, std::size_t depth,
                std::size_t domain_bound, std::size_t threshold, const std::string& trace_path) {
  GroundSets grounds{universe, parse_ground_set(a_spec, universe),
                     parse_ground_set(c_spec, universe)};
  Registry reg = load_registry(registry_path, universe);
  Schedule sched = default_schedule(stages, universe, Budgets{depth, domain_bound, threshold});
  Trace trace = run_construction(grounds, reg, sched);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    write_trace(out, trace, reg);
  }
  std::cout << "status: " << trace.status << "\n";
  if (trace.status == "complete") {
    std::cout << "G: " << trace.g.text() << "\n";
    for (const RequirementReport& rep : verify_requirements(trace.g, grounds, reg, sched))
      std::cout << rep.spec.text() << ": " << (rep.ok ? "satisfied" : "UNSATISFIED") << " ("
                << rep.witness << ")\n";
    return 0;
  }
  std::cout << "detail: " << trace.detail << "\n";
  if (trace.status == "HypothesisViolated") {
    std::cout << "h:";
    for (const auto& [n, v] : trace.h) std::cout << " " << n << ":" << (v ? 1 : 0);
    std::cout << "\n";
    return 3;
  }
  return 2;
}

int cohesive_command(const std::string& sets_path, const std::string& registry_path,
                     std::size_t universe, const std::string& c_spec) {
  std::ifstream in(sets_path);
  if (!in) throw std::runtime_error("cannot open sets file " + sets_path);
  std::vector<Bits> sets;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) sets.push_back(Bits::from_text(line));
  if (sets.empty()) throw std::runtime_error("no sets in " + sets_path);
  if (universe == 0) universe = sets.front().size();
  Bits c = c_spec.empty() ? Bits::zeros(universe) : parse_ground_set(c_spec, universe);
  GroundSets grounds{universe, Bits::zeros(universe), std::move(c)};
  Registry reg = load_registry(registry_path, universe);
  CohesiveResult res = cohesive_construction(sets, grounds, reg);
  std::cout << "G: " << res.g.text() << "\n";
  for (std::size_t s = 0; s < res.stages.size(); ++s) {
    std::cout << "stage " << s << ": " << (res.stages[s].kept_set ? "kept" : "dropped");
    if (res.stages[s].hit.has_value()) std::cout << " hit=" << *res.stages[s].hit;
    std::cout << "\n";
  }
  return 0;
}

int check_command(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open trace file " + trace_path);
  Registry reg;
  Trace trace = read_trace(in, reg);
  std::vector<std::string> violations = check_trace(trace, reg);
  for (const std::string& v : violations) std::cout << v << "\n";
  if (!violations.empty()) return 1;
  std::cout << "trace ok (" << trace.stages.size() << " stages, status " << trace.status << ")\n";
  if (trace.status == "Unresolved") return 2;
  if (trace.status == "HypothesisViolated") return 3;
  return 0;
}

int cross_command(const std::vector<std::string>& tree_paths) {
  std::vector<PartitionTree> trees;
  for (const std::string& path : tree_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tree file " + path);
    trees.push_back(parse_tree(in));
  }
  PartitionTree crossed = cross_trees(trees);
  serialize_tree(std::cout, crossed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partition-tree forcing simulator"};
  app.require_subcommand(1);

  std::size_t universe = 16, stages = 3, depth = 0, domain_bound = 0, threshold = 1;
  std::string a_spec = "random:1", c_spec = "random:2", registry_path, trace_path, sets_path;
  std::vector<std::string> tree_paths;

  CLI::App* run = app.add_subcommand("run", "full staged construction");
  run->add_option("--universe", universe, "horizon size");
  run->add_option("--a", a_spec, "ground set A: BITS or random:SEED");
  run->add_option("--c", c_spec, "oracle set C: BITS or random:SEED");
  run->add_option("--registry", registry_path, "functional/diagonal registry file");
  run->add_option("--stages", stages, "number of scheduled stages");
  run->add_option("--depth", depth, "tree depth budget (0 = horizon)");
  run->add_option("--domain-bound", domain_bound, "valuation domain bound (0 = default)");
  run->add_option("--threshold", threshold, "acceptability threshold floor");
  run->add_option("--trace", trace_path, "trace output file");

  CLI::App* cohesive = app.add_subcommand("cohesive", "cohesive-set construction");
  cohesive->add_option("--sets", sets_path, "file of BITS lines")->required();
  cohesive->add_option("--registry", registry_path, "registry file");
  cohesive->add_option("--universe", universe, "horizon (0 = infer from sets)");
  cohesive->add_option("--c", c_spec, "oracle set C");

  CLI::App* check = app.add_subcommand("check", "re-verify a trace file");
  check->add_option("--trace", trace_path, "trace file")->required();

  CLI::App* cross = app.add_subcommand("cross", "cross serialized partition trees");
  cross->add_option("--trees", tree_paths, "tree files")->required()->expected(-2);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(universe, a_spec, c_spec, registry_path, stages, depth, domain_bound,
                         threshold, trace_path);
    if (cohesive->parsed()) {
      std::size_t u = cohesive->count("--universe") ? universe : 0;
      return cohesive_command(sets_path, registry_path, u,
                              cohesive->count("--c") ? c_spec : "");
    }
    if (check->parsed()) return check_command(trace_path);
    if (cross->parsed()) return cross_command(tree_paths);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
