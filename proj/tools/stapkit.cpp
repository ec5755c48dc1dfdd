#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stapkit/bench.hpp"
#include "stapkit/completion.hpp"
#include "stapkit/generator.hpp"
#include "stapkit/hyperlinks.hpp"
#include "stapkit/nw_greedy.hpp"
#include "stapkit/oracles.hpp"
#include "stapkit/stap_greedy.hpp"
#include "stapkit/uplinks.hpp"

using namespace stapkit;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rational rational_arg(const std::string& text, const char* what) {
  auto v = parse_rational(text);
  if (!v) throw UsageError(std::string("bad ") + what + " '" + text + "'");
  return *v;
}

ParamChoice param_arg(const std::string& text, const char* what) {
  if (text.empty()) return {};
  if (text == "theory") return ParamChoice::theory();
  try {
    size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return ParamChoice::fixed(v);
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("bad ") + what + " '" + text + "' (integer or 'theory')");
}

VertexId vertex_arg(const StapInstance& inst, const std::string& name) {
  auto v = inst.find(name);
  if (!v) throw UsageError("unknown vertex '" + name + "'");
  return *v;
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string link_label(const StapInstance& inst, LinkId id) {
  return inst.names[inst.links[id].u] + "-" + inst.names[inst.links[id].v];
}

json link_list(const StapInstance& inst, const std::vector<LinkId>& ids) {
  json out = json::array();
  for (LinkId id : ids) {
    out.push_back({{"u", inst.names[inst.links[id].u]},
                   {"v", inst.names[inst.links[id].v]},
                   {"cost", to_string(inst.links[id].cost)}});
  }
  return out;
}

json names_of(const StapInstance& inst, std::span<const VertexId> vs) {
  json out = json::array();
  for (VertexId v : vs) out.push_back(inst.names[v]);
  return out;
}

json instance_stats(const StapInstance& inst) {
  return {{"variant", std::string(variant_name(inst.variant))},
          {"vertices", inst.num_vertices()},
          {"terminals", inst.terminals().size()},
          {"tree_edges", inst.num_tree_edges()},
          {"links", inst.num_links()}};
}

json uplink_json(const StapInstance& inst, std::span<const UpLink> ups) {
  json out = json::array();
  for (const auto& u : ups) {
    out.push_back({{"bottom", inst.names[u.bottom]},
                   {"top", inst.names[u.top]},
                   {"cost", to_string(u.cost)}});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SolveStapArgs {
  std::string file, epsilon = "1", gamma, k, root, json_out, hyperlinks_out;
  bool oracle = false, dump_uplinks = false;
  RatioSearch search = RatioSearch::kNewton;
};

int solve_stap(const SolveStapArgs& a) {
  const StapInstance inst = load_instance(a.file);
  GreedyOptions opt;
  opt.epsilon = rational_arg(a.epsilon, "epsilon");
  opt.caps.gamma = param_arg(a.gamma, "gamma");
  opt.caps.k = param_arg(a.k, "k");
  if (!a.root.empty()) opt.root = vertex_arg(inst, a.root);
  opt.search = a.search;
  const StapSolution sol = local_greedy(inst, opt);

  json log = json::array();
  for (const auto& it : sol.log) {
    log.push_back({{"hyperlinks", it.chosen},
                   {"ratio", to_string(it.ratio)},
                   {"cost", to_string(it.cost)},
                   {"dropped_cost", to_string(it.dropped_cost)},
                   {"dropped", it.dropped}});
  }
  const auto& p = sol.params;
  json report{{"instance", instance_stats(inst)},
              {"params",
               {{"epsilon", to_string(p.epsilon)},
                {"epsilon_prime", static_cast<double>(p.epsilon_prime)},
                {"gamma", p.gamma},
                {"gamma_theory", p.gamma_theory},
                {"k", p.k},
                {"k_theory", p.k_theory},
                {"gamma_capped", p.gamma_capped},
                {"k_capped", p.k_capped}}},
              {"theory_faithful", sol.theory_faithful},
              {"root", inst.names[sol.root]},
              {"completed_links", sol.completed_links},
              {"hyperlinks", sol.num_hyperlinks},
              {"uplink_optimum", to_string(sol.uplink_optimum)},
              {"initial_cost", to_string(sol.initial_cost)},
              {"iterations", log},
              {"cost", to_string(sol.cost)},
              {"expanded_cost", to_string(sol.expanded_cost)},
              {"links", link_list(inst, sol.links)},
              {"feasible", check_feasible_stap(inst, sol.links)}};
  if (a.dump_uplinks) report["initial_uplinks"] = uplink_json(inst, sol.initial_uplinks);

  std::cout << "root " << inst.names[sol.root] << "  gamma " << p.gamma << "  k " << p.k
            << (sol.theory_faithful ? "  (theory-faithful)" : "  (capped)") << "\n";
  std::cout << "initial up-link cost " << to_string(sol.initial_cost) << ", " << sol.log.size()
            << " iterations, final cost " << to_string(sol.cost) << "\n";
  for (LinkId id : sol.links) {
    std::cout << "  link " << link_label(inst, id) << " " << to_string(inst.links[id].cost) << "\n";
  }
  if (!a.hyperlinks_out.empty()) {
    std::ofstream out(a.hyperlinks_out);
    const RootedTree rt = RootedTree::build(inst, sol.root);
    const StapInstance completed = complete(inst, rt);
    write_hyperlinks(out, completed, sol.accepted);
  }
  if (a.oracle) {
    ExactResult exact = exact_stap(inst);
    if (exact.feasible) {
      report["oracle_cost"] = to_string(exact.cost);
      if (exact.cost > 0) {
        Rational ratio = sol.cost / exact.cost;
        report["ratio"] = to_string(ratio);
        std::cout << "exact optimum " << to_string(exact.cost) << ", ratio " << to_double(ratio)
                  << "\n";
      }
    }
  }
  emit_json(report, a.json_out);
  return 0;
}

struct SolveNwArgs {
  std::string file, root, json_out;
  bool oracle = false;
};

int solve_nwstap(const SolveNwArgs& a) {
  const StapInstance inst = load_instance(a.file);
  std::optional<VertexId> root;
  if (!a.root.empty()) root = vertex_arg(inst, a.root);
  const NwSolution sol = greedy_nwstap(inst, root);
  const StapInstance& g = sol.subdivided;

  json log = json::array();
  for (const auto& it : sol.log) {
    log.push_back({{"head", g.names[it.spider.head]},
                   {"feet", names_of(g, it.spider.feet)},
                   {"spider_cost", to_string(it.spider.cost)},
                   {"ratio", to_string(it.spider.ratio)},
                   {"paid", to_string(it.paid)},
                   {"newly_covered", it.newly_covered},
                   {"uncovered_after", it.uncovered_after}});
  }
  json report{{"instance", instance_stats(inst)},
              {"root", inst.names[sol.root]},
              {"iterations", log},
              {"cost", to_string(sol.cost)},
              {"steiner", names_of(inst, sol.steiner)},
              {"links", link_list(inst, sol.links)},
              {"trimmed", sol.trimmed},
              {"feasible", nw_feasible(g, sol.bought)}};
  std::cout << sol.log.size() << " iterations, cost " << to_string(sol.cost) << "\n";
  for (VertexId v : sol.steiner) std::cout << "  steiner " << inst.names[v] << "\n";
  for (LinkId id : sol.links) std::cout << "  link " << link_label(inst, id) << "\n";
  if (a.oracle) {
    ExactResult exact = exact_nwstap(inst);
    if (exact.feasible) {
      report["oracle_cost"] = to_string(exact.cost);
      if (exact.cost > 0) {
        report["ratio"] = to_string(sol.cost / exact.cost);
        std::cout << "exact optimum " << to_string(exact.cost) << "\n";
      }
    }
  }
  emit_json(report, a.json_out);
  return 0;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string sub, file, rho = "1", root;
  std::vector<std::string> links;
  int gamma = 0, k = 1;
  double time_cap = 60;
};

int oracle(const OracleArgs& a) {
  const StapInstance inst = load_instance(a.file);
  OracleBudget budget;
  budget.time_cap_seconds = a.time_cap;
  const VertexId root = a.root.empty() ? default_root(inst) : vertex_arg(inst, a.root);
  json out{{"oracle", a.sub}};
  auto exact_json = [&](const ExactResult& r) {
    out["feasible"] = r.feasible;
    if (r.feasible) out["cost"] = to_string(r.cost);
  };

  if (a.sub == "check-feasible") {
    std::vector<LinkId> ids;
    if (a.links.empty()) {
      for (LinkId id = 0; id < inst.num_links(); ++id) ids.push_back(id);
    }
    for (const auto& spec : a.links) {
      auto dash = spec.find(',');
      if (dash == std::string::npos) throw UsageError("--link expects u,v");
      VertexId u = vertex_arg(inst, spec.substr(0, dash));
      VertexId v = vertex_arg(inst, spec.substr(dash + 1));
      bool found = false;
      for (LinkId id = 0; id < inst.num_links() && !found; ++id) {
        const auto& l = inst.links[id];
        if ((l.u == u && l.v == v) || (l.u == v && l.v == u)) {
          ids.push_back(id);
          found = true;
        }
      }
      if (!found) throw UsageError("no link " + spec);
    }
    out["feasible"] = check_feasible_stap(inst, ids);
    out["bridge_check"] = bridge_feasible_stap(inst, ids);
  } else if (a.sub == "exact-stap") {
    ExactResult r = exact_stap(inst, budget);
    exact_json(r);
    if (r.feasible) out["links"] = link_list(inst, r.chosen);
  } else if (a.sub == "exact-nwstap") {
    ExactResult r = exact_nwstap(inst, budget);
    exact_json(r);
    if (r.feasible) out["nodes"] = names_of(subdivide_links(inst), r.chosen);
  } else if (a.sub == "exact-hypertap" || a.sub == "kthin") {
    const RootedTree rt = RootedTree::build(inst, root);
    const StapInstance completed = complete(inst, rt);
    const int r = static_cast<int>(inst.terminals().size());
    const int gamma = a.gamma > 0 ? a.gamma : std::max(r, 2);
    HyperTapInstance h = build_gamma_restricted(completed, rt, gamma);
    out["hyperlinks"] = h.links.size();
    if (a.sub == "exact-hypertap") {
      ExactResult res = exact_hypertap(h, budget);
      exact_json(res);
      if (res.feasible) out["chosen"] = res.chosen;
    } else {
      const auto all = enumerate_uplinks(completed, rt);
      const auto ups = shorten_exact_cover(optimal_uplink_solution(all, rt), all, rt);
      const Rational rho = rational_arg(a.rho, "rho");
      KThinResult res = exact_kthin_maximizer(rho, h, ups.uplinks, a.k, budget);
      KThinChoice dp = best_kthin_for_rho(rho, h, ups.uplinks, a.k);
      out["slack"] = to_string(res.slack);
      out["chosen"] = res.chosen;
      out["dp_slack"] = to_string(dp.slack);
    }
  } else if (a.sub == "min-ratio-spider") {
    if (inst.variant != Variant::kNodeWeighted) throw UsageError("needs a node-weighted instance");
    const StapInstance g = subdivide_links(inst);
    const RootedTree rt = RootedTree::build(g, root);
    const NwState state = initial_state(g, rt);
    if (state.uncovered.none()) {
      out["covered"] = true;
    } else {
      auto exact = exact_min_ratio_pseudo_spider(g, rt, state, budget);
      if (exact) {
        out["head"] = g.names[exact->head];
        out["feet"] = names_of(g, exact->feet);
        out["ratio"] = to_string(exact->ratio);
      }
      PseudoSpider approx = best_pseudo_spider(g, rt, state);
      out["greedy_ratio"] = to_string(approx.ratio);
    }
  } else {
    throw UsageError("unknown oracle '" + a.sub + "'");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string family = "random-tree", variant = "edge", costs = "uniform-int", out;
  int terminals = 6, steiner = 2, max_cost = 10, max_links = 0;
  double density = 0.3;
  std::uint64_t seed = 1;
};

GenSpec gen_spec(const GenArgs& a) {
  GenSpec s;
  s.family = parse_family(a.family);
  if (a.variant == "edge") {
    s.variant = Variant::kEdgeWeighted;
  } else if (a.variant == "node") {
    s.variant = Variant::kNodeWeighted;
  } else {
    throw UsageError("variant must be edge or node");
  }
  s.costs = parse_cost_distribution(a.costs);
  s.terminals = a.terminals;
  s.steiner = a.steiner;
  s.max_cost = a.max_cost;
  s.max_links = a.max_links;
  s.link_density = a.density;
  s.seed = seed_from_env(a.seed);
  return s;
}

int gen(const GenArgs& a) {
  const StapInstance inst = generate(gen_spec(a));
  if (a.out.empty() || a.out == "-") {
    write_instance(std::cout, inst);
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    write_instance(out, inst);
  }
  return 0;
}

struct BenchArgs {
  std::vector<std::string> files;
  std::vector<std::string> algorithms{"stap-greedy"};
  std::string epsilon = "1", gamma, k, csv_out, json_out;
  bool oracle = false, no_wall = false;
  RatioSearch search = RatioSearch::kNewton;
  int jobs = 1, count = 0;
  GenArgs gen;
};

int bench(const BenchArgs& a) {
  std::vector<BenchInput> inputs;
  for (const auto& f : a.files) inputs.push_back({f, load_instance(f)});
  if (a.count > 0) {
    GenSpec spec = gen_spec(a.gen);
    const std::uint64_t base = spec.seed;
    for (int i = 0; i < a.count; ++i) {
      spec.seed = base + static_cast<std::uint64_t>(i);
      inputs.push_back({"gen-" + std::to_string(spec.seed), generate(spec)});
    }
  }
  BenchOptions opt;
  opt.algorithms.clear();
  for (const auto& name : a.algorithms) opt.algorithms.push_back(parse_algorithm(name));
  opt.greedy.epsilon = rational_arg(a.epsilon, "epsilon");
  opt.greedy.caps.gamma = param_arg(a.gamma, "gamma");
  opt.greedy.caps.k = param_arg(a.k, "k");
  opt.greedy.search = a.search;
  opt.oracle = a.oracle;
  opt.jobs = a.jobs;
  const BenchReport report = run_bench(inputs, opt);

  if (a.csv_out.empty() || a.csv_out == "-") {
    write_csv(std::cout, report);
  } else {
    std::ofstream out(a.csv_out);
    write_csv(out, report);
  }
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out);
    out << report_json(report, !a.no_wall) << "\n";
  }
  for (const auto& r : report.rows) {
    if (!r.failure.empty()) std::cerr << r.instance << " " << r.algorithm << ": " << r.failure << "\n";
  }
  return report.failures() == 0 ? 0 : 1;
}

int validate_cmd(const std::string& file) {
  const StapInstance inst = load_instance(file);
  ValidationReport r = validate(inst);
  if (r.ok) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& v : r.violations) std::cout << v << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stapkit: Steiner tree augmentation solvers and oracles"};
  app.require_subcommand(1);
  int status = 0;
  const std::map<std::string, RatioSearch> searches{{"newton", RatioSearch::kNewton},
                                                    {"bisect", RatioSearch::kBisect}};

  SolveStapArgs ss;
  auto* s1 = app.add_subcommand("solve-stap", "local greedy for edge-weighted instances");
  s1->add_option("file", ss.file)->required()->check(CLI::ExistingFile);
  s1->add_option("--epsilon", ss.epsilon, "positive rational, default 1");
  s1->add_option("--gamma", ss.gamma, "N or 'theory'");
  s1->add_option("--k", ss.k, "N or 'theory'");
  s1->add_option("--root", ss.root, "terminal to root the tree at");
  s1->add_option("--search", ss.search, "min-ratio search: newton | bisect")
      ->transform(CLI::CheckedTransformer(searches));
  s1->add_option("--json", ss.json_out, "write a JSON report ('-' for stdout)");
  s1->add_flag("--oracle", ss.oracle, "compare with the exact optimum");
  s1->add_flag("--dump-uplinks", ss.dump_uplinks, "include the starting up-links in the report");
  s1->add_option("--dump-hyperlinks", ss.hyperlinks_out, "write accepted hyper-links to a file");
  s1->callback([&] { status = solve_stap(ss); });

  SolveNwArgs sn;
  auto* s2 = app.add_subcommand("solve-nwstap", "pseudo-spider greedy for node-weighted instances");
  s2->add_option("file", sn.file)->required()->check(CLI::ExistingFile);
  s2->add_option("--root", sn.root);
  s2->add_option("--json", sn.json_out);
  s2->add_flag("--oracle", sn.oracle);
  s2->callback([&] { status = solve_nwstap(sn); });

  OracleArgs oa;
  auto* s3 = app.add_subcommand("oracle", "exact solvers and checkers");
  s3->add_option("which", oa.sub,
                 "check-feasible | exact-stap | exact-nwstap | exact-hypertap | kthin | "
                 "min-ratio-spider")
      ->required();
  s3->add_option("file", oa.file)->required()->check(CLI::ExistingFile);
  s3->add_option("--link", oa.links, "u,v (check-feasible; default all links)");
  s3->add_option("--gamma", oa.gamma);
  s3->add_option("--k", oa.k);
  s3->add_option("--rho", oa.rho);
  s3->add_option("--root", oa.root);
  s3->add_option("--time-cap", oa.time_cap, "seconds");
  s3->callback([&] { status = oracle(oa); });

  GenArgs ga;
  auto add_gen_options = [](CLI::App* cmd, GenArgs& g) {
    cmd->add_option("--family", g.family, "random-tree | star | caterpillar | path");
    cmd->add_option("--variant", g.variant, "edge | node");
    cmd->add_option("--terminals", g.terminals);
    cmd->add_option("--steiner", g.steiner);
    cmd->add_option("--density", g.density);
    cmd->add_option("--costs", g.costs, "uniform-int | uniform-rational");
    cmd->add_option("--max-cost", g.max_cost);
    cmd->add_option("--max-links", g.max_links);
    cmd->add_option("--seed", g.seed, "overridden by STAPKIT_SEED");
  };
  auto* s4 = app.add_subcommand("gen", "generate an instance");
  add_gen_options(s4, ga);
  s4->add_option("--out", ga.out);
  s4->callback([&] { status = gen(ga); });

  BenchArgs ba;
  auto* s5 = app.add_subcommand("bench", "run algorithms over instances");
  s5->add_option("files", ba.files)->check(CLI::ExistingFile);
  s5->add_option("--algo", ba.algorithms, "stap-greedy | uplink | nw-greedy")->delimiter(',');
  s5->add_option("--epsilon", ba.epsilon);
  s5->add_option("--gamma", ba.gamma);
  s5->add_option("--k", ba.k);
  s5->add_option("--search", ba.search, "newton | bisect")
      ->transform(CLI::CheckedTransformer(searches));
  s5->add_flag("--oracle", ba.oracle);
  s5->add_option("--jobs", ba.jobs);
  s5->add_option("--csv", ba.csv_out);
  s5->add_option("--json", ba.json_out);
  s5->add_flag("--no-wall-time", ba.no_wall, "omit wall times from the JSON report");
  s5->add_option("--generate", ba.count, "also generate this many instances");
  add_gen_options(s5, ba.gen);
  s5->callback([&] { status = bench(ba); });

  std::string vfile;
  auto* s6 = app.add_subcommand("validate", "check instance invariants");
  s6->add_option("file", vfile)->required()->check(CLI::ExistingFile);
  s6->callback([&] { status = validate_cmd(vfile); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}
