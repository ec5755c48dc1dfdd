#include "stapkit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "stapkit/completion.hpp"
#include "stapkit/nw_greedy.hpp"
#include "stapkit/uplinks.hpp"

namespace stapkit {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "stap-greedy") return Algorithm::kStapGreedy;
  if (name == "uplink") return Algorithm::kUplink;
  if (name == "nw-greedy") return Algorithm::kNwGreedy;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kStapGreedy: return "stap-greedy";
    case Algorithm::kUplink: return "uplink";
    case Algorithm::kNwGreedy: return "nw-greedy";
  }
  return "?";
}

int BenchReport::failures() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                        [](const BenchRow& r) { return !r.failure.empty(); }));
}

namespace {

bool applies(Algorithm a, const StapInstance& inst) {
  return (a == Algorithm::kNwGreedy) == (inst.variant == Variant::kNodeWeighted);
}

void solve(const StapInstance& inst, Algorithm a, const BenchOptions& options, BenchRow& row) {
  switch (a) {
    case Algorithm::kStapGreedy: {
      StapSolution sol = local_greedy(inst, options.greedy);
      row.cost = sol.cost;
      row.iterations = static_cast<int>(sol.log.size());
      row.theory_faithful = sol.theory_faithful;
      row.feasible = check_feasible_stap(inst, sol.links) && sol.expanded_cost <= sol.cost;
      break;
    }
    case Algorithm::kUplink: {
      const RootedTree rt =
          RootedTree::build(inst, options.greedy.root.value_or(default_root(inst)));
      const StapInstance completed = complete(inst, rt);
      const auto all = enumerate_uplinks(completed, rt);
      const auto sol = shorten_exact_cover(optimal_uplink_solution(all, rt), all, rt);
      std::vector<LinkId> ids;
      for (const auto& u : sol.uplinks) ids.push_back(u.link);
      const auto links = expand_links(completed, ids);
      row.cost = sol.total_cost;
      row.feasible = check_feasible_stap(inst, links) && link_cost(inst, links) <= sol.total_cost;
      break;
    }
    case Algorithm::kNwGreedy: {
      NwSolution sol = greedy_nwstap(inst, options.greedy.root);
      row.cost = sol.cost;
      row.iterations = static_cast<int>(sol.log.size());
      row.feasible = nw_feasible(sol.subdivided, sol.bought);
      break;
    }
  }
}

void check(const StapInstance& inst, Algorithm a, const BenchOptions& options, BenchRow& row) {
  if (!row.feasible) {
    row.failure = "solution failed re-verification";
    return;
  }
  if (!row.oracle_cost) return;
  const Rational& opt = *row.oracle_cost;
  if (opt == 0) {
    if (row.cost != 0) row.failure = "positive cost where the optimum is 0";
    return;
  }
  row.ratio = row.cost / opt;
  const Rational& ratio = *row.ratio;
  if (ratio < 1) {
    row.failure = "cost below the exact optimum";
    return;
  }
  const double edges = static_cast<double>(inst.num_tree_edges());
  switch (a) {
    case Algorithm::kStapGreedy: {
      if (ratio > 2) row.failure = "ratio above 2";
      const double bound = 1 + std::log(2.0) + options.greedy.epsilon.get_d();
      if (row.theory_faithful && to_double(ratio) > bound + 1e-12) {
        row.failure = "ratio above 1 + ln 2 + epsilon";
      }
      break;
    }
    case Algorithm::kUplink:
      if (ratio > 2) row.failure = "ratio above 2";
      break;
    case Algorithm::kNwGreedy: {
      const double env = 8 * std::pow(1 + std::log(std::max(edges, 1.0)), 2);
      if (to_double(ratio) > env) row.failure = "ratio above the sanity envelope";
      if (row.iterations > inst.num_tree_edges()) row.failure = "more iterations than tree edges";
      break;
    }
  }
}

BenchRow run_one(const BenchInput& input, Algorithm a, const BenchOptions& options) {
  BenchRow row;
  row.instance = input.id;
  row.algorithm = std::string(algorithm_name(a));
  const auto start = std::chrono::steady_clock::now();
  try {
    solve(input.instance, a, options, row);
  } catch (const std::exception& e) {
    row.failure = std::string("solver error: ") + e.what();
    return row;
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  if (options.oracle) {
    try {
      ExactResult exact = a == Algorithm::kNwGreedy ? exact_nwstap(input.instance, options.budget)
                                                    : exact_stap(input.instance, options.budget);
      if (exact.feasible) row.oracle_cost = exact.cost;
    } catch (const ResourceError&) {
      // Over budget: the row simply has no ratio.
    }
  }
  check(input.instance, a, options, row);
  return row;
}

}  // namespace

BenchReport run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& options) {
  struct Task {
    const BenchInput* input;
    Algorithm algorithm;
  };
  std::vector<Task> tasks;
  for (const auto& in : inputs) {
    for (Algorithm a : options.algorithms) {
      if (applies(a, in.instance)) tasks.push_back({&in, a});
    }
  }
  BenchReport report;
  report.rows.resize(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      report.rows[i] = run_one(*tasks[i].input, tasks[i].algorithm, options);
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

void write_csv(std::ostream& out, const BenchReport& report) {
  out << "# stapkit bench csv v" << kCsvVersion << "\n";
  out << "instance,algorithm,cost,oracle_cost,ratio,iterations,wall_ms,feasible,ok\n";
  for (const auto& r : report.rows) {
    out << r.instance << ',' << r.algorithm << ',' << to_string(r.cost) << ','
        << (r.oracle_cost ? to_string(*r.oracle_cost) : "") << ','
        << (r.ratio ? to_string(*r.ratio) : "") << ',' << r.iterations << ',' << r.wall_ms << ','
        << (r.feasible ? 1 : 0) << ',' << (r.failure.empty() ? 1 : 0) << '\n';
  }
}

std::string report_json(const BenchReport& report, bool include_wall_time) {
  nlohmann::json rows = nlohmann::json::array();
  double max_ratio = 0, sum_ratio = 0;
  int with_ratio = 0;
  for (const auto& r : report.rows) {
    nlohmann::json j{{"instance", r.instance},
                     {"algorithm", r.algorithm},
                     {"cost", to_string(r.cost)},
                     {"cost_float", to_double(r.cost)},
                     {"iterations", r.iterations},
                     {"feasible", r.feasible},
                     {"theory_faithful", r.theory_faithful},
                     {"ok", r.failure.empty()}};
    if (include_wall_time) j["wall_ms"] = r.wall_ms;
    if (r.oracle_cost) j["oracle_cost"] = to_string(*r.oracle_cost);
    if (r.ratio) {
      j["ratio"] = to_string(*r.ratio);
      j["ratio_float"] = to_double(*r.ratio);
      max_ratio = std::max(max_ratio, to_double(*r.ratio));
      sum_ratio += to_double(*r.ratio);
      ++with_ratio;
    }
    if (!r.failure.empty()) j["failure"] = r.failure;
    rows.push_back(std::move(j));
  }
  nlohmann::json out{{"csv_version", kCsvVersion},
                     {"rows", rows},
                     {"summary",
                      {{"rows", report.rows.size()},
                       {"failures", report.failures()},
                       {"rows_with_ratio", with_ratio},
                       {"max_ratio", max_ratio},
                       {"mean_ratio", with_ratio ? sum_ratio / with_ratio : 0.0}}}};
  return out.dump(2);
}

}  // namespace stapkit
