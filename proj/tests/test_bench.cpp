#include <doctest.h>

#include <cstdlib>
#include <map>
#include <sstream>

#include <json.hpp>

#include "oracle_helpers.hpp"
#include "stapkit/bench.hpp"
#include "stapkit/generator.hpp"
#include "stapkit/oracles.hpp"

using namespace stapkit;

namespace {

std::vector<BenchInput> mixed_inputs() {
  std::vector<BenchInput> in;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    in.push_back({"e" + std::to_string(seed), generate(ref::spec(5, 1, 0.4, seed))});
    GenSpec s = ref::spec(4, 4, 0.35, seed);
    s.variant = Variant::kNodeWeighted;
    in.push_back({"n" + std::to_string(seed), generate(s)});
  }
  return in;
}

}  // namespace

TEST_CASE("generator output is reproducible") {
  for (Family f : {Family::kRandomTree, Family::kStar, Family::kCaterpillar, Family::kPath}) {
    GenSpec s = ref::spec(7, 3, 0.3, 42, f);
    CHECK(write_instance_string(generate(s)) == write_instance_string(generate(s)));
    GenSpec other = s;
    other.seed = 43;
    CHECK(write_instance_string(generate(s)) != write_instance_string(generate(other)));
  }
}

TEST_CASE("generator families have their shapes") {
  StapInstance star = generate(ref::spec(6, 0, 0.3, 1, Family::kStar));
  CHECK(validate(star).ok);
  CHECK(star.num_tree_edges() == 5);
  std::map<VertexId, int> degree;
  for (const auto& e : star.tree_edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  int hubs = 0;
  for (auto [v, d] : degree) hubs += d == 5;
  CHECK(hubs == 1);

  StapInstance path = generate(ref::spec(8, 1, 0.3, 2, Family::kPath));
  degree.clear();
  for (const auto& e : path.tree_edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  for (auto [v, d] : degree) CHECK(d <= 2);

  GenSpec capped = ref::spec(8, 2, 0.9, 3);
  capped.max_links = 12;
  StapInstance c = generate(capped);
  CHECK(c.num_links() <= 12);
  CHECK(validate(c).ok);
}

TEST_CASE("node-weighted generation prices Steiner nodes only") {
  GenSpec s = ref::spec(5, 4, 0.4, 8);
  s.variant = Variant::kNodeWeighted;
  StapInstance inst = generate(s);
  CHECK(validate(inst).ok);
  for (const auto& l : inst.links) CHECK(l.cost == 0);
  for (VertexId v : inst.steiner_nodes()) CHECK(inst.node_cost[v] >= 1);
}

TEST_CASE("generator rejects bad specs") {
  GenSpec s = ref::spec(0, 0, 0.3, 1);
  CHECK_THROWS(generate(s));
  s = ref::spec(4, 0, 1.5, 1);
  CHECK_THROWS(generate(s));
  s = ref::spec(6, 0, 0.0, 1);
  s.max_retries = 3;
  CHECK_THROWS_AS(generate(s), std::runtime_error);
}

TEST_CASE("names parse back") {
  for (Family f : {Family::kRandomTree, Family::kStar, Family::kCaterpillar, Family::kPath})
    CHECK(parse_family(family_name(f)) == f);
  for (Algorithm a : {Algorithm::kStapGreedy, Algorithm::kUplink, Algorithm::kNwGreedy})
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK_THROWS(parse_family("blob"));
  CHECK_THROWS(parse_algorithm("blob"));
  CHECK(parse_cost_distribution("uniform-int") == CostDistribution::kUniformInt);
  CHECK_THROWS(parse_cost_distribution("blob"));
}

TEST_CASE("seed comes from the environment") {
  ::unsetenv("STAPKIT_SEED");
  CHECK(seed_from_env(17) == 17);
  ::setenv("STAPKIT_SEED", "12345", 1);
  CHECK(seed_from_env(17) == 12345);
  ::unsetenv("STAPKIT_SEED");
}

TEST_CASE("rng draws stay in range and are reproducible") {
  SeededRng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    auto x = a.uniform(-3, 9);
    CHECK(x >= -3);
    CHECK(x <= 9);
    CHECK(x == b.uniform(-3, 9));
  }
  CHECK_FALSE(a.bernoulli(0));
  CHECK(a.bernoulli(1));
}

TEST_CASE("empty bench has no rows") {
  BenchReport r = run_bench({}, BenchOptions{});
  CHECK(r.rows.empty());
  CHECK(r.failures() == 0);
  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str().rfind("# stapkit bench csv v", 0) == 0);
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["summary"]["rows"] == 0);
}

TEST_CASE("bench rows are deterministic and verified") {
  BenchOptions opt;
  opt.algorithms = {Algorithm::kStapGreedy, Algorithm::kUplink, Algorithm::kNwGreedy};
  opt.oracle = true;
  auto inputs = mixed_inputs();
  BenchReport one = run_bench(inputs, opt);
  opt.jobs = 3;
  BenchReport three = run_bench(inputs, opt);
  // Edge instances get two rows, node instances one.
  CHECK(one.rows.size() == 4 * 2 + 4);
  CHECK(one.failures() == 0);
  CHECK(report_json(one, false) == report_json(three, false));
  for (const auto& row : one.rows) {
    CHECK(row.feasible);
    REQUIRE(row.oracle_cost);
    CHECK(row.cost >= *row.oracle_cost);
    if (row.algorithm == "nw-greedy") CHECK(row.instance[0] == 'n');
  }
  std::ostringstream csv;
  write_csv(csv, one);
  std::istringstream lines(csv.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 2 + static_cast<int>(one.rows.size()));
  auto j = nlohmann::json::parse(report_json(one));
  CHECK(j["rows"].size() == one.rows.size());
  CHECK(j["rows"][0].contains("wall_ms"));
  CHECK_FALSE(nlohmann::json::parse(report_json(one, false))["rows"][0].contains("wall_ms"));
}

TEST_CASE("two-terminal path and six-terminal star") {
  StapInstance path = generate(ref::spec(2, 0, 0.3, 1, Family::kPath));
  CHECK(path.num_tree_edges() == 1);
  CHECK(path.num_links() >= 1);
  StapInstance star = generate(ref::spec(6, 2, 0.3, 1, Family::kStar));
  CHECK(validate(star).ok);
  CHECK(exact_stap(star).feasible);
}

TEST_CASE("one instance, one algorithm, one row") {
  BenchReport r = run_bench({{"only", generate(ref::spec(5, 1, 0.4, 6))}}, BenchOptions{});
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].iterations >= 0);
  CHECK(r.rows[0].failure.empty());
  CHECK_FALSE(r.rows[0].oracle_cost);
}
