#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "stapkit/completion.hpp"
#include "stapkit/generator.hpp"
#include "stapkit/oracles.hpp"
#include "stapkit/stap_greedy.hpp"

using namespace stapkit;

namespace {

struct Fixture {
  StapInstance inst;
  RootedTree rt;
  StapInstance done;
  std::vector<UpLink> uplinks;
  HyperTapInstance hyper;
};

Fixture make(std::uint64_t seed, int terminals, int gamma) {
  StapInstance inst = generate(ref::spec(terminals, 1, 0.3, seed));
  RootedTree rt = RootedTree::build(inst, default_root(inst));
  StapInstance done = complete(inst, rt);
  auto all = enumerate_uplinks(done, rt);
  auto exact = shorten_exact_cover(optimal_uplink_solution(all, rt), all, rt);
  HyperTapInstance h = build_gamma_restricted(done, rt, gamma);
  return {inst, rt, done, exact.uplinks, h};
}

// Vertex loads counted from the tree edges of each coverage.
bool naive_thin(const Fixture& f, const std::vector<int>& ids, int k) {
  std::vector<int> load(f.inst.num_vertices(), 0);
  for (int id : ids) {
    std::set<VertexId> verts;
    const auto& hl = f.hyper.links[id];
    for (int e : ref::leaf_prune(f.inst, {hl.terminals.begin(), hl.terminals.end()})) {
      verts.insert(f.inst.tree_edges[e].u);
      verts.insert(f.inst.tree_edges[e].v);
    }
    for (VertexId v : verts) ++load[v];
  }
  return *std::max_element(load.begin(), load.end()) <= k;
}

Rational dropped_cost(const Fixture& f, const std::vector<int>& ids) {
  std::vector<bool> covered(f.inst.num_tree_edges(), false);
  for (int id : ids) {
    const auto& hl = f.hyper.links[id];
    for (int e : ref::leaf_prune(f.inst, {hl.terminals.begin(), hl.terminals.end()})) covered[e] = true;
  }
  Rational sum = 0;
  for (const auto& u : f.uplinks) {
    bool inside = true;
    for (int e : f.rt.path(u.bottom, u.top)) inside = inside && covered[e];
    if (inside) sum += u.cost;
  }
  return sum;
}

}  // namespace

TEST_CASE("epsilon maps to gamma and k") {
  GreedyParams p = epsilon_to_params(Rational(1));
  CHECK(p.epsilon_prime == doctest::Approx(0.5 / (1.5 + std::log(2.0))));
  CHECK(p.gamma_exponent == 5);
  CHECK(p.gamma_theory == 32);
  CHECK(p.k_theory == 4);
  CHECK(p.gamma == 4);
  CHECK(p.k == 3);
  CHECK(p.gamma_capped);
  CHECK(p.k_capped);

  GreedyParams tenth = epsilon_to_params(Rational(1, 10));
  CHECK(tenth.k_theory == 40);
  CHECK(tenth.gamma_exponent == 35);

  GreedyCaps theory;
  theory.gamma = ParamChoice::theory();
  theory.k = ParamChoice::theory();
  GreedyParams t = epsilon_to_params(Rational(2), theory);
  CHECK(t.k == 2);
  CHECK(t.gamma == t.gamma_theory);
  CHECK_FALSE(t.k_capped);

  GreedyCaps fixed;
  fixed.gamma = ParamChoice::fixed(2);
  fixed.k = ParamChoice::fixed(7);
  GreedyParams x = epsilon_to_params(Rational(1), fixed);
  CHECK(x.gamma == 2);
  CHECK(x.k == 7);

  CHECK_THROWS_AS(epsilon_to_params(Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_to_params(Rational(-1)), std::invalid_argument);
}

TEST_CASE("drop set and slack against direct path checks") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Fixture f = make(seed, 7, 3);
    SeededRng rng(seed);
    for (int trial = 0; trial < 15; ++trial) {
      std::vector<int> ids;
      std::vector<const HyperLink*> ptrs;
      Rational cost = 0;
      for (const auto& hl : f.hyper.links) {
        if (rng.bernoulli(0.1)) {
          ids.push_back(hl.id);
          ptrs.push_back(&hl);
          cost += hl.cost;
        }
      }
      auto drop = drop_set(f.uplinks, ptrs, f.rt);
      Rational dc = 0;
      for (int i : drop) dc += f.uplinks[i].cost;
      CHECK(dc == dropped_cost(f, ids));
      const Rational rho(3, 2);
      CHECK(slack(rho, ptrs, f.uplinks, f.rt) == rho * dc - cost);
    }
  }
}

TEST_CASE("k-thin maximizer equals enumeration") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Fixture f = seed % 2 ? make(seed, 4, 3) : make(seed, 5, 2);
    if (f.hyper.links.size() > 14) continue;
    ++checked;
    for (int k : {1, 2, 3}) {
      KThinSearch search(f.hyper, k);
      for (Rational rho : {Rational(1, 2), Rational(1), Rational(2)}) {
        KThinChoice got = search.best_for_rho(rho, f.uplinks);
        KThinResult want = exact_kthin_maximizer(rho, f.hyper, f.uplinks, k);
        CHECK(got.slack == want.slack);
        CHECK(naive_thin(f, got.chosen, k));
        Rational cost = 0;
        for (int id : got.chosen) cost += f.hyper.links[id].cost;
        CHECK(rho * dropped_cost(f, got.chosen) - cost == got.slack);
      }
    }
  }
  CHECK(checked > 6);
}

TEST_CASE("thinness is vacuous once k reaches the edge count") {
  Fixture f = make(4, 4, 4);
  KThinSearch search(f.hyper, f.inst.num_tree_edges());
  CHECK(search.thinness_vacuous());
  KThinSearch tight(f.hyper, 1);
  CHECK_FALSE(tight.thinness_vacuous());
}

TEST_CASE("minimum ratio matches subset enumeration") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Fixture f = seed % 2 ? make(seed, 4, 3) : make(seed, 5, 2);
    const int m = static_cast<int>(f.hyper.links.size());
    if (m > 13) continue;
    ++checked;
    for (int k : {1, 2}) {
      std::optional<Rational> best;
      for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> ids;
        Rational cost = 0;
        for (int i = 0; i < m; ++i) {
          if (mask >> i & 1) {
            ids.push_back(i);
            cost += f.hyper.links[i].cost;
          }
        }
        if (!naive_thin(f, ids, k)) continue;
        Rational dc = dropped_cost(f, ids);
        if (dc == 0) continue;
        Rational r = cost / dc;
        if (!best || r < *best) best = r;
      }
      REQUIRE(best);
      KThinSearch search(f.hyper, k);
      RatioChoice newton = min_ratio_kthin(search, f.uplinks, Rational(1, 1000000000));
      RatioChoice bisect =
          min_ratio_kthin(search, f.uplinks, Rational(1, 1000000000), RatioSearch::kBisect);
      if (newton.cost == 0) {
        CHECK(*best == 0);
      } else {
        CHECK(newton.ratio == *best);
      }
      CHECK(bisect.cost * newton.dropped_cost == newton.cost * bisect.dropped_cost);
      CHECK(newton.dropped_cost == dropped_cost(f, newton.chosen));
      CHECK(newton.dp_calls <= bisect.dp_calls);
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("local greedy is feasible and never worse than the start") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GenSpec s = ref::spec(7, 2, 0.3, seed);
    s.costs = seed % 2 ? CostDistribution::kUniformRational : CostDistribution::kUniformInt;
    StapInstance inst = generate(s);
    GreedyOptions opt;
    StapSolution sol = local_greedy(inst, opt);
    CHECK(check_feasible_stap(inst, sol.links));
    CHECK(sol.cost <= sol.initial_cost);
    CHECK(sol.initial_cost <= 2 * sol.uplink_optimum);
    CHECK(sol.expanded_cost == link_cost(inst, sol.links));
    CHECK(sol.expanded_cost <= sol.cost);
    Rational paid = sol.initial_cost;
    for (const auto& it : sol.log) {
      CHECK(it.dropped > 0);
      CHECK(it.cost <= it.dropped_cost);
      paid += it.cost - it.dropped_cost;
    }
    CHECK(paid == sol.cost);
    ExactResult exact = exact_stap(inst);
    REQUIRE(exact.feasible);
    CHECK(sol.cost >= exact.cost);
  }
}

TEST_CASE("local greedy honours the root and reports infeasibility") {
  StapInstance inst = generate(ref::spec(5, 0, 0.5, 9));
  GreedyOptions opt;
  opt.root = inst.terminals().back();
  CHECK(local_greedy(inst, opt).root == opt.root);

  StapInstance bad = parse_instance_string(
      "stap 1 edge\nterminal a\nterminal b\nterminal c\ntree a b\ntree b c\nlink a b 1\n");
  CHECK_THROWS_AS(local_greedy(bad, GreedyOptions{}), InfeasibleError);
}

TEST_CASE("theory parameters are flagged faithful") {
  StapInstance inst = generate(ref::spec(4, 0, 0.6, 2));
  GreedyOptions opt;
  opt.caps.gamma = ParamChoice::theory();
  opt.caps.k = ParamChoice::theory();
  CHECK(local_greedy(inst, opt).theory_faithful);
}
