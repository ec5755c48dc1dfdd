#include <doctest.h>

#include "oracle_helpers.hpp"
#include "stapkit/completion.hpp"
#include "stapkit/generator.hpp"
#include "stapkit/uplinks.hpp"

using namespace stapkit;

namespace {

// Cheapest cover by trying every subset of up-links.
Rational brute_uplink_cover(const std::vector<UpLink>& ups, const RootedTree& rt) {
  REQUIRE(ups.size() <= 20);
  std::optional<Rational> best;
  for (unsigned mask = 0; mask < (1u << ups.size()); ++mask) {
    EdgeSet covered = rt.empty_edge_set();
    Rational cost = 0;
    for (size_t i = 0; i < ups.size(); ++i) {
      if (mask >> i & 1) {
        covered |= ups[i].path;
        cost += ups[i].cost;
      }
    }
    if (static_cast<int>(covered.count()) == rt.num_edges() && (!best || cost < *best)) best = cost;
  }
  REQUIRE(best);
  return *best;
}

}  // namespace

TEST_CASE("up-links are the cheapest ancestor links") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    StapInstance inst = generate(ref::spec(7, 2, 0.3, seed));
    RootedTree rt = RootedTree::build(inst, default_root(inst));
    StapInstance done = complete(inst, rt);
    auto ups = enumerate_uplinks(done, rt);
    auto direct = cheapest_link_matrix(done);
    std::set<std::pair<VertexId, VertexId>> seen;
    for (size_t i = 0; i < ups.size(); ++i) {
      const auto& u = ups[i];
      CHECK(rt.is_ancestor(u.top, u.bottom));
      CHECK(u.top != u.bottom);
      CHECK(ExtendedCost(u.cost) == direct[u.bottom][u.top]);
      CHECK(done.links[u.link].cost == u.cost);
      auto path = rt.path(u.bottom, u.top);
      CHECK(u.path.count() == path.size());
      for (int e : path) CHECK(u.path.test(e));
      CHECK(seen.insert({u.bottom, u.top}).second);
      if (i > 0) {
        CHECK(std::make_pair(ups[i - 1].bottom, ups[i - 1].top) < std::make_pair(u.bottom, u.top));
      }
    }
    for (VertexId a : inst.terminals())
      for (VertexId b : inst.terminals())
        if (a != b && rt.is_ancestor(b, a) && direct[a][b].finite()) CHECK(seen.count({a, b}));
  }
}

TEST_CASE("optimal up-link cover equals subset enumeration") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenSpec s = ref::spec(6, 2, 0.3, seed);
    s.costs = CostDistribution::kUniformRational;
    StapInstance inst = generate(s);
    RootedTree rt = RootedTree::build(inst, default_root(inst));
    StapInstance done = complete(inst, rt);
    auto ups = enumerate_uplinks(done, rt);
    if (ups.size() > 16) continue;
    ++checked;
    auto sol = optimal_uplink_solution(ups, rt);
    CHECK(sol.total_cost == brute_uplink_cover(ups, rt));
    Rational sum = 0;
    for (const auto& u : sol.uplinks) sum += u.cost;
    CHECK(sum == sol.total_cost);
  }
  CHECK(checked > 20);
}

TEST_CASE("shortening gives an exact cover at no extra cost") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    StapInstance inst = generate(ref::spec(9, 3, 0.25, seed));
    RootedTree rt = RootedTree::build(inst, default_root(inst));
    StapInstance done = complete(inst, rt);
    auto ups = enumerate_uplinks(done, rt);
    auto opt = optimal_uplink_solution(ups, rt);
    auto exact = shorten_exact_cover(opt, ups, rt);
    CHECK(exact.total_cost <= opt.total_cost);
    std::vector<int> mult(rt.num_edges(), 0);
    for (const auto& u : exact.uplinks)
      for (int e : rt.path(u.bottom, u.top)) ++mult[e];
    for (int m : mult) CHECK(m == 1);
    CHECK(coverage_multiplicity(exact.uplinks, rt) == mult);
  }
}

TEST_CASE("multiplicity counts overlapping up-links") {
  StapInstance inst = parse_instance_string(
      "stap 1 edge\nterminal a\nterminal b\nterminal c\n"
      "tree a b\ntree b c\nlink a c 1\nlink b c 1\n");
  RootedTree rt = RootedTree::build(inst, *inst.find("a"));
  StapInstance done = complete(inst, rt);
  auto ups = enumerate_uplinks(done, rt);
  std::vector<UpLink> both;
  const VertexId c = *inst.find("c");
  for (const auto& u : ups) {
    if (u.bottom == c) both.push_back(u);
  }
  REQUIRE(both.size() == 2);
  auto mult = coverage_multiplicity(both, rt);
  const TreeEdgeId bc = rt.parent_edge(c);
  const TreeEdgeId ab = rt.parent_edge(*inst.find("b"));
  CHECK(mult[bc] == 2);
  CHECK(mult[ab] == 1);
}

TEST_CASE("uncoverable edge is reported") {
  StapInstance inst = parse_instance_string(
      "stap 1 edge\nterminal a\nterminal b\nterminal c\n"
      "tree a b\ntree b c\nlink b c 1\n");
  RootedTree rt = RootedTree::build(inst, *inst.find("a"));
  StapInstance done = complete(inst, rt);
  auto ups = enumerate_uplinks(done, rt);
  CHECK_THROWS_AS(optimal_uplink_solution(ups, rt), InfeasibleError);
}
