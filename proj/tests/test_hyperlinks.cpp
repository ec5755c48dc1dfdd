#include <doctest.h>

#include <map>
#include <sstream>

#include "oracle_helpers.hpp"
#include "stapkit/completion.hpp"
#include "stapkit/generator.hpp"
#include "stapkit/hyperlinks.hpp"

using namespace stapkit;

namespace {

SteinerGraph random_graph(SeededRng& rng, int n, double p) {
  SteinerGraph g;
  g.num_vertices = n;
  g.excluded.assign(n, false);
  int id = 0;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) {
        Rational c(rng.uniform(1, 9), rng.uniform(1, 3));
        c.canonicalize();
        g.edges.push_back({u, v, c, id++});
      }
    }
  }
  return g;
}

SteinerGraph graph_without_other_terminals(const StapInstance& inst,
                                           const std::vector<VertexId>& keep) {
  SteinerGraph g;
  g.num_vertices = inst.num_vertices();
  g.excluded.assign(g.num_vertices, false);
  for (VertexId t : inst.terminals()) g.excluded[t] = true;
  for (VertexId t : keep) g.excluded[t] = false;
  for (LinkId i = 0; i < inst.num_links(); ++i) {
    const auto& l = inst.links[i];
    g.edges.push_back({l.u, l.v, l.cost, i});
  }
  return g;
}

}  // namespace

TEST_CASE("dreyfus-wagner matches subset enumeration") {
  SeededRng rng(7);
  for (int round = 0; round < 60; ++round) {
    const int n = static_cast<int>(rng.uniform(3, 8));
    SteinerGraph g = random_graph(rng, n, 0.45);
    std::vector<VertexId> terms;
    for (VertexId v = 0; v < n; ++v)
      if (rng.bernoulli(0.5)) terms.push_back(v);
    if (terms.empty()) terms.push_back(0);
    if (n > 3 && rng.bernoulli(0.3)) {
      VertexId x = static_cast<VertexId>(rng.uniform(0, n - 1));
      if (std::find(terms.begin(), terms.end(), x) == terms.end()) g.excluded[x] = true;
    }
    SteinerTree got = dreyfus_wagner(g, terms);
    CHECK(got.cost == ref::brute_steiner(g, terms));
    if (got.cost.finite()) {
      Rational sum = 0;
      for (int id : got.edge_ids) sum += g.edges[id].cost;
      CHECK(ExtendedCost(sum) == got.cost);
    }
  }
}

TEST_CASE("dreyfus-wagner rejects excluded terminals") {
  SteinerGraph g;
  g.num_vertices = 2;
  g.excluded = {false, true};
  std::vector<VertexId> terms{0, 1};
  CHECK_THROWS_AS(dreyfus_wagner(g, terms), std::invalid_argument);
}

TEST_CASE("subset counting") {
  CHECK(count_subsets(4, 2) == 6);
  CHECK(count_subsets(4, 4) == 11);
  CHECK(count_subsets(5, 3) == 20);
  CHECK(count_subsets(3, 10) == 4);
  CHECK(count_subsets(200, 200) == std::numeric_limits<std::int64_t>::max());
}

TEST_CASE("gamma-restricted hyper-links are cheapest full components") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    StapInstance inst = generate(ref::spec(6, 3, 0.35, seed));
    RootedTree rt = RootedTree::build(inst, default_root(inst));
    StapInstance done = complete(inst, rt);
    for (int gamma : {2, 3, 4}) {
      HyperTapInstance h = build_gamma_restricted(done, rt, gamma);
      CHECK(h.gamma == gamma);
      std::map<std::vector<VertexId>, Rational> seen;
      for (const auto& hl : h.links) {
        CHECK(hl.terminals.size() >= 2);
        CHECK(static_cast<int>(hl.terminals.size()) <= gamma);
        CHECK(std::is_sorted(hl.terminals.begin(), hl.terminals.end()));
        CHECK_FALSE(seen.count(hl.terminals));
        seen[hl.terminals] = hl.cost;
        CHECK(ExtendedCost(hl.cost) ==
              ref::brute_steiner(graph_without_other_terminals(done, hl.terminals), hl.terminals));
        Rational sum = 0;
        for (LinkId l : hl.realization) sum += done.links[l].cost;
        CHECK(sum == hl.cost);
      }
      // Every connectable pair gets a hyper-link.
      const auto terms = done.terminals();
      for (size_t i = 0; i < terms.size(); ++i) {
        for (size_t j = i + 1; j < terms.size(); ++j) {
          std::vector<VertexId> pair{terms[i], terms[j]};
          bool reachable =
              ref::brute_steiner(graph_without_other_terminals(done, pair), pair).finite();
          CHECK(reachable == static_cast<bool>(seen.count(pair)));
        }
      }
    }
  }
}

TEST_CASE("subset limit raises a resource error") {
  StapInstance inst = generate(ref::spec(10, 0, 0.3, 3));
  RootedTree rt = RootedTree::build(inst, default_root(inst));
  StapInstance done = complete(inst, rt);
  CHECK_THROWS_AS(build_gamma_restricted(done, rt, 5, 100), ResourceError);
}

TEST_CASE("apex, coverage and thinness against naive counting") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    StapInstance inst = generate(ref::spec(8, 0, 0.3, seed));
    RootedTree rt = RootedTree::build(inst, default_root(inst));
    StapInstance done = complete(inst, rt);
    HyperTapInstance h = build_gamma_restricted(done, rt, 3);
    for (const auto& hl : h.links) {
      VertexId a = hl.terminals[0];
      for (VertexId t : hl.terminals) a = ref::walk_lca(rt, a, t);
      CHECK(apex(rt, hl) == a);
      std::set<int> expected = ref::leaf_prune(inst, {hl.terminals.begin(), hl.terminals.end()});
      EdgeSet got = coverage(rt, hl);
      CHECK(got.count() == expected.size());
      for (int e : expected) CHECK(got.test(e));
    }
    SeededRng rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<HyperLink> pick;
      for (const auto& hl : h.links)
        if (rng.bernoulli(0.15)) pick.push_back(hl);
      std::map<VertexId, int> load;
      for (const auto& hl : pick) {
        std::set<VertexId> verts(hl.terminals.begin(), hl.terminals.end());
        for (int e : ref::leaf_prune(inst, verts)) {
          verts.insert(inst.tree_edges[e].u);
          verts.insert(inst.tree_edges[e].v);
        }
        for (VertexId v : verts) ++load[v];
      }
      int worst = 0;
      for (auto [v, c] : load) worst = std::max(worst, c);
      for (int k = 1; k <= 4; ++k) CHECK(is_k_thin(rt, pick, k) == (worst <= k));
    }
  }
}

TEST_CASE("hyper-link dump reads back") {
  StapInstance inst = generate(ref::spec(6, 2, 0.4, 5));
  RootedTree rt = RootedTree::build(inst, default_root(inst));
  StapInstance done = complete(inst, rt);
  HyperTapInstance h = build_gamma_restricted(done, rt, 3);
  std::stringstream ss;
  write_hyperlinks(ss, done, h.links);
  auto back = read_hyperlinks(ss, done);
  REQUIRE(back.size() == h.links.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].terminals == h.links[i].terminals);
    CHECK(back[i].cost == h.links[i].cost);
  }
}
