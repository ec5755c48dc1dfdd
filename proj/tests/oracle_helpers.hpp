#pragma once

// Naive reference computations used only by the tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "stapkit/generator.hpp"
#include "stapkit/hyperlinks.hpp"
#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"

namespace ref {

using stapkit::ExtendedCost;
using stapkit::Rational;
using stapkit::StapInstance;
using stapkit::VertexId;

// All-pairs shortest link-graph distances.
inline std::vector<std::vector<ExtendedCost>> floyd_warshall(const StapInstance& inst) {
  const int n = inst.num_vertices();
  std::vector<std::vector<ExtendedCost>> d(n, std::vector<ExtendedCost>(n, ExtendedCost::infinity()));
  for (int i = 0; i < n; ++i) d[i][i] = ExtendedCost(0);
  for (const auto& l : inst.links) {
    ExtendedCost c(l.cost);
    if (c < d[l.u][l.v]) d[l.u][l.v] = d[l.v][l.u] = c;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Tree edges ids of the minimal subtree spanning `keep`: delete leaves
// outside `keep` until none is left.
inline std::set<int> leaf_prune(const StapInstance& inst, const std::set<VertexId>& keep) {
  std::set<int> alive;
  for (int e = 0; e < inst.num_tree_edges(); ++e) alive.insert(e);
  if (keep.size() <= 1) return {};
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<VertexId, int> degree;
    for (int e : alive) {
      ++degree[inst.tree_edges[e].u];
      ++degree[inst.tree_edges[e].v];
    }
    for (int e : std::set<int>(alive)) {
      for (VertexId end : {inst.tree_edges[e].u, inst.tree_edges[e].v}) {
        if (degree[end] == 1 && !keep.count(end) && alive.count(e)) {
          alive.erase(e);
          changed = true;
        }
      }
    }
  }
  return alive;
}

// LCA by walking both vertices to the root.
inline VertexId walk_lca(const stapkit::RootedTree& rt, VertexId a, VertexId b) {
  std::set<VertexId> up;
  for (VertexId v = a; v != stapkit::kNone; v = rt.parent(v)) up.insert(v);
  for (VertexId v = b; v != stapkit::kNone; v = rt.parent(v)) {
    if (up.count(v)) return v;
  }
  return stapkit::kNone;
}

// Cheapest s-t simple path by node costs of internal vertices (terminals
// weigh 0), found by exhaustive DFS.
inline ExtendedCost simple_path_min(const StapInstance& inst, VertexId s, VertexId t,
                                    bool through_terminals) {
  const int n = inst.num_vertices();
  std::vector<std::set<VertexId>> adj(n);
  for (const auto& l : inst.links) {
    if (l.u != l.v) {
      adj[l.u].insert(l.v);
      adj[l.v].insert(l.u);
    }
  }
  ExtendedCost best = s == t ? ExtendedCost(0) : ExtendedCost::infinity();
  std::vector<bool> on(n, false);
  std::function<void(VertexId, Rational)> dfs = [&](VertexId v, Rational acc) {
    for (VertexId w : adj[v]) {
      if (on[w]) continue;
      if (w == t) {
        if (ExtendedCost(acc) < best) best = ExtendedCost(acc);
        continue;
      }
      if (inst.is_terminal(w) && !through_terminals) continue;
      on[w] = true;
      dfs(w, acc + (inst.is_terminal(w) ? Rational(0) : inst.node_cost[w]));
      on[w] = false;
    }
  };
  on[s] = true;
  dfs(s, 0);
  return best;
}

// Steiner optimum: try every set of optional vertices, take the MST of
// the induced subgraph when it spans.
inline ExtendedCost brute_steiner(const stapkit::SteinerGraph& g, const std::vector<VertexId>& terms) {
  std::set<VertexId> tset(terms.begin(), terms.end());
  if (tset.size() <= 1) return ExtendedCost(0);
  std::vector<VertexId> optional;
  for (VertexId v = 0; v < g.num_vertices; ++v) {
    if (!tset.count(v) && !g.excluded[v]) optional.push_back(v);
  }
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.cost < b.cost; });
  ExtendedCost best = ExtendedCost::infinity();
  for (unsigned mask = 0; mask < (1u << optional.size()); ++mask) {
    std::vector<bool> in(g.num_vertices, false);
    for (VertexId t : tset) in[t] = true;
    int count = static_cast<int>(tset.size());
    for (size_t i = 0; i < optional.size(); ++i) {
      if (mask >> i & 1) {
        in[optional[i]] = true;
        ++count;
      }
    }
    std::vector<int> comp(g.num_vertices);
    for (int i = 0; i < g.num_vertices; ++i) comp[i] = i;
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    Rational cost = 0;
    int joined = 0;
    for (const auto& e : edges) {
      if (!in[e.u] || !in[e.v]) continue;
      int a = find(e.u), b = find(e.v);
      if (a == b) continue;
      comp[a] = b;
      cost += e.cost;
      ++joined;
    }
    if (joined == count - 1 && ExtendedCost(cost) < best) best = ExtendedCost(cost);
  }
  return best;
}

// Connected and stays connected after deleting any single edge.
inline bool two_edge_connected(int n, const std::vector<std::pair<VertexId, VertexId>>& edges,
                               const std::vector<bool>& active) {
  auto connected_without = [&](int skip) {
    VertexId start = -1;
    for (int v = 0; v < n; ++v) {
      if (active[v]) {
        start = v;
        break;
      }
    }
    if (start < 0) return true;
    std::vector<bool> seen(n, false);
    std::vector<VertexId> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        if (i == skip) continue;
        auto [a, b] = edges[i];
        if (!active[a] || !active[b]) continue;
        VertexId w = a == u ? b : (b == u ? a : -1);
        if (w >= 0 && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (active[v] && !seen[v]) return false;
    }
    return true;
  };
  if (!connected_without(-1)) return false;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    auto [a, b] = edges[i];
    if (active[a] && active[b] && !connected_without(i)) return false;
  }
  return true;
}

inline stapkit::GenSpec spec(int terminals, int steiner, double density, std::uint64_t seed,
                             stapkit::Family family = stapkit::Family::kRandomTree) {
  stapkit::GenSpec s;
  s.terminals = terminals;
  s.steiner = steiner;
  s.link_density = density;
  s.seed = seed;
  s.family = family;
  return s;
}

}  // namespace ref
