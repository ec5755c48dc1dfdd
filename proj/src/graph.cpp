#include "stapkit/graph.hpp"

#include <algorithm>

#include <boost/pending/disjoint_sets.hpp>

namespace stapkit {

std::vector<int> find_bridges(int n, std::span<const GraphEdge> edges,
                              const std::vector<bool>& active) {
  std::vector<std::vector<std::pair<VertexId, int>>> adj(n);
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    auto [u, v] = edges[i];
    if (!active[u] || !active[v] || u == v) continue;
    adj[u].push_back({v, i});
    adj[v].push_back({u, i});
  }
  std::vector<int> tin(n, -1), low(n, 0);
  std::vector<int> bridges;
  int timer = 0;
  struct Frame {
    VertexId v;
    int via;  // edge index used to enter v
    size_t next;
  };
  for (VertexId s = 0; s < n; ++s) {
    if (!active[s] || tin[s] >= 0) continue;
    std::vector<Frame> stack{{s, -1, 0}};
    tin[s] = low[s] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [w, id] = adj[f.v][f.next++];
        if (id == f.via) continue;
        if (tin[w] >= 0) {
          low[f.v] = std::min(low[f.v], tin[w]);
        } else {
          tin[w] = low[w] = timer++;
          stack.push_back({w, id, 0});
        }
        continue;
      }
      Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        VertexId p = stack.back().v;
        low[p] = std::min(low[p], low[done.v]);
        if (low[done.v] > tin[p]) bridges.push_back(done.via);
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

std::vector<int> components(int n, std::span<const GraphEdge> edges,
                            const std::vector<bool>& active) {
  std::vector<int> rank(n, 0), parent(n);
  boost::disjoint_sets<int*, int*> sets(rank.data(), parent.data());
  for (int v = 0; v < n; ++v) sets.make_set(v);
  for (auto [u, v] : edges) {
    if (active[u] && active[v]) sets.union_set(u, v);
  }
  std::vector<int> label(n, -1), by_rep(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (!active[v]) continue;
    int rep = sets.find_set(v);
    if (by_rep[rep] < 0) by_rep[rep] = next++;
    label[v] = by_rep[rep];
  }
  return label;
}

std::vector<GraphEdge> instance_edges(const StapInstance& inst) {
  std::vector<GraphEdge> out;
  for (const auto& e : inst.tree_edges) out.push_back({e.u, e.v});
  for (const auto& l : inst.links) out.push_back({l.u, l.v});
  return out;
}

}  // namespace stapkit
