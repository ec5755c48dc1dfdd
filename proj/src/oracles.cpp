#include "stapkit/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <numeric>
#include <tuple>

#include "stapkit/completion.hpp"
#include "stapkit/graph.hpp"

namespace stapkit {

namespace {

class Deadline {
 public:
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(seconds))) {}

  void check() {
    if (++ticks_ % 1024 != 0) return;
    if (std::chrono::steady_clock::now() > end_) {
      throw ResourceError("oracle time cap exceeded");
    }
  }

 private:
  std::chrono::steady_clock::time_point end_;
  long ticks_ = 0;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ResourceError("oracle budget exceeded: " + what);
}

bool connected_without(const StapInstance& inst, std::span<const LinkId> links,
                       TreeEdgeId skip) {
  const int n = inst.num_vertices();
  std::vector<std::vector<VertexId>> adj(n);
  for (TreeEdgeId e = 0; e < inst.num_tree_edges(); ++e) {
    if (e == skip) continue;
    adj[inst.tree_edges[e].u].push_back(inst.tree_edges[e].v);
    adj[inst.tree_edges[e].v].push_back(inst.tree_edges[e].u);
  }
  for (LinkId id : links) {
    adj[inst.links[id].u].push_back(inst.links[id].v);
    adj[inst.links[id].v].push_back(inst.links[id].u);
  }
  const VertexId from = inst.tree_edges[skip].u, to = inst.tree_edges[skip].v;
  std::vector<bool> seen(n, false);
  std::deque<VertexId> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    VertexId u = queue.front();
    queue.pop_front();
    if (u == to) return true;
    for (VertexId w : adj[u]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return false;
}

// Tree edges covered by the link components of the chosen links.
EdgeSet covered_by(const StapInstance& inst, const RootedTree& rt,
                   const std::vector<GraphEdge>& chosen) {
  const int n = inst.num_vertices();
  std::vector<bool> active(n, true);
  auto label = components(n, chosen, active);
  std::vector<std::vector<VertexId>> groups(n);
  for (VertexId v = 0; v < n; ++v) {
    if (inst.is_terminal(v)) groups[label[v]].push_back(v);
  }
  EdgeSet out = rt.empty_edge_set();
  for (const auto& g : groups) {
    if (g.size() >= 2) out |= rt.spanning_edges(g);
  }
  return out;
}

}  // namespace

bool check_feasible_stap(const StapInstance& inst, std::span<const LinkId> links) {
  for (TreeEdgeId e = 0; e < inst.num_tree_edges(); ++e) {
    if (!connected_without(inst, links, e)) return false;
  }
  return true;
}

bool bridge_feasible_stap(const StapInstance& inst, std::span<const LinkId> links) {
  const int n = inst.num_vertices();
  std::vector<bool> active(n, false);
  std::vector<GraphEdge> edges;
  for (const auto& e : inst.tree_edges) {
    edges.push_back({e.u, e.v});
    active[e.u] = active[e.v] = true;
  }
  for (LinkId id : links) {
    edges.push_back({inst.links[id].u, inst.links[id].v});
    active[inst.links[id].u] = active[inst.links[id].v] = true;
  }
  for (int b : find_bridges(n, edges, active)) {
    if (b < inst.num_tree_edges()) return false;
  }
  return true;
}

ExactResult exact_stap(const StapInstance& inst, const OracleBudget& budget) {
  require_valid(inst);
  require(inst.num_vertices() <= budget.max_vertices, "too many vertices");
  require(inst.num_links() <= budget.max_links, "too many links");
  Deadline deadline(budget.time_cap_seconds);
  const RootedTree rt = RootedTree::build(inst, default_root(inst));
  const int m = inst.num_links();

  std::vector<LinkId> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](LinkId a, LinkId b) {
    return inst.links[a].cost < inst.links[b].cost;
  });

  ExactResult best;
  std::vector<GraphEdge> chosen;
  std::vector<LinkId> chosen_ids;
  auto feasible_with = [&](size_t from) {
    std::vector<GraphEdge> all = chosen;
    for (size_t i = from; i < order.size(); ++i) {
      all.push_back({inst.links[order[i]].u, inst.links[order[i]].v});
    }
    return covered_by(inst, rt, all).all();
  };

  std::function<void(size_t, Rational, bool)> search = [&](size_t idx, Rational cost,
                                                            bool after_skip) {
    deadline.check();
    if (best.feasible && cost >= best.cost) return;
    if (covered_by(inst, rt, chosen).all()) {
      best.feasible = true;
      best.cost = cost;
      best.chosen = chosen_ids;
      return;
    }
    if (idx == order.size()) return;
    if (after_skip && !feasible_with(idx)) return;
    const Link& l = inst.links[order[idx]];
    chosen.push_back({l.u, l.v});
    chosen_ids.push_back(order[idx]);
    search(idx + 1, cost + l.cost, false);
    chosen.pop_back();
    chosen_ids.pop_back();
    search(idx + 1, cost, true);
  };
  search(0, 0, true);
  std::sort(best.chosen.begin(), best.chosen.end());
  return best;
}

ExactResult exact_nwstap(const StapInstance& inst, const OracleBudget& budget) {
  require_valid(inst);
  if (inst.variant != Variant::kNodeWeighted) {
    throw std::invalid_argument("exact_nwstap needs a node-weighted instance");
  }
  const StapInstance g = subdivide_links(inst);
  const auto steiner = g.steiner_nodes();
  require(static_cast<int>(steiner.size()) <= budget.max_steiner, "too many Steiner nodes");
  Deadline deadline(budget.time_cap_seconds);
  const int n = g.num_vertices();
  const auto edges = instance_edges(g);

  ExactResult best;
  const std::uint64_t total = std::uint64_t{1} << steiner.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    deadline.check();
    Rational cost = 0;
    std::vector<bool> active(n, false);
    for (VertexId v = 0; v < n; ++v) active[v] = g.is_terminal(v);
    for (size_t i = 0; i < steiner.size(); ++i) {
      if (mask >> i & 1) {
        cost += g.node_cost[steiner[i]];
        active[steiner[i]] = true;
      }
    }
    if (best.feasible && cost >= best.cost) continue;
    auto label = components(n, edges, active);
    bool connected = true;
    for (VertexId v = 0; v < n; ++v) connected = connected && (!active[v] || label[v] == 0);
    if (!connected || !find_bridges(n, edges, active).empty()) continue;
    best.feasible = true;
    best.cost = cost;
    best.chosen.clear();
    for (size_t i = 0; i < steiner.size(); ++i) {
      if (mask >> i & 1) best.chosen.push_back(steiner[i]);
    }
  }
  return best;
}

ExactResult exact_hypertap(const HyperTapInstance& inst, const OracleBudget& budget) {
  require(static_cast<int>(inst.links.size()) <= budget.max_hyperlinks, "too many hyper-links");
  Deadline deadline(budget.time_cap_seconds);
  const RootedTree& rt = inst.tree;
  std::vector<EdgeSet> covers;
  for (const auto& h : inst.links) covers.push_back(coverage(rt, h));
  std::vector<int> order(inst.links.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.links[a].cost < inst.links[b].cost;
  });

  ExactResult best;
  std::vector<int> chosen;
  std::function<void(const EdgeSet&, Rational)> search = [&](const EdgeSet& covered,
                                                             Rational cost) {
    deadline.check();
    if (best.feasible && cost >= best.cost) return;
    if (covered.all()) {
      best.feasible = true;
      best.cost = cost;
      best.chosen = chosen;
      return;
    }
    // Some chosen link must cover the first uncovered edge.
    EdgeSet missing = ~covered;
    const auto e = missing.find_first();
    for (int i : order) {
      if (!covers[i].test(e)) continue;
      chosen.push_back(inst.links[i].id);
      search(covered | covers[i], cost + inst.links[i].cost);
      chosen.pop_back();
    }
  };
  search(rt.empty_edge_set(), 0);
  std::sort(best.chosen.begin(), best.chosen.end());
  return best;
}

KThinResult exact_kthin_maximizer(const Rational& rho, const HyperTapInstance& inst,
                                  std::span<const UpLink> uplinks, int k,
                                  const OracleBudget& budget) {
  const int m = static_cast<int>(inst.links.size());
  require(m <= budget.max_kthin_links, "too many hyper-links");
  Deadline deadline(budget.time_cap_seconds);
  const RootedTree& rt = inst.tree;

  // Coverage as the union of pairwise tree paths, vertex loads from it.
  std::vector<EdgeSet> covers;
  std::vector<std::vector<bool>> touches;
  for (const auto& h : inst.links) {
    EdgeSet c = rt.empty_edge_set();
    for (VertexId a : h.terminals) {
      for (VertexId b : h.terminals) {
        for (TreeEdgeId e : rt.path(a, b)) c.set(e);
      }
    }
    std::vector<bool> t(rt.num_vertices(), false);
    for (auto e = c.find_first(); e != EdgeSet::npos; e = c.find_next(e)) {
      t[rt.lower(e)] = true;
      t[rt.upper(e)] = true;
    }
    covers.push_back(std::move(c));
    touches.push_back(std::move(t));
  }

  KThinResult best;
  best.slack = 0;
  Rational best_cost = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    deadline.check();
    std::vector<int> load(rt.num_vertices(), 0);
    bool thin = true;
    EdgeSet covered = rt.empty_edge_set();
    Rational cost = 0;
    for (int i = 0; i < m && thin; ++i) {
      if (!(mask >> i & 1)) continue;
      covered |= covers[i];
      cost += inst.links[i].cost;
      for (VertexId v = 0; v < rt.num_vertices(); ++v) {
        if (touches[i][v] && ++load[v] > k) thin = false;
      }
    }
    if (!thin) continue;
    Rational dropped = 0;
    for (const auto& u : uplinks) {
      if (u.path.is_subset_of(covered)) dropped += u.cost;
    }
    Rational s = rho * dropped - cost;
    if (s > best.slack || (s == best.slack && cost < best_cost)) {
      best.slack = s;
      best_cost = cost;
      best.chosen.clear();
      for (int i = 0; i < m; ++i) {
        if (mask >> i & 1) best.chosen.push_back(inst.links[i].id);
      }
    }
  }
  std::sort(best.chosen.begin(), best.chosen.end());
  return best;
}

std::optional<PseudoSpider> exact_min_ratio_pseudo_spider(const StapInstance& inst,
                                                          const RootedTree& rt,
                                                          const NwState& state,
                                                          const OracleBudget& budget) {
  const auto terms = inst.terminals();
  require(static_cast<int>(terms.size()) <= budget.max_spider_feet, "too many terminals");
  Deadline deadline(budget.time_cap_seconds);
  const auto price = current_prices(inst, state);

  std::optional<PseudoSpider> best;
  for (VertexId h : inst.steiner_nodes()) {
    const NodePaths sp = node_weighted_sssp(inst, h, price, false);
    std::vector<VertexId> reachable;
    for (VertexId t : terms) {
      if (sp.dist[t].finite()) reachable.push_back(t);
    }
    const int f = static_cast<int>(reachable.size());
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << f); ++mask) {
      deadline.check();
      std::vector<VertexId> feet;
      Rational cost = price[h];
      for (int i = 0; i < f; ++i) {
        if (mask >> i & 1) {
          feet.push_back(reachable[i]);
          cost += sp.dist[reachable[i]].value();
        }
      }
      const int covered = static_cast<int>((rt.spanning_edges(feet) & state.uncovered).count());
      if (covered == 0) continue;
      Rational ratio = cost / covered;
      if (best && std::tie(ratio, cost, h) >= std::tie(best->ratio, best->cost, best->head)) continue;
      PseudoSpider s;
      s.head = h;
      s.anchor = feet.front();
      s.feet = feet;
      s.cost = cost;
      s.covered = covered;
      s.ratio = ratio;
      for (VertexId t : feet) s.legs.push_back(trace_path(sp, h, t));
      best = std::move(s);
    }
  }
  return best;
}

}  // namespace stapkit
