#include "stapkit/nw_greedy.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

#include "stapkit/completion.hpp"
#include "stapkit/graph.hpp"

namespace stapkit {

EdgeSet cov(const RootedTree& rt, std::span<const VertexId> joined) {
  return rt.spanning_edges(joined);
}

NodePaths node_weighted_sssp(const StapInstance& inst, VertexId source,
                             std::span<const Rational> node_cost, bool through_terminals) {
  const int n = inst.num_vertices();
  std::vector<std::vector<VertexId>> adj(n);
  for (const auto& l : inst.links) {
    if (l.u == l.v) continue;
    adj[l.u].push_back(l.v);
    adj[l.v].push_back(l.u);
  }
  auto weight = [&](VertexId v) -> Rational {
    return inst.is_terminal(v) ? Rational(0) : node_cost[v];
  };
  NodePaths out;
  out.dist.assign(n, ExtendedCost::infinity());
  out.pred.assign(n, kNone);
  out.dist[source] = ExtendedCost(0);
  std::set<std::pair<Rational, VertexId>> frontier{{Rational(0), source}};
  std::vector<bool> done(n, false);
  while (!frontier.empty()) {
    auto [d, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (done[u]) continue;
    done[u] = true;
    if (u != source && !through_terminals && inst.is_terminal(u)) continue;
    for (VertexId w : adj[u]) {
      if (done[w]) continue;
      ExtendedCost via(d);
      if (via < out.dist[w]) {
        out.dist[w] = via;
        out.pred[w] = u;
        // Keyed by the cost through w, which is what its neighbours pay.
        frontier.insert({d + weight(w), w});
      }
    }
  }
  return out;
}

NodePaths node_weighted_sssp(const StapInstance& inst, VertexId source, bool through_terminals) {
  return node_weighted_sssp(inst, source, inst.node_cost, through_terminals);
}

std::vector<VertexId> trace_path(const NodePaths& paths, VertexId source, VertexId target) {
  if (!paths.dist[target].finite()) throw std::invalid_argument("target unreachable");
  std::vector<VertexId> out;
  for (VertexId v = target; v != kNone; v = paths.pred[v]) {
    out.push_back(v);
    if (v == source) break;
  }
  if (out.back() != source) throw std::logic_error("broken predecessor chain");
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<int> sviridenko_max(std::span<const Rational> costs, const SetFunction& f,
                                const Rational& budget) {
  const int n = static_cast<int>(costs.size());
  std::vector<int> best;
  Rational best_value = f(best);
  Rational best_cost = 0;

  auto extend = [&](std::vector<int> cur, Rational spent) {
    std::vector<bool> used(n, false);
    for (int i : cur) used[i] = true;
    Rational value = f(cur);
    while (true) {
      int pick = -1;
      Rational pick_gain, pick_density;
      bool pick_free = false;
      for (int j = 0; j < n; ++j) {
        if (used[j] || spent + costs[j] > budget) continue;
        cur.push_back(j);
        Rational gain = f(cur) - value;
        cur.pop_back();
        if (gain <= 0) continue;
        const bool free = costs[j] == 0;
        if (free) {
          if (!pick_free || gain > pick_gain) {
            pick = j;
            pick_gain = gain;
            pick_free = true;
          }
          continue;
        }
        if (pick_free) continue;
        Rational density = gain / costs[j];
        if (pick < 0 || density > pick_density) {
          pick = j;
          pick_gain = gain;
          pick_density = density;
        }
      }
      if (pick < 0) break;
      cur.push_back(pick);
      used[pick] = true;
      spent += costs[pick];
      value += pick_gain;
    }
    if (value > best_value || (value == best_value && spent < best_cost)) {
      std::sort(cur.begin(), cur.end());
      best = std::move(cur);
      best_value = value;
      best_cost = spent;
    }
  };

  extend({}, 0);
  for (int a = 0; a < n; ++a) {
    if (costs[a] > budget) continue;
    extend({a}, costs[a]);
    for (int b = a + 1; b < n; ++b) {
      if (costs[a] + costs[b] > budget) continue;
      extend({a, b}, costs[a] + costs[b]);
      for (int c = b + 1; c < n; ++c) {
        Rational total = costs[a] + costs[b] + costs[c];
        if (total > budget) continue;
        extend({a, b, c}, total);
      }
    }
  }
  return best;
}

EdgeSet uncovered_edges(const StapInstance& inst, const RootedTree& rt,
                        const std::vector<bool>& bought) {
  const int n = inst.num_vertices();
  std::vector<bool> active(n);
  for (VertexId v = 0; v < n; ++v) active[v] = inst.is_terminal(v) || bought[v];
  std::vector<GraphEdge> links;
  for (const auto& l : inst.links) links.push_back({l.u, l.v});
  auto label = components(n, links, active);
  std::vector<std::vector<VertexId>> joined(n);
  for (VertexId v = 0; v < n; ++v) {
    if (inst.is_terminal(v)) joined[label[v]].push_back(v);
  }
  EdgeSet covered = rt.empty_edge_set();
  for (const auto& group : joined) {
    if (group.size() >= 2) covered |= cov(rt, group);
  }
  return ~covered;
}

NwState initial_state(const StapInstance& inst, const RootedTree& rt) {
  NwState s;
  s.bought.assign(inst.num_vertices(), false);
  s.uncovered = uncovered_edges(inst, rt, s.bought);
  return s;
}

std::vector<Rational> current_prices(const StapInstance& inst, const NwState& state) {
  std::vector<Rational> price = inst.node_cost;
  for (VertexId v = 0; v < inst.num_vertices(); ++v) {
    if (state.bought[v]) price[v] = 0;
  }
  return price;
}

namespace {

// Total order used to pick among spiders.
bool better(const PseudoSpider& a, const PseudoSpider& b) {
  return std::tie(a.ratio, a.cost, a.head) < std::tie(b.ratio, b.cost, b.head);
}

}  // namespace

PseudoSpider best_pseudo_spider(const StapInstance& inst, const RootedTree& rt,
                                const NwState& state) {
  const auto terms = inst.terminals();
  const int r = static_cast<int>(terms.size());
  const auto price = current_prices(inst, state);

  // paths[i][j]: uncovered edges on the tree path between terminals i, j.
  std::vector<std::vector<EdgeSet>> paths(r, std::vector<EdgeSet>(r));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      EdgeSet e = rt.empty_edge_set();
      for (TreeEdgeId id : rt.path(terms[i], terms[j])) e.set(id);
      paths[i][j] = e & state.uncovered;
    }
  }

  std::optional<PseudoSpider> best;
  for (VertexId h : inst.steiner_nodes()) {
    const NodePaths sp = node_weighted_sssp(inst, h, price, false);
    std::vector<int> feet;  // indices into terms
    for (int i = 0; i < r; ++i) {
      if (sp.dist[terms[i]].finite()) feet.push_back(i);
    }
    if (feet.size() < 2) continue;

    Rational total = 0, base = 0;
    for (int i : feet) {
      const Rational& d = sp.dist[terms[i]].value();
      total += d;
      if (d > 0 && (base == 0 || d < base)) base = d;
    }
    std::vector<Rational> grid{0};
    if (base > 0) {
      for (Rational b = base; b < total; b *= 2) grid.push_back(b);
      grid.push_back(total);
    }

    for (int p : feet) {
      std::vector<int> items;
      std::vector<Rational> costs;
      Rational item_total = 0;
      for (int i : feet) {
        if (i == p) continue;
        items.push_back(i);
        costs.push_back(sp.dist[terms[i]].value());
        item_total += costs.back();
      }
      const Rational& anchor_leg = sp.dist[terms[p]].value();
      auto gain = [&](const std::vector<int>& chosen) {
        EdgeSet e = rt.empty_edge_set();
        for (int c : chosen) e |= paths[p][items[c]];
        return Rational(static_cast<long>(e.count()));
      };
      for (const Rational& b : grid) {
        Rational budget = b - anchor_leg;
        if (budget < 0) continue;
        std::vector<int> chosen = sviridenko_max(costs, gain, budget);
        const int covered = static_cast<int>(gain(chosen).get_num().get_si());
        if (covered > 0) {
          PseudoSpider s;
          s.head = h;
          s.anchor = terms[p];
          s.cost = price[h] + anchor_leg;
          s.feet.push_back(terms[p]);
          for (int c : chosen) {
            s.feet.push_back(terms[items[c]]);
            s.cost += costs[c];
          }
          std::sort(s.feet.begin(), s.feet.end());
          s.covered = covered;
          s.ratio = s.cost / covered;
          if (!best || better(s, *best)) {
            for (VertexId f : s.feet) s.legs.push_back(trace_path(sp, h, f));
            best = std::move(s);
          }
        }
        if (budget >= item_total) break;  // larger budgets change nothing
      }
    }
  }
  if (!best) throw InfeasibleError("no pseudo-spider covers an uncovered tree edge");
  return *best;
}

bool nw_feasible(const StapInstance& inst, const std::vector<bool>& bought) {
  const int n = inst.num_vertices();
  std::vector<bool> active(n);
  for (VertexId v = 0; v < n; ++v) active[v] = inst.is_terminal(v) || bought[v];
  const auto edges = instance_edges(inst);
  auto label = components(n, edges, active);
  for (VertexId v = 0; v < n; ++v) {
    if (active[v] && label[v] != 0) return false;
  }
  return find_bridges(n, edges, active).empty();
}

namespace {

// Drops purchased nodes that hang off the terminals: components without
// terminals, then terminal-free sides of bridges. Returns how many.
int trim(const StapInstance& inst, std::vector<bool>& bought) {
  const int n = inst.num_vertices();
  const auto edges = instance_edges(inst);
  int dropped = 0;
  while (true) {
    std::vector<bool> active(n);
    for (VertexId v = 0; v < n; ++v) active[v] = inst.is_terminal(v) || bought[v];
    auto label = components(n, edges, active);
    std::vector<bool> has_terminal(n, false);
    for (VertexId v = 0; v < n; ++v) {
      if (inst.is_terminal(v)) has_terminal[label[v]] = true;
    }
    bool changed = false;
    for (VertexId v = 0; v < n; ++v) {
      if (bought[v] && !has_terminal[label[v]]) {
        bought[v] = false;
        ++dropped;
        changed = true;
      }
    }
    if (changed) continue;

    for (int b : find_bridges(n, edges, active)) {
      auto side_of = [&](VertexId start) {
        std::vector<VertexId> seen{start};
        std::vector<bool> mark(n, false);
        mark[start] = true;
        bool terminal = false;
        for (size_t i = 0; i < seen.size(); ++i) {
          VertexId u = seen[i];
          terminal = terminal || inst.is_terminal(u);
          for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
            if (id == b) continue;
            auto [x, y] = edges[id];
            if (!active[x] || !active[y]) continue;
            VertexId w = x == u ? y : (y == u ? x : kNone);
            if (w != kNone && !mark[w]) {
              mark[w] = true;
              seen.push_back(w);
            }
          }
        }
        return std::make_pair(terminal, seen);
      };
      for (VertexId end : {edges[b].first, edges[b].second}) {
        auto [terminal, side] = side_of(end);
        if (terminal) continue;
        for (VertexId v : side) bought[v] = false;
        dropped += static_cast<int>(side.size());
        changed = true;
        break;
      }
      if (changed) break;
    }
    if (!changed) return dropped;
  }
}

}  // namespace

NwSolution greedy_nwstap(const StapInstance& inst, std::optional<VertexId> root) {
  require_valid(inst);
  if (inst.variant != Variant::kNodeWeighted) {
    throw std::invalid_argument("node-weighted greedy needs a node-weighted instance");
  }
  NwSolution sol;
  sol.subdivided = subdivide_links(inst);
  const StapInstance& g = sol.subdivided;
  sol.root = root.value_or(default_root(inst));
  const RootedTree rt = RootedTree::build(g, sol.root);

  {
    std::vector<bool> all(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v) all[v] = !g.is_terminal(v);
    EdgeSet left = uncovered_edges(g, rt, all);
    if (left.any()) {
      auto e = static_cast<TreeEdgeId>(left.find_first());
      throw InfeasibleError("tree edge " + g.names[rt.lower(e)] + "-" + g.names[rt.upper(e)] +
                            " stays a bridge even with every Steiner node");
    }
  }

  NwState state = initial_state(g, rt);
  while (state.uncovered.any()) {
    NwIteration it;
    it.spider = best_pseudo_spider(g, rt, state);
    const auto price = current_prices(g, state);
    it.paid = 0;
    auto buy = [&](VertexId v) {
      if (g.is_terminal(v) || state.bought[v]) return;
      it.paid += price[v];
      state.bought[v] = true;
    };
    buy(it.spider.head);
    for (const auto& leg : it.spider.legs) {
      for (VertexId v : leg) buy(v);
    }
    EdgeSet next = uncovered_edges(g, rt, state.bought);
    const auto before = state.uncovered.count();
    if (!next.is_subset_of(state.uncovered) || next.count() >= before) {
      throw std::logic_error("pseudo-spider step made no progress");
    }
    it.newly_covered = static_cast<int>(before - next.count());
    it.uncovered_after = static_cast<int>(next.count());
    state.uncovered = std::move(next);
    sol.log.push_back(std::move(it));
  }

  sol.bought = state.bought;
  sol.trimmed = trim(g, sol.bought);
  if (!nw_feasible(g, sol.bought)) throw std::logic_error("node-weighted solution not 2-edge-connected");

  sol.cost = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!sol.bought[v]) continue;
    sol.cost += g.node_cost[v];
    if (g.subdivision_of[v] != kNone) {
      sol.links.push_back(g.subdivision_of[v]);
    } else {
      sol.steiner.push_back(v);
    }
  }
  std::sort(sol.links.begin(), sol.links.end());
  return sol;
}

}  // namespace stapkit
