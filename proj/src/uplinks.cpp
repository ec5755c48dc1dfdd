#include "stapkit/uplinks.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace stapkit {

std::vector<UpLink> enumerate_uplinks(const StapInstance& completed, const RootedTree& rt) {
  std::map<std::pair<VertexId, VertexId>, LinkId> best;
  for (LinkId id = 0; id < completed.num_links(); ++id) {
    const auto& l = completed.links[id];
    if (!rt.contains(l.u) || !rt.contains(l.v) || l.u == l.v) continue;
    VertexId bottom, top;
    if (rt.is_ancestor(l.u, l.v)) {
      top = l.u;
      bottom = l.v;
    } else if (rt.is_ancestor(l.v, l.u)) {
      top = l.v;
      bottom = l.u;
    } else {
      continue;
    }
    auto [it, inserted] = best.try_emplace({bottom, top}, id);
    if (!inserted && l.cost < completed.links[it->second].cost) it->second = id;
  }
  std::vector<UpLink> out;
  out.reserve(best.size());
  for (const auto& [key, id] : best) {
    UpLink u;
    u.bottom = key.first;
    u.top = key.second;
    u.cost = completed.links[id].cost;
    u.link = id;
    u.path = rt.empty_edge_set();
    for (TreeEdgeId e : rt.path(u.bottom, u.top)) u.path.set(e);
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<int> coverage_multiplicity(std::span<const UpLink> uplinks, const RootedTree& rt) {
  std::vector<int> mult(rt.num_edges(), 0);
  for (const auto& u : uplinks) {
    for (auto e = u.path.find_first(); e != EdgeSet::npos; e = u.path.find_next(e)) ++mult[e];
  }
  return mult;
}

UpLinkSolution optimal_uplink_solution(std::span<const UpLink> uplinks, const RootedTree& rt) {
  {
    auto mult = coverage_multiplicity(uplinks, rt);
    for (TreeEdgeId e = 0; e < rt.num_edges(); ++e) {
      if (mult[e] == 0) {
        throw InfeasibleError("tree edge " + std::to_string(e) + " (" +
                              std::to_string(rt.lower(e)) + "-" +
                              std::to_string(rt.upper(e)) +
                              ") is not covered by any up-link");
      }
    }
  }
  const int n = rt.num_vertices();

  // reach[v][d]: cheapest up-link from v whose top is at least d levels
  // above v, with its index.
  std::vector<std::vector<std::pair<ExtendedCost, int>>> reach(n);
  {
    std::vector<std::vector<int>> by_bottom(n);
    for (int i = 0; i < static_cast<int>(uplinks.size()); ++i) by_bottom[uplinks[i].bottom].push_back(i);
    for (VertexId v : rt.preorder()) {
      const int dv = rt.depth(v);
      std::vector<std::pair<ExtendedCost, int>> exact(dv + 1, {ExtendedCost::infinity(), -1});
      for (int i : by_bottom[v]) {
        int d = dv - rt.depth(uplinks[i].top);
        if (ExtendedCost(uplinks[i].cost) < exact[d].first) exact[d] = {ExtendedCost(uplinks[i].cost), i};
      }
      reach[v].assign(dv + 1, {ExtendedCost::infinity(), -1});
      for (int d = dv; d >= 1; --d) {
        reach[v][d] = exact[d];
        if (d < dv && reach[v][d + 1].first < reach[v][d].first) reach[v][d] = reach[v][d + 1];
      }
    }
  }

  // f[v][d]: cheapest cover of the subtree below v plus the d edges above v.
  // choice: -1 nothing extra, -2 - i for up-link i at v, child vertex c
  // when the path is delegated to c.
  std::vector<std::vector<ExtendedCost>> f(n);
  std::vector<std::vector<int>> choice(n);
  const auto& order = rt.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId v = *it;
    const int dv = rt.depth(v);
    ExtendedCost base(0);
    for (VertexId c : rt.children(v)) base = base + f[c][1];
    f[v].assign(dv + 1, ExtendedCost::infinity());
    choice[v].assign(dv + 1, -1);
    f[v][0] = base;
    for (int d = 1; d <= dv; ++d) {
      ExtendedCost best = reach[v][d].first + base;
      int pick = reach[v][d].second >= 0 ? -2 - reach[v][d].second : -1;
      for (VertexId c : rt.children(v)) {
        // An infinite base means some subtree is uncoverable regardless.
        if (!base.finite()) break;
        ExtendedCost cand = f[c][d + 1] + ExtendedCost(base.value() - f[c][1].value());
        if (cand < best) {
          best = cand;
          pick = c;
        }
      }
      f[v][d] = best;
      choice[v][d] = pick;
    }
  }
  if (!f[rt.root()][0].finite()) throw InfeasibleError("up-links do not cover the tree");

  UpLinkSolution sol;
  std::vector<std::pair<VertexId, int>> stack{{rt.root(), 0}};
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    int pick = d == 0 ? -1 : choice[v][d];
    for (VertexId c : rt.children(v)) {
      stack.push_back({c, pick == c ? d + 1 : 1});
    }
    if (pick <= -2) sol.uplinks.push_back(uplinks[-2 - pick]);
  }
  std::sort(sol.uplinks.begin(), sol.uplinks.end(), [](const UpLink& a, const UpLink& b) {
    return std::tie(a.bottom, a.top) < std::tie(b.bottom, b.top);
  });
  sol.total_cost = 0;
  for (const auto& u : sol.uplinks) sol.total_cost += u.cost;
  if (sol.total_cost != f[rt.root()][0].value()) {
    throw std::logic_error("up-link DP reconstruction mismatch");
  }
  return sol;
}

UpLinkSolution shorten_exact_cover(const UpLinkSolution& solution,
                                   std::span<const UpLink> available,
                                   const RootedTree& rt) {
  std::map<std::pair<VertexId, VertexId>, const UpLink*> table;
  for (const auto& u : available) {
    auto [it, inserted] = table.try_emplace({u.bottom, u.top}, &u);
    if (!inserted && u.cost < it->second->cost) it->second = &u;
  }

  std::vector<UpLink> current = solution.uplinks;
  std::vector<bool> alive(current.size(), true);
  for (VertexId w : rt.preorder()) {
    if (w == rt.root()) continue;
    const TreeEdgeId e = rt.parent_edge(w);
    std::vector<int> covering;
    for (int i = 0; i < static_cast<int>(current.size()); ++i) {
      if (alive[i] && current[i].path.test(e)) covering.push_back(i);
    }
    if (covering.size() <= 1) continue;

    // Edges above e are already covered once, so at most one covering
    // up-link continues past parent(w); it must be kept. Otherwise keep
    // the one whose truncation would save the least.
    auto truncated = [&](int i) -> const UpLink* {
      if (current[i].bottom == w) return nullptr;
      auto it = table.find({current[i].bottom, w});
      if (it == table.end()) throw std::invalid_argument("up-link set is not shadow-complete");
      return it->second;
    };
    int keep = -1;
    for (int i : covering) {
      if (current[i].top != rt.parent(w)) keep = i;
    }
    if (keep < 0) {
      Rational least_saving;
      for (int i : covering) {
        const UpLink* t = truncated(i);
        Rational saving = current[i].cost - (t ? t->cost : Rational(0));
        if (keep < 0 || saving < least_saving) {
          keep = i;
          least_saving = saving;
        }
      }
    }
    for (int i : covering) {
      if (i == keep) continue;
      const UpLink* t = truncated(i);
      if (!t) {
        alive[i] = false;
      } else {
        if (t->cost > current[i].cost) throw std::invalid_argument("shadow costs more than its link");
        current[i] = *t;
      }
    }
  }

  UpLinkSolution out;
  out.total_cost = 0;
  for (size_t i = 0; i < current.size(); ++i) {
    if (!alive[i]) continue;
    out.total_cost += current[i].cost;
    out.uplinks.push_back(std::move(current[i]));
  }
  std::sort(out.uplinks.begin(), out.uplinks.end(), [](const UpLink& a, const UpLink& b) {
    return std::tie(a.bottom, a.top) < std::tie(b.bottom, b.top);
  });
  return out;
}

}  // namespace stapkit
