#include "stapkit/completion.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

namespace stapkit {

ShortestPaths link_dijkstra(const StapInstance& inst, VertexId source) {
  const int n = inst.num_vertices();
  std::vector<std::vector<LinkId>> adj(n);
  for (LinkId id = 0; id < inst.num_links(); ++id) {
    adj[inst.links[id].u].push_back(id);
    adj[inst.links[id].v].push_back(id);
  }
  ShortestPaths sp;
  sp.dist.assign(n, ExtendedCost::infinity());
  sp.via.assign(n, kNone);
  std::vector<bool> done(n, false);
  // (distance, vertex) ordered set doubles as a decrease-key heap.
  std::set<std::pair<Rational, VertexId>> frontier;
  sp.dist[source] = ExtendedCost(0);
  frontier.insert({0, source});
  while (!frontier.empty()) {
    auto [d, v] = *frontier.begin();
    frontier.erase(frontier.begin());
    done[v] = true;
    for (LinkId id : adj[v]) {
      const auto& l = inst.links[id];
      VertexId w = l.u == v ? l.v : l.u;
      if (done[w]) continue;
      Rational nd = d + l.cost;
      if (!sp.dist[w].finite() || nd < sp.dist[w].value()) {
        if (sp.dist[w].finite()) frontier.erase({sp.dist[w].value(), w});
        sp.dist[w] = ExtendedCost(nd);
        sp.via[w] = id;
        frontier.insert({nd, w});
      }
    }
  }
  return sp;
}

std::vector<std::vector<ExtendedCost>> cheapest_link_matrix(const StapInstance& inst) {
  const int n = inst.num_vertices();
  std::vector<std::vector<ExtendedCost>> best(
      n, std::vector<ExtendedCost>(n, ExtendedCost::infinity()));
  for (const auto& l : inst.links) {
    ExtendedCost c(l.cost);
    if (c < best[l.u][l.v]) best[l.u][l.v] = best[l.v][l.u] = c;
  }
  return best;
}

namespace {

// Returns the number of links appended.
int add_metric_links(StapInstance& inst) {
  const auto terminals = inst.terminals();
  auto best = cheapest_link_matrix(inst);
  std::vector<Link> added;
  for (size_t i = 0; i < terminals.size(); ++i) {
    VertexId s = terminals[i];
    auto sp = link_dijkstra(inst, s);
    for (size_t j = i + 1; j < terminals.size(); ++j) {
      VertexId t = terminals[j];
      if (!sp.dist[t].finite() || !(sp.dist[t] < best[s][t])) continue;
      Link l;
      l.u = s;
      l.v = t;
      l.cost = sp.dist[t].value();
      l.origin = LinkOrigin::kPath;
      std::vector<VertexId> rev{t};
      for (VertexId w = t; w != s;) {
        const auto& step = inst.links[sp.via[w]];
        l.expansion.insert(l.expansion.end(), step.expansion.begin(),
                           step.expansion.end());
        w = step.u == w ? step.v : step.u;
        rev.push_back(w);
      }
      l.path.assign(rev.rbegin(), rev.rend());
      std::sort(l.expansion.begin(), l.expansion.end());
      added.push_back(std::move(l));
    }
  }
  for (auto& l : added) inst.links.push_back(std::move(l));
  return static_cast<int>(added.size());
}

int add_shadow_links(StapInstance& inst, const RootedTree& rt) {
  auto best = cheapest_link_matrix(inst);
  const int existing = inst.num_links();
  int added = 0;
  for (LinkId id = 0; id < existing; ++id) {
    const VertexId u = inst.links[id].u, v = inst.links[id].v;
    if (!inst.is_terminal(u) || !inst.is_terminal(v)) continue;
    const auto on_path = rt.path_vertices(u, v);
    for (size_t i = 0; i < on_path.size(); ++i) {
      for (size_t j = i + 1; j < on_path.size(); ++j) {
        VertexId a = on_path[i], b = on_path[j];
        ExtendedCost c(inst.links[id].cost);
        if (!(c < best[a][b])) continue;
        Link s;
        s.u = std::min(a, b);
        s.v = std::max(a, b);
        s.cost = inst.links[id].cost;
        s.origin = LinkOrigin::kShadow;
        s.parent = id;
        s.expansion = inst.links[id].expansion;
        best[a][b] = best[b][a] = c;
        inst.links.push_back(std::move(s));
        ++added;
      }
    }
  }
  return added;
}

}  // namespace

StapInstance metric_completion(const StapInstance& inst) {
  if (inst.variant != Variant::kEdgeWeighted) {
    throw std::invalid_argument("metric completion needs an edge-weighted instance");
  }
  StapInstance out = inst;
  add_metric_links(out);
  return out;
}

StapInstance shadow_completion(const StapInstance& inst, const RootedTree& rt) {
  if (inst.variant != Variant::kEdgeWeighted) {
    throw std::invalid_argument("shadow completion needs an edge-weighted instance");
  }
  StapInstance out = inst;
  while (true) {
    int added = add_shadow_links(out, rt);
    added += add_metric_links(out);
    if (added == 0) break;
  }
  return out;
}

StapInstance complete(const StapInstance& inst, const RootedTree& rt) {
  return shadow_completion(metric_completion(inst), rt);
}

StapInstance subdivide_links(const StapInstance& inst) {
  if (inst.variant != Variant::kNodeWeighted) {
    throw std::invalid_argument("subdivision needs a node-weighted instance");
  }
  StapInstance out;
  out.variant = inst.variant;
  out.names = inst.names;
  out.terminal = inst.terminal;
  out.node_cost = inst.node_cost;
  out.subdivision_of = inst.subdivision_of;
  out.tree_edges = inst.tree_edges;

  std::set<std::string> taken(inst.names.begin(), inst.names.end());
  for (LinkId id = 0; id < inst.num_links(); ++id) {
    const auto& l = inst.links[id];
    if (l.cost == 0) {
      Link copy = l;
      out.links.push_back(std::move(copy));
      continue;
    }
    std::string name = "~" + inst.names[l.u] + "~" + inst.names[l.v];
    while (taken.count(name)) name += "'";
    taken.insert(name);
    VertexId m = out.add_vertex(name, false, l.cost);
    out.subdivision_of[m] = id;
    for (VertexId end : {l.u, l.v}) {
      Link half;
      half.u = end;
      half.v = m;
      half.cost = 0;
      half.origin = LinkOrigin::kSubdivided;
      half.expansion = l.expansion;
      half.parent = id;
      out.links.push_back(std::move(half));
    }
  }
  return out;
}

std::vector<LinkId> expand_links(const StapInstance& derived,
                                 const std::vector<LinkId>& ids) {
  std::vector<LinkId> out;
  for (LinkId id : ids) {
    const auto& e = derived.links.at(id).expansion;
    out.insert(out.end(), e.begin(), e.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace stapkit
