#include "stapkit/hyperlinks.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stapkit {

VertexId apex(const RootedTree& rt, const HyperLink& link) {
  if (link.terminals.empty()) throw std::invalid_argument("hyper-link joins no terminals");
  return rt.lca(link.terminals);
}

EdgeSet coverage(const RootedTree& rt, const HyperLink& link) {
  apex(rt, link);
  return rt.spanning_edges(link.terminals);
}

namespace {

template <typename Get>
bool k_thin_impl(const RootedTree& rt, size_t count, Get get, int k) {
  std::vector<int> load(rt.num_vertices(), 0);
  for (size_t i = 0; i < count; ++i) {
    for (VertexId v : rt.touched_vertices(coverage(rt, get(i)))) {
      if (++load[v] > k) return false;
    }
  }
  return true;
}

}  // namespace

bool is_k_thin(const RootedTree& rt, std::span<const HyperLink> links, int k) {
  return k_thin_impl(rt, links.size(), [&](size_t i) -> const HyperLink& { return links[i]; }, k);
}

bool is_k_thin(const RootedTree& rt, std::span<const HyperLink* const> links, int k) {
  return k_thin_impl(rt, links.size(), [&](size_t i) -> const HyperLink& { return *links[i]; }, k);
}

SteinerTree dreyfus_wagner(const SteinerGraph& graph, std::span<const VertexId> terminals) {
  const int n = graph.num_vertices;
  auto excluded = [&](VertexId v) {
    return !graph.excluded.empty() && graph.excluded[v];
  };
  for (VertexId t : terminals) {
    if (t < 0 || t >= n || excluded(t)) {
      throw std::invalid_argument("terminal missing from the graph");
    }
  }
  std::vector<VertexId> terms(terminals.begin(), terminals.end());
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  const int p = static_cast<int>(terms.size());
  if (p <= 1) return {ExtendedCost(0), {}};
  if (p > 20) throw std::invalid_argument("too many terminals for Dreyfus-Wagner");

  // All-pairs shortest paths with the entering edge per source (dense
  // Dijkstra; graphs here are small).
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge index)
  for (int i = 0; i < static_cast<int>(graph.edges.size()); ++i) {
    const auto& e = graph.edges[i];
    if (excluded(e.u) || excluded(e.v) || e.u == e.v) continue;
    adj[e.u].push_back({e.v, i});
    adj[e.v].push_back({e.u, i});
  }
  std::vector<std::vector<ExtendedCost>> dist(n);
  std::vector<std::vector<int>> pred(n);
  for (VertexId s = 0; s < n; ++s) {
    dist[s].assign(n, ExtendedCost::infinity());
    pred[s].assign(n, -1);
    if (excluded(s)) continue;
    std::vector<bool> done(n, false);
    dist[s][s] = ExtendedCost(0);
    while (true) {
      int v = -1;
      for (int w = 0; w < n; ++w) {
        if (!done[w] && dist[s][w].finite() && (v < 0 || dist[s][w] < dist[s][v])) v = w;
      }
      if (v < 0) break;
      done[v] = true;
      for (auto [w, ei] : adj[v]) {
        if (done[w]) continue;
        ExtendedCost nd(dist[s][v].value() + graph.edges[ei].cost);
        if (nd < dist[s][w]) {
          dist[s][w] = nd;
          pred[s][w] = ei;
        }
      }
    }
  }

  const int full = (1 << p) - 1;
  std::vector<std::vector<ExtendedCost>> dp(full + 1, std::vector<ExtendedCost>(n));
  std::vector<std::vector<ExtendedCost>> merged(full + 1, std::vector<ExtendedCost>(n));
  std::vector<std::vector<int>> split(full + 1, std::vector<int>(n, 0));
  std::vector<std::vector<VertexId>> via(full + 1, std::vector<VertexId>(n, kNone));
  for (int i = 0; i < p; ++i) {
    for (VertexId v = 0; v < n; ++v) {
      dp[1 << i][v] = dist[terms[i]][v];
      via[1 << i][v] = terms[i];
    }
  }
  for (int mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;
    const int low = mask & -mask;
    for (VertexId v = 0; v < n; ++v) {
      ExtendedCost best = ExtendedCost::infinity();
      int best_sub = 0;
      for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        ExtendedCost cand = dp[sub][v] + dp[mask ^ sub][v];
        if (cand < best) {
          best = cand;
          best_sub = sub;
        }
      }
      merged[mask][v] = best;
      split[mask][v] = best_sub;
    }
    for (VertexId v = 0; v < n; ++v) {
      ExtendedCost best = ExtendedCost::infinity();
      VertexId arg = kNone;
      for (VertexId u = 0; u < n; ++u) {
        ExtendedCost cand = merged[mask][u] + dist[u][v];
        if (cand < best) {
          best = cand;
          arg = u;
        }
      }
      dp[mask][v] = best;
      via[mask][v] = arg;
    }
  }

  SteinerTree result;
  result.cost = dp[full][terms[0]];
  if (!result.cost.finite()) return result;

  // Collect the edges of every path used by the optimal decomposition.
  std::vector<bool> used(graph.edges.size(), false);
  auto add_path = [&](VertexId from, VertexId to) {
    for (VertexId w = to; w != from;) {
      int ei = pred[from][w];
      used[ei] = true;
      w = graph.edges[ei].u == w ? graph.edges[ei].v : graph.edges[ei].u;
    }
  };
  std::vector<std::pair<int, VertexId>> stack{{full, terms[0]}};
  while (!stack.empty()) {
    auto [mask, v] = stack.back();
    stack.pop_back();
    VertexId u = via[mask][v];
    add_path(u, v);
    if ((mask & (mask - 1)) == 0) continue;
    int sub = split[mask][u];
    stack.push_back({sub, u});
    stack.push_back({mask ^ sub, u});
  }

  // The union of paths is connected; reduce it to a tree (Kruskal) and
  // strip non-terminal leaves. Cost cannot rise above the optimum.
  std::vector<int> chosen;
  for (int i = 0; i < static_cast<int>(used.size()); ++i) {
    if (used[i]) chosen.push_back(i);
  }
  std::stable_sort(chosen.begin(), chosen.end(), [&](int a, int b) {
    return graph.edges[a].cost < graph.edges[b].cost;
  });
  std::vector<int> dsu(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  std::vector<int> tree;
  for (int ei : chosen) {
    int a = find(graph.edges[ei].u), b = find(graph.edges[ei].v);
    if (a == b) continue;
    dsu[a] = b;
    tree.push_back(ei);
  }
  std::vector<bool> is_term(n, false);
  for (VertexId t : terms) is_term[t] = true;
  bool pruned = true;
  while (pruned) {
    pruned = false;
    std::vector<int> degree(n, 0);
    for (int ei : tree) {
      ++degree[graph.edges[ei].u];
      ++degree[graph.edges[ei].v];
    }
    std::vector<int> keep;
    for (int ei : tree) {
      const auto& e = graph.edges[ei];
      if ((degree[e.u] == 1 && !is_term[e.u]) || (degree[e.v] == 1 && !is_term[e.v])) {
        pruned = true;
      } else {
        keep.push_back(ei);
      }
    }
    tree.swap(keep);
  }
  Rational total = 0;
  for (int ei : tree) {
    total += graph.edges[ei].cost;
    result.edge_ids.push_back(graph.edges[ei].id);
  }
  if (total != result.cost.value()) {
    throw std::logic_error("Dreyfus-Wagner reconstruction lost optimality");
  }
  std::sort(result.edge_ids.begin(), result.edge_ids.end());
  return result;
}

std::int64_t count_subsets(int r, int gamma) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t total = 0;
  // C(r, i) built incrementally with saturation.
  __int128 c = 1;
  for (int i = 1; i <= std::min(gamma, r); ++i) {
    c = c * (r - i + 1) / i;
    if (c > kMax) return kMax;
    if (i >= 2) {
      if (total > kMax - static_cast<std::int64_t>(c)) return kMax;
      total += static_cast<std::int64_t>(c);
    }
  }
  return total;
}

HyperTapInstance build_gamma_restricted(const StapInstance& completed,
                                        const RootedTree& rt, int gamma,
                                        std::int64_t max_subsets) {
  if (completed.variant != Variant::kEdgeWeighted) {
    throw std::invalid_argument("hyper-links need an edge-weighted instance");
  }
  if (gamma < 2) throw std::invalid_argument("gamma must be at least 2");
  const auto terminals = completed.terminals();
  const int r = static_cast<int>(terminals.size());
  if (count_subsets(r, gamma) > max_subsets) {
    throw ResourceError("gamma = " + std::to_string(gamma) + " needs " +
                        std::to_string(count_subsets(r, gamma)) +
                        " terminal subsets (limit " + std::to_string(max_subsets) +
                        "); use a smaller gamma");
  }

  SteinerGraph graph;
  graph.num_vertices = completed.num_vertices();
  for (LinkId id = 0; id < completed.num_links(); ++id) {
    const auto& l = completed.links[id];
    graph.edges.push_back({l.u, l.v, l.cost, id});
  }

  HyperTapInstance out{rt, {}, gamma};
  const int top = std::min(gamma, r);
  for (int size = 2; size <= top; ++size) {
    // Lexicographic combinations of terminal indices.
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<VertexId> subset;
      for (int i : idx) subset.push_back(terminals[i]);
      graph.excluded.assign(graph.num_vertices, false);
      for (VertexId t : terminals) graph.excluded[t] = true;
      for (VertexId t : subset) graph.excluded[t] = false;

      auto st = dreyfus_wagner(graph, subset);
      if (st.cost.finite()) {
        HyperLink h;
        h.id = static_cast<int>(out.links.size());
        h.terminals = subset;
        h.cost = st.cost.value();
        h.realization = st.edge_ids;
        std::vector<VertexId> nodes;
        for (LinkId id : h.realization) {
          for (VertexId x : {completed.links[id].u, completed.links[id].v}) {
            if (!completed.is_terminal(x)) nodes.push_back(x);
          }
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        h.steiner_nodes = std::move(nodes);
        out.links.push_back(std::move(h));
      }

      int i = size - 1;
      while (i >= 0 && idx[i] == r - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

void write_hyperlinks(std::ostream& out, const StapInstance& inst,
                      std::span<const HyperLink> links) {
  for (const auto& h : links) {
    out << "hyperlink " << to_string(h.cost);
    for (VertexId t : h.terminals) out << ' ' << inst.names[t];
    out << '\n';
    for (LinkId id : h.realization) {
      const auto& l = inst.links[id];
      out << "realization " << inst.names[l.u] << ' ' << inst.names[l.v] << ' '
          << to_string(l.cost) << '\n';
    }
  }
}

std::vector<HyperLink> read_hyperlinks(std::istream& in, const StapInstance& inst) {
  std::vector<HyperLink> out;
  std::string line;
  int lineno = 0;
  auto vertex = [&](const std::string& name) {
    auto v = inst.find(name);
    if (!v) throw ParseError(lineno, "unknown vertex '" + name + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "hyperlink") {
      std::string cost_text, name;
      ss >> cost_text;
      auto cost = parse_rational(cost_text);
      if (!cost) throw ParseError(lineno, "malformed cost");
      HyperLink h;
      h.id = static_cast<int>(out.size());
      h.cost = *cost;
      while (ss >> name) h.terminals.push_back(vertex(name));
      std::sort(h.terminals.begin(), h.terminals.end());
      if (h.terminals.size() < 2) throw ParseError(lineno, "hyper-link joins fewer than two terminals");
      out.push_back(std::move(h));
    } else if (kw == "realization") {
      if (out.empty()) throw ParseError(lineno, "realization before any hyperlink");
      std::string a, b, cost_text;
      if (!(ss >> a >> b >> cost_text)) throw ParseError(lineno, "usage: realization <u> <v> <cost>");
      VertexId u = vertex(a), v = vertex(b);
      auto cost = parse_rational(cost_text);
      LinkId found = kNone;
      for (LinkId id = 0; id < inst.num_links() && found == kNone; ++id) {
        const auto& l = inst.links[id];
        if (std::minmax(l.u, l.v) == std::minmax(u, v) && cost && l.cost == *cost) found = id;
      }
      if (found == kNone) throw ParseError(lineno, "no matching link");
      out.back().realization.push_back(found);
      for (VertexId x : {u, v}) {
        if (!inst.is_terminal(x)) out.back().steiner_nodes.push_back(x);
      }
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  for (auto& h : out) {
    std::sort(h.steiner_nodes.begin(), h.steiner_nodes.end());
    h.steiner_nodes.erase(std::unique(h.steiner_nodes.begin(), h.steiner_nodes.end()),
                          h.steiner_nodes.end());
  }
  return out;
}

}  // namespace stapkit
