#include "stapkit/rooted_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace stapkit {

RootedTree RootedTree::build(const StapInstance& inst, VertexId root) {
  const int n = inst.num_vertices();
  if (root < 0 || root >= n || !inst.is_terminal(root)) {
    throw std::invalid_argument("root must be a terminal");
  }
  RootedTree t;
  t.root_ = root;
  t.in_tree_.assign(n, false);
  t.parent_.assign(n, kNone);
  t.depth_.assign(n, 0);
  t.parent_edge_.assign(n, kNone);
  t.edge_lower_.assign(inst.num_tree_edges(), kNone);
  t.children_.assign(n, {});
  t.tin_.assign(n, -1);
  t.tout_.assign(n, -1);

  std::vector<std::vector<std::pair<VertexId, TreeEdgeId>>> adj(n);
  for (TreeEdgeId e = 0; e < inst.num_tree_edges(); ++e) {
    const auto& te = inst.tree_edges[e];
    adj[te.u].push_back({te.v, e});
    adj[te.v].push_back({te.u, e});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  // Iterative DFS for preorder intervals.
  std::vector<std::pair<VertexId, size_t>> stack{{root, 0}};
  t.in_tree_[root] = true;
  t.tin_[root] = 0;
  t.preorder_.push_back(root);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < adj[v].size()) {
      auto [w, e] = adj[v][next++];
      if (w == t.parent_[v] && e == t.parent_edge_[v]) continue;
      if (t.in_tree_[w]) throw std::invalid_argument("tree edges contain a cycle");
      t.in_tree_[w] = true;
      t.parent_[w] = v;
      t.parent_edge_[w] = e;
      t.edge_lower_[e] = w;
      t.depth_[w] = t.depth_[v] + 1;
      t.children_[v].push_back(w);
      t.tin_[w] = static_cast<int>(t.preorder_.size());
      t.preorder_.push_back(w);
      stack.push_back({w, 0});
    } else {
      t.tout_[v] = static_cast<int>(t.preorder_.size());
      stack.pop_back();
    }
  }
  for (VertexId v : inst.terminals()) {
    if (!t.in_tree_[v]) throw std::invalid_argument("tree does not span all terminals");
  }

  int levels = 1;
  while ((1 << levels) < static_cast<int>(t.preorder_.size())) ++levels;
  t.up_.assign(levels, std::vector<VertexId>(n, root));
  for (VertexId v : t.preorder_) {
    t.up_[0][v] = v == root ? root : t.parent_[v];
  }
  for (int j = 1; j < levels; ++j) {
    for (VertexId v : t.preorder_) t.up_[j][v] = t.up_[j - 1][t.up_[j - 1][v]];
  }
  return t;
}

void RootedTree::check(VertexId v) const {
  if (!contains(v)) throw std::out_of_range("vertex not in tree");
}

VertexId RootedTree::lca(VertexId a, VertexId b) const {
  check(a);
  check(b);
  if (is_ancestor(a, b)) return a;
  if (is_ancestor(b, a)) return b;
  for (int j = static_cast<int>(up_.size()) - 1; j >= 0; --j) {
    if (!is_ancestor(up_[j][a], b)) a = up_[j][a];
  }
  return parent_[a];
}

VertexId RootedTree::lca(std::span<const VertexId> vertices) const {
  if (vertices.empty()) throw std::invalid_argument("lca of an empty set");
  VertexId acc = vertices.front();
  check(acc);
  for (VertexId v : vertices.subspan(1)) acc = lca(acc, v);
  return acc;
}

std::vector<TreeEdgeId> RootedTree::path(VertexId a, VertexId b) const {
  VertexId top = lca(a, b);
  std::vector<TreeEdgeId> up_part, down_part;
  for (VertexId v = a; v != top; v = parent_[v]) up_part.push_back(parent_edge_[v]);
  for (VertexId v = b; v != top; v = parent_[v]) down_part.push_back(parent_edge_[v]);
  up_part.insert(up_part.end(), down_part.rbegin(), down_part.rend());
  return up_part;
}

std::vector<VertexId> RootedTree::path_vertices(VertexId a, VertexId b) const {
  VertexId top = lca(a, b);
  std::vector<VertexId> up_part, down_part;
  for (VertexId v = a; v != top; v = parent_[v]) up_part.push_back(v);
  up_part.push_back(top);
  for (VertexId v = b; v != top; v = parent_[v]) down_part.push_back(v);
  up_part.insert(up_part.end(), down_part.rbegin(), down_part.rend());
  return up_part;
}

EdgeSet RootedTree::spanning_edges(std::span<const VertexId> vertices) const {
  EdgeSet out(num_edges());
  if (vertices.empty()) return out;
  VertexId apex = lca(vertices);
  for (VertexId v : vertices) {
    for (VertexId w = v; w != apex; w = parent_[w]) {
      TreeEdgeId e = parent_edge_[w];
      if (out.test(e)) break;
      out.set(e);
    }
  }
  return out;
}

std::vector<VertexId> RootedTree::touched_vertices(const EdgeSet& edges) const {
  std::vector<bool> seen(num_vertices(), false);
  for (auto e = edges.find_first(); e != EdgeSet::npos; e = edges.find_next(e)) {
    seen[edge_lower_[e]] = true;
    seen[parent_[edge_lower_[e]]] = true;
  }
  std::vector<VertexId> out;
  for (VertexId v = 0; v < num_vertices(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

VertexId default_root(const StapInstance& inst) {
  VertexId best = kNone;
  for (VertexId v : inst.terminals()) {
    if (best == kNone || inst.names[v] < inst.names[best]) best = v;
  }
  if (best == kNone) throw std::invalid_argument("instance has no terminals");
  return best;
}

}  // namespace stapkit
