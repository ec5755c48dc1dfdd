#pragma once

#include <boost/dynamic_bitset.hpp>

#include <span>
#include <vector>

#include "stapkit/instance.hpp"

namespace stapkit {

// Bitset over tree edge ids.
using EdgeSet = boost::dynamic_bitset<>;

// Rooted view of the terminal tree. Vertex ids are the instance's ids;
// non-terminals are simply absent from the tree. Children are kept in
// increasing id order so every traversal is deterministic.
class RootedTree {
 public:
  // Throws std::invalid_argument if `root` is not a terminal or the tree
  // edges do not form a spanning tree of the terminals.
  static RootedTree build(const StapInstance& inst, VertexId root);

  VertexId root() const { return root_; }
  int num_vertices() const { return static_cast<int>(parent_.size()); }
  int num_edges() const { return static_cast<int>(edge_lower_.size()); }

  bool contains(VertexId v) const {
    return v >= 0 && v < num_vertices() && in_tree_[v];
  }
  VertexId parent(VertexId v) const { return parent_[v]; }
  int depth(VertexId v) const { return depth_[v]; }
  // Edge to the parent; kNone at the root.
  TreeEdgeId parent_edge(VertexId v) const { return parent_edge_[v]; }
  // Child-side endpoint of a tree edge.
  VertexId lower(TreeEdgeId e) const { return edge_lower_[e]; }
  VertexId upper(TreeEdgeId e) const { return parent_[edge_lower_[e]]; }
  const std::vector<VertexId>& children(VertexId v) const { return children_[v]; }

  // Tree vertices in preorder; the subtree of v occupies
  // [preorder_index(v), subtree_end(v)).
  const std::vector<VertexId>& preorder() const { return preorder_; }
  int preorder_index(VertexId v) const { return tin_[v]; }
  int subtree_end(VertexId v) const { return tout_[v]; }
  int subtree_size(VertexId v) const { return tout_[v] - tin_[v]; }

  // a is an ancestor of d or equal to it.
  bool is_ancestor(VertexId a, VertexId d) const {
    return tin_[a] <= tin_[d] && tin_[d] < tout_[a];
  }

  // Throws std::out_of_range for vertices outside the tree.
  VertexId lca(VertexId a, VertexId b) const;
  VertexId lca(std::span<const VertexId> vertices) const;

  // Edges of the unique a-b path, ordered from a to b.
  std::vector<TreeEdgeId> path(VertexId a, VertexId b) const;
  // Vertices of the unique a-b path, a first.
  std::vector<VertexId> path_vertices(VertexId a, VertexId b) const;

  // Edge set of the minimal subtree spanning `vertices` (empty if fewer
  // than two distinct vertices).
  EdgeSet spanning_edges(std::span<const VertexId> vertices) const;
  EdgeSet empty_edge_set() const { return EdgeSet(num_edges()); }
  // Vertex i is touched by an edge set if it is an endpoint of one of
  // its edges.
  std::vector<VertexId> touched_vertices(const EdgeSet& edges) const;

 private:
  void check(VertexId v) const;

  VertexId root_ = kNone;
  std::vector<bool> in_tree_;
  std::vector<VertexId> parent_;
  std::vector<int> depth_;
  std::vector<TreeEdgeId> parent_edge_;
  std::vector<VertexId> edge_lower_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<VertexId> preorder_;
  std::vector<int> tin_, tout_;
  // up_[j][v] = 2^j-th ancestor (root maps to itself).
  std::vector<std::vector<VertexId>> up_;
};

// Default root: the terminal with the lexicographically smallest name.
VertexId default_root(const StapInstance& inst);

}  // namespace stapkit
