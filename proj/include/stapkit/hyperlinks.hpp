#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"

namespace stapkit {

// A hyper-link joins a set of terminals at the cost of the cheapest full
// component connecting them.
struct HyperLink {
  int id = kNone;
  std::vector<VertexId> terminals;  // sorted, size >= 2
  Rational cost;
  // Links of the instance it was built on, and the non-terminal nodes
  // they pass through.
  std::vector<LinkId> realization;
  std::vector<VertexId> steiner_nodes;
};

struct HyperTapInstance {
  RootedTree tree;
  std::vector<HyperLink> links;
  int gamma = 2;
};

// lca of the joined terminals. Throws on an empty terminal set.
VertexId apex(const RootedTree& rt, const HyperLink& link);

// T_l: edges of the minimal subtree spanning the joined terminals.
EdgeSet coverage(const RootedTree& rt, const HyperLink& link);

// Every tree vertex lies in at most k of the coverage subtrees.
bool is_k_thin(const RootedTree& rt, std::span<const HyperLink> links, int k);
bool is_k_thin(const RootedTree& rt, std::span<const HyperLink* const> links, int k);

// Undirected graph with rational edge costs; `excluded` vertices may not
// be used at all.
struct SteinerGraph {
  int num_vertices = 0;
  struct Edge {
    VertexId u, v;
    Rational cost;
    int id;
  };
  std::vector<Edge> edges;
  std::vector<bool> excluded;
};

struct SteinerTree {
  ExtendedCost cost;         // infinite if the terminals are disconnected
  std::vector<int> edge_ids; // sorted
};

// Exact minimum Steiner tree, O(3^p n + 2^p n^2) after all-pairs shortest
// paths. Throws std::invalid_argument if a terminal is out of range or
// excluded.
SteinerTree dreyfus_wagner(const SteinerGraph& graph, std::span<const VertexId> terminals);

// One hyper-link per terminal subset S with 2 <= |S| <= gamma whose
// cheapest full component is finite, computed on (V, L) with every other
// terminal removed. Throws ResourceError when the subset count exceeds
// max_subsets.
HyperTapInstance build_gamma_restricted(const StapInstance& completed,
                                        const RootedTree& rt, int gamma,
                                        std::int64_t max_subsets = 200000);

// Sum over i in [2, gamma] of C(r, i), saturating at INT64_MAX.
std::int64_t count_subsets(int r, int gamma);

// Debug dump: "hyperlink <cost> <t1> <t2> ..." followed by one
// "realization <u> <v> <cost>" line per link.
void write_hyperlinks(std::ostream& out, const StapInstance& inst,
                      std::span<const HyperLink> links);
std::vector<HyperLink> read_hyperlinks(std::istream& in, const StapInstance& inst);

}  // namespace stapkit
