#pragma once

#include <span>
#include <utility>
#include <vector>

#include "stapkit/instance.hpp"

namespace stapkit {

using GraphEdge = std::pair<VertexId, VertexId>;

// Indices of the bridges of the multigraph on vertices [0, n) induced by
// the vertices with active[v] set. Parallel edges are never bridges.
std::vector<int> find_bridges(int n, std::span<const GraphEdge> edges,
                              const std::vector<bool>& active);

// Component label per vertex (-1 for inactive vertices), labels dense
// from 0 in order of the smallest member.
std::vector<int> components(int n, std::span<const GraphEdge> edges,
                            const std::vector<bool>& active);

// Tree edges plus links of an instance as one edge list (tree edges first).
std::vector<GraphEdge> instance_edges(const StapInstance& inst);

}  // namespace stapkit
