#pragma once

#include <vector>

#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"

namespace stapkit {

// Single-source shortest paths over the link graph (V, L) with link costs.
struct ShortestPaths {
  std::vector<ExtendedCost> dist;
  std::vector<LinkId> via;  // link entering each vertex, kNone at source
};

ShortestPaths link_dijkstra(const StapInstance& inst, VertexId source);

// For every terminal pair whose shortest (V, L) distance beats the
// cheapest existing direct link, appends a kPath link of that cost.
// Existing links are kept. Edge-weighted instances only.
StapInstance metric_completion(const StapInstance& inst);

// Closes the link set under shadows: for every terminal-terminal link
// (u, v) of cost c and every pair u', v' on the tree path P_uv a link
// (u', v') of cost <= c exists. Shadows can open shorter detours, so
// metric completion and shadowing alternate until neither adds a link.
StapInstance shadow_completion(const StapInstance& inst, const RootedTree& rt);

// metric_completion followed by shadow_completion.
StapInstance complete(const StapInstance& inst, const RootedTree& rt);

// Replaces each link (u, v, c > 0) by u-m-v with a new Steiner node m of
// cost c. Node-weighted instances only.
StapInstance subdivide_links(const StapInstance& inst);

// Input link ids realizing the given links of a derived instance
// (deduplicated, sorted).
std::vector<LinkId> expand_links(const StapInstance& derived,
                                 const std::vector<LinkId>& ids);

// Cheapest link cost per unordered vertex pair, indexed [u][v].
std::vector<std::vector<ExtendedCost>> cheapest_link_matrix(const StapInstance& inst);

}  // namespace stapkit
