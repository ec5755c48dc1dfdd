#pragma once

#include <span>
#include <vector>

#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"

namespace stapkit {

// A link between a vertex and one of its strict ancestors.
struct UpLink {
  VertexId bottom = kNone;
  VertexId top = kNone;
  Rational cost;
  LinkId link = kNone;  // link of the completed instance it comes from
  EdgeSet path;         // tree edges on the bottom-top path
};

struct UpLinkSolution {
  std::vector<UpLink> uplinks;
  Rational total_cost;
};

// All ancestor-descendant terminal links, one per (bottom, top) pair at
// minimum cost, ordered by (bottom, top).
std::vector<UpLink> enumerate_uplinks(const StapInstance& completed, const RootedTree& rt);

// Minimum-cost subset of `uplinks` covering every tree edge (exact DP over
// (vertex, ancestor) states). Throws InfeasibleError naming an edge no
// up-link covers.
UpLinkSolution optimal_uplink_solution(std::span<const UpLink> uplinks, const RootedTree& rt);

// Rewrites a feasible solution so every tree edge is covered exactly
// once, swapping overlapping up-links for cheaper shadows taken from
// `available`. Cost never increases.
UpLinkSolution shorten_exact_cover(const UpLinkSolution& solution,
                                   std::span<const UpLink> available,
                                   const RootedTree& rt);

// Per-edge count of covering up-links.
std::vector<int> coverage_multiplicity(std::span<const UpLink> uplinks, const RootedTree& rt);

}  // namespace stapkit
