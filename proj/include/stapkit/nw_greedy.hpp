#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"

namespace stapkit {

// Tree edges covered by joining the terminals of `joined`.
EdgeSet cov(const RootedTree& rt, std::span<const VertexId> joined);

struct NodePaths {
  // Sum of the costs of the internal vertices of a cheapest path from the
  // source (infinite when unreachable; 0 at the source).
  std::vector<ExtendedCost> dist;
  std::vector<VertexId> pred;
};

// Dijkstra on node costs over the link graph (V, L). Terminals weigh 0.
// With through_terminals unset, terminals end a path and are never
// internal to it.
NodePaths node_weighted_sssp(const StapInstance& inst, VertexId source,
                             std::span<const Rational> node_cost,
                             bool through_terminals = true);
NodePaths node_weighted_sssp(const StapInstance& inst, VertexId source,
                             bool through_terminals = true);

// Vertices of the source-to-target path recorded in `paths`, source first.
std::vector<VertexId> trace_path(const NodePaths& paths, VertexId source, VertexId target);

using SetFunction = std::function<Rational(const std::vector<int>&)>;

// Budgeted maximization of a monotone submodular f over item indices
// [0, costs.size()): every seed of at most three items within budget is
// extended by the best marginal gain per unit cost. Returns the best set
// found, sorted.
std::vector<int> sviridenko_max(std::span<const Rational> costs, const SetFunction& f,
                                const Rational& budget);

struct PseudoSpider {
  VertexId head = kNone;
  VertexId anchor = kNone;
  std::vector<VertexId> feet;               // sorted
  std::vector<std::vector<VertexId>> legs;  // per foot, head first
  Rational cost;                            // head plus every leg, per leg
  int covered = 0;                          // |U ∩ cov(feet)|
  Rational ratio;
};

// Purchased Steiner nodes and the tree edges still uncovered.
struct NwState {
  std::vector<bool> bought;
  EdgeSet uncovered;
};

// Tree edges not covered by the link components of G[R ∪ bought].
EdgeSet uncovered_edges(const StapInstance& inst, const RootedTree& rt,
                        const std::vector<bool>& bought);

NwState initial_state(const StapInstance& inst, const RootedTree& rt);

// Node costs with purchased nodes priced at 0.
std::vector<Rational> current_prices(const StapInstance& inst, const NwState& state);

// Approximately min-ratio pseudo-spider over every head and anchor foot,
// doubling the leg budget from the cheapest positive leg. Legs run through
// Steiner nodes only. Throws InfeasibleError when none covers a new edge.
PseudoSpider best_pseudo_spider(const StapInstance& inst, const RootedTree& rt,
                                const NwState& state);

// G[R ∪ bought] (tree edges and links) is connected and bridgeless.
bool nw_feasible(const StapInstance& inst, const std::vector<bool>& bought);

struct NwIteration {
  PseudoSpider spider;
  Rational paid;      // cost of the nodes actually bought this step
  int newly_covered = 0;
  int uncovered_after = 0;
};

struct NwSolution {
  StapInstance subdivided;
  VertexId root = kNone;
  std::vector<bool> bought;             // over subdivided vertex ids
  std::vector<VertexId> steiner;        // purchased Steiner nodes of the input
  std::vector<LinkId> links;            // costed input links used
  Rational cost;
  std::vector<NwIteration> log;
  int trimmed = 0;                      // nodes dropped after the loop
};

// Greedy pseudo-spider cover. Throws InfeasibleError if buying every
// Steiner node still leaves a tree edge uncovered.
NwSolution greedy_nwstap(const StapInstance& inst, std::optional<VertexId> root = std::nullopt);

}  // namespace stapkit
