#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stapkit/hyperlinks.hpp"
#include "stapkit/instance.hpp"
#include "stapkit/nw_greedy.hpp"
#include "stapkit/rooted_tree.hpp"
#include "stapkit/uplinks.hpp"

namespace stapkit {

// Size limits checked before any enumeration starts, and a wall-clock cap
// checked while it runs. Exceeding either throws ResourceError.
struct OracleBudget {
  int max_vertices = 64;
  int max_links = 20;           // exact_stap
  int max_steiner = 15;         // exact_nwstap, after subdivision
  int max_hyperlinks = 512;     // exact_hypertap
  int max_kthin_links = 14;     // exact_kthin_maximizer
  int max_spider_feet = 10;     // exact_min_ratio_pseudo_spider
  double time_cap_seconds = 60;
};

struct ExactResult {
  bool feasible = false;
  Rational cost;
  std::vector<int> chosen;  // link ids, vertex ids or hyper-link ids, sorted
};

// Every tree edge e has its endpoints connected in (V, (E(T) - e) ∪ F).
bool check_feasible_stap(const StapInstance& inst, std::span<const LinkId> links);

// Same question answered by bridge detection on (R ∪ S, E(T) ∪ F): no tree
// edge is a bridge.
bool bridge_feasible_stap(const StapInstance& inst, std::span<const LinkId> links);

// Minimum-cost feasible link set (edge-weighted). Branch and bound over
// links in increasing cost order.
ExactResult exact_stap(const StapInstance& inst, const OracleBudget& budget = {});

// Minimum-cost Steiner node set S of the subdivided instance with
// G[R ∪ S] 2-edge-connected. `chosen` holds ids of `subdivided`.
ExactResult exact_nwstap(const StapInstance& inst, const OracleBudget& budget = {});

// Minimum-cost hyper-link set covering every tree edge.
ExactResult exact_hypertap(const HyperTapInstance& inst, const OracleBudget& budget = {});

struct KThinResult {
  std::vector<int> chosen;
  Rational slack;
};

// Maximizes rho * c(drop_U(Z)) - c(Z) over all k-thin Z by enumeration.
KThinResult exact_kthin_maximizer(const Rational& rho, const HyperTapInstance& inst,
                                  std::span<const UpLink> uplinks, int k,
                                  const OracleBudget& budget = {});

// Exact minimum-ratio pseudo-spider over every head and feet subset, legs
// and pricing as in best_pseudo_spider. Empty when nothing covers a new
// edge.
std::optional<PseudoSpider> exact_min_ratio_pseudo_spider(const StapInstance& inst,
                                                          const RootedTree& rt,
                                                          const NwState& state,
                                                          const OracleBudget& budget = {});

}  // namespace stapkit
