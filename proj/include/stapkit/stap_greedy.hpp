#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stapkit/hyperlinks.hpp"
#include "stapkit/instance.hpp"
#include "stapkit/rooted_tree.hpp"
#include "stapkit/uplinks.hpp"

namespace stapkit {

// How gamma / k are chosen: an explicit value, the theory value, or the
// default (theory value capped).
struct ParamChoice {
  enum class Mode { kDefault, kExplicit, kTheory };
  Mode mode = Mode::kDefault;
  int value = 0;

  static ParamChoice fixed(int v) { return {Mode::kExplicit, v}; }
  static ParamChoice theory() { return {Mode::kTheory, 0}; }
};

struct GreedyCaps {
  ParamChoice gamma;
  ParamChoice k;
  int default_gamma = 4;
  int default_k = 3;
  std::int64_t max_subsets = 200000;
  std::int64_t max_dp_states = 4000000;
};

struct GreedyParams {
  Rational epsilon;
  long double epsilon_prime = 0;  // (eps/2) / (1 + ln 2 + eps/2)
  int gamma_exponent = 0;         // ceil(1 / epsilon_prime)
  std::int64_t gamma_theory = 0;  // 2^gamma_exponent, saturating
  std::int64_t k_theory = 0;      // ceil(4 / eps)
  int gamma = 0;                  // values actually used
  int k = 0;
  bool gamma_capped = false;
  bool k_capped = false;
  Rational rho_tolerance{1, 1000000000};
};

// Throws std::invalid_argument for eps <= 0.
GreedyParams epsilon_to_params(const Rational& epsilon, const GreedyCaps& caps = {});

// Up-links whose whole path lies in the combined coverage of `chosen`.
std::vector<int> drop_set(std::span<const UpLink> uplinks,
                          std::span<const HyperLink* const> chosen,
                          const RootedTree& rt);

// rho * c(drop_U(Z)) - c(Z).
Rational slack(const Rational& rho, std::span<const HyperLink* const> chosen,
               std::span<const UpLink> uplinks, const RootedTree& rt);

struct KThinChoice {
  std::vector<int> chosen;  // hyper-link ids, sorted
  Rational slack;
};

// Exact maximizer of slack_rho over k-thin hyper-link sets, by a
// bottom-up DP over the rooted tree. The table at a vertex v is keyed by
// the load profile that already-chosen hyper-links from above place on
// the subtree of v (how many of them contain each vertex), plus whether
// the up-link crossing the edge above v must be fully covered inside.
//
// Hyper-links with identical vertex sets are reduced to the cheapest
// one. When k >= |E(T)| the thinness bound cannot bind an irredundant
// set, so profiles collapse to 0/1 occupancy.
class KThinSearch {
 public:
  KThinSearch(const HyperTapInstance& inst, int k, std::int64_t max_states = 4000000);

  // Requires pairwise edge-disjoint up-links.
  KThinChoice best_for_rho(const Rational& rho, std::span<const UpLink> uplinks) const;

  const HyperTapInstance& instance() const { return *inst_; }
  int k() const { return k_; }
  bool thinness_vacuous() const { return vacuous_; }
  int num_candidates() const { return static_cast<int>(cands_.size()); }

 private:
  struct Candidate {
    int link;                    // index into inst_->links
    VertexId apex;
    std::vector<VertexId> vertices;
    EdgeSet edges;
  };
  struct Side {
    std::optional<Rational> value;
    std::vector<int> chosen;      // candidate indices with apex here
    std::vector<char> child_plus; // per child: used the '+' table
  };
  struct Entry {
    Side minus, plus;
  };
  struct Run;

  const Entry& solve(Run& run, VertexId v, const std::string& profile) const;
  void collect(Run& run, VertexId v, const std::string& profile, bool plus,
               std::vector<int>& out) const;

  const HyperTapInstance* inst_;
  int k_;
  bool vacuous_;
  std::int64_t max_states_;
  std::vector<Candidate> cands_;
  std::vector<std::vector<int>> by_apex_;
};

KThinChoice best_kthin_for_rho(const Rational& rho, const HyperTapInstance& inst,
                               std::span<const UpLink> uplinks, int k);

struct RatioChoice {
  std::vector<int> chosen;
  Rational cost;
  Rational dropped_cost;
  std::vector<int> dropped;  // indices into the up-link span
  Rational ratio;            // cost / dropped_cost (0 for a free move)
  int dp_calls = 0;
};

enum class RatioSearch {
  kNewton,  // rho := ratio of the last maximizer until the best slack is 0
  kBisect,  // halve [lo, hi] down to the tolerance, then Newton steps
};

// k-thin set minimizing c(Z) / c(drop_U(Z)) with nonempty drop, driven by
// the sign of the best slack at trial values of rho, starting from the
// best single pair hyper-link. Both modes end at the exact minimum.
// Throws std::logic_error when no candidate drops anything.
RatioChoice min_ratio_kthin(const KThinSearch& search, std::span<const UpLink> uplinks,
                            const Rational& tolerance,
                            RatioSearch mode = RatioSearch::kNewton);

struct GreedyIteration {
  std::vector<int> chosen;
  Rational ratio;
  Rational cost;
  Rational dropped_cost;
  int dropped = 0;
};

struct StapSolution {
  GreedyParams params;
  VertexId root = kNone;
  int completed_links = 0;
  int num_hyperlinks = 0;
  Rational uplink_optimum;
  Rational initial_cost;        // shortened up-link solution
  std::vector<UpLink> initial_uplinks;
  std::vector<HyperLink> accepted;
  Rational cost;                // c(F)
  std::vector<LinkId> links;    // input links realizing F
  Rational expanded_cost;       // cost of `links`, <= cost
  std::vector<GreedyIteration> log;
  bool theory_faithful = false;
};

struct GreedyOptions {
  Rational epsilon{1};
  GreedyCaps caps;
  std::optional<VertexId> root;
  RatioSearch search = RatioSearch::kNewton;
};

// Local greedy: start from the exactly-once up-link cover and repeatedly
// buy the min-ratio k-thin hyper-link set, dropping the up-links it makes
// redundant. Throws InfeasibleError when some tree edge cannot be covered.
StapSolution local_greedy(const StapInstance& inst, const GreedyOptions& options);

}  // namespace stapkit
