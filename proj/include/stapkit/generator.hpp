#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "stapkit/instance.hpp"

namespace stapkit {

enum class Family { kRandomTree, kStar, kCaterpillar, kPath };
enum class CostDistribution { kUniformInt, kUniformRational };

struct GenSpec {
  Family family = Family::kRandomTree;
  Variant variant = Variant::kEdgeWeighted;
  int terminals = 6;
  int steiner = 2;
  double link_density = 0.3;  // probability per vertex pair
  CostDistribution costs = CostDistribution::kUniformInt;
  int max_cost = 10;          // costs drawn from [1, max_cost]
  int max_links = 0;          // 0: no cap
  std::uint64_t seed = 1;
  int max_retries = 200;
};

Family parse_family(std::string_view name);
std::string_view family_name(Family f);
CostDistribution parse_cost_distribution(std::string_view name);

// Deterministic for a given spec: the same spec always yields the same
// instance on every platform. Retries link sampling until every tree edge
// can be covered; throws std::runtime_error when retries run out.
StapInstance generate(const GenSpec& spec);

// STAPKIT_SEED when set, else `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

// mt19937_64 output is fixed by the standard, but the distribution
// classes are not; these draws avoid them so streams match everywhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [lo, hi], by rejection.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace stapkit
