#include "stapkit/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>
#include <stdexcept>

#include "stapkit/graph.hpp"
#include "stapkit/rooted_tree.hpp"

namespace stapkit {

std::int64_t SeededRng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

bool SeededRng::bernoulli(double p) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return u < p;
}

Family parse_family(std::string_view name) {
  if (name == "random-tree") return Family::kRandomTree;
  if (name == "star") return Family::kStar;
  if (name == "caterpillar") return Family::kCaterpillar;
  if (name == "path") return Family::kPath;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kRandomTree: return "random-tree";
    case Family::kStar: return "star";
    case Family::kCaterpillar: return "caterpillar";
    case Family::kPath: return "path";
  }
  return "?";
}

CostDistribution parse_cost_distribution(std::string_view name) {
  if (name == "uniform-int") return CostDistribution::kUniformInt;
  if (name == "uniform-rational") return CostDistribution::kUniformRational;
  throw std::invalid_argument("unknown cost distribution '" + std::string(name) + "'");
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("STAPKIT_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw std::invalid_argument("STAPKIT_SEED is not an integer");
  return v;
}

namespace {

Rational draw_cost(SeededRng& rng, const GenSpec& spec) {
  if (spec.costs == CostDistribution::kUniformInt) return rng.uniform(1, spec.max_cost);
  const std::int64_t den = rng.uniform(1, 4);
  const std::int64_t num = rng.uniform(den, den * spec.max_cost);
  Rational q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

std::vector<TreeEdge> draw_tree(SeededRng& rng, const GenSpec& spec) {
  const int r = spec.terminals;
  std::vector<TreeEdge> edges;
  switch (spec.family) {
    case Family::kRandomTree:
      for (int i = 1; i < r; ++i) edges.push_back({static_cast<int>(rng.uniform(0, i - 1)), i});
      break;
    case Family::kStar:
      for (int i = 1; i < r; ++i) edges.push_back({0, i});
      break;
    case Family::kPath:
      for (int i = 1; i < r; ++i) edges.push_back({i - 1, i});
      break;
    case Family::kCaterpillar: {
      const int spine = (r + 1) / 2;
      for (int i = 1; i < spine; ++i) edges.push_back({i - 1, i});
      for (int i = spine; i < r; ++i) {
        edges.push_back({static_cast<int>(rng.uniform(0, spine - 1)), i});
      }
      break;
    }
  }
  return edges;
}

bool coverable(const StapInstance& inst) {
  if (inst.tree_edges.empty()) return true;
  const RootedTree rt = RootedTree::build(inst, 0);
  std::vector<GraphEdge> links;
  for (const auto& l : inst.links) links.push_back({l.u, l.v});
  std::vector<bool> active(inst.num_vertices(), true);
  auto label = components(inst.num_vertices(), links, active);
  std::vector<std::vector<VertexId>> groups(inst.num_vertices());
  for (VertexId t : inst.terminals()) groups[label[t]].push_back(t);
  EdgeSet covered = rt.empty_edge_set();
  for (const auto& g : groups) covered |= rt.spanning_edges(g);
  return covered.all();
}

}  // namespace

StapInstance generate(const GenSpec& spec) {
  if (spec.terminals < 1) throw std::invalid_argument("need at least one terminal");
  if (spec.steiner < 0) throw std::invalid_argument("negative Steiner count");
  if (spec.max_cost < 1) throw std::invalid_argument("max_cost must be positive");
  if (!(spec.link_density >= 0 && spec.link_density <= 1)) {
    throw std::invalid_argument("link density must lie in [0, 1]");
  }
  SeededRng rng(spec.seed);
  const auto tree = draw_tree(rng, spec);
  const int n = spec.terminals + spec.steiner;
  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    StapInstance inst;
    inst.variant = spec.variant;
    for (int i = 0; i < spec.terminals; ++i) inst.add_vertex("t" + std::to_string(i), true);
    for (int i = 0; i < spec.steiner; ++i) {
      Rational c = spec.variant == Variant::kNodeWeighted ? draw_cost(rng, spec) : Rational(0);
      inst.add_vertex("s" + std::to_string(i), false, c);
    }
    for (const auto& e : tree) inst.add_tree_edge(e.u, e.v);

    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) {
        // Free terminal pairs would make most node-weighted draws trivial.
        const bool thin = spec.variant == Variant::kNodeWeighted && u < spec.terminals &&
                          v < spec.terminals;
        if (rng.bernoulli(thin ? spec.link_density / 4 : spec.link_density)) pairs.push_back({u, v});
      }
    }
    if (spec.max_links > 0 && static_cast<int>(pairs.size()) > spec.max_links) {
      // Keep a uniformly drawn subset, in the original order.
      for (int i = 0; i < spec.max_links; ++i) {
        std::swap(pairs[i], pairs[rng.uniform(i, static_cast<std::int64_t>(pairs.size()) - 1)]);
      }
      pairs.resize(spec.max_links);
      std::sort(pairs.begin(), pairs.end());
    }
    for (auto [u, v] : pairs) {
      Rational c = spec.variant == Variant::kEdgeWeighted ? draw_cost(rng, spec) : Rational(0);
      inst.add_link(u, v, c);
    }
    if (coverable(inst)) return inst;
  }
  throw std::runtime_error("no feasible instance after " + std::to_string(spec.max_retries) +
                           " attempts; raise the link density");
}

}  // namespace stapkit
