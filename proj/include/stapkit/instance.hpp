#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stapkit/rational.hpp"

namespace stapkit {

using VertexId = int;
using LinkId = int;
using TreeEdgeId = int;

inline constexpr int kNone = -1;

enum class Variant { kEdgeWeighted, kNodeWeighted };

std::string_view variant_name(Variant v);

struct TreeEdge {
  VertexId u = kNone;
  VertexId v = kNone;
};

enum class LinkOrigin {
  kInput,     // present in the parsed instance
  kPath,      // metric completion: shortest path between two terminals
  kShadow,    // shadow completion: sub-pair of a longer link's tree path
  kSubdivided // half of a subdivided costed link (node-weighted)
};

struct Link {
  VertexId u = kNone;
  VertexId v = kNone;
  Rational cost;
  LinkOrigin origin = LinkOrigin::kInput;
  // Input-instance link ids whose union realizes this link; the sum of
  // their costs equals `cost` exactly.
  std::vector<LinkId> expansion;
  // kPath: realizing vertex sequence u..v. kShadow: the link it shadows.
  std::vector<VertexId> path;
  LinkId parent = kNone;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InfeasibleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A STAP / NW-STAP problem statement. Vertex ids are dense indices; the
// user-facing names are kept alongside. Tree edges live on terminals only.
struct StapInstance {
  Variant variant = Variant::kEdgeWeighted;
  std::vector<std::string> names;
  std::vector<bool> terminal;
  // Node-weighted only. Zero for terminals.
  std::vector<Rational> node_cost;
  std::vector<TreeEdge> tree_edges;
  std::vector<Link> links;
  // Per vertex: the input link a subdivision node replaced, else kNone.
  std::vector<LinkId> subdivision_of;

  int num_vertices() const { return static_cast<int>(names.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  int num_tree_edges() const { return static_cast<int>(tree_edges.size()); }
  bool is_terminal(VertexId v) const { return terminal[v]; }

  std::vector<VertexId> terminals() const;
  std::vector<VertexId> steiner_nodes() const;
  std::optional<VertexId> find(std::string_view name) const;

  VertexId add_vertex(std::string name, bool is_terminal, Rational cost = 0);
  TreeEdgeId add_tree_edge(VertexId u, VertexId v);
  // Appends an input link (expansion = itself).
  LinkId add_link(VertexId u, VertexId v, Rational cost);
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport validate(const StapInstance& inst);

// Throws std::invalid_argument listing the violations when not ok.
void require_valid(const StapInstance& inst);

// Line-oriented text format:
//   stap 1 edge|node
//   terminal <id>
//   steiner <id> [cost]
//   tree <id> <id>
//   link <id> <id> [cost]
// '#' starts a comment. Duplicate links collapse to the cheapest.
StapInstance parse_instance(std::istream& in);
StapInstance parse_instance_string(std::string_view text);
StapInstance load_instance(const std::string& path);

void write_instance(std::ostream& out, const StapInstance& inst);
std::string write_instance_string(const StapInstance& inst);

// Sum of the costs of the given links.
Rational link_cost(const StapInstance& inst, const std::vector<LinkId>& ids);

}  // namespace stapkit
