#include "stapkit/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace stapkit {

std::string_view variant_name(Variant v) {
  return v == Variant::kEdgeWeighted ? "edge" : "node";
}

std::vector<VertexId> StapInstance::terminals() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < num_vertices(); ++v) {
    if (terminal[v]) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> StapInstance::steiner_nodes() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < num_vertices(); ++v) {
    if (!terminal[v]) out.push_back(v);
  }
  return out;
}

std::optional<VertexId> StapInstance::find(std::string_view name) const {
  for (VertexId v = 0; v < num_vertices(); ++v) {
    if (names[v] == name) return v;
  }
  return std::nullopt;
}

VertexId StapInstance::add_vertex(std::string name, bool is_terminal,
                                  Rational cost) {
  cost.canonicalize();
  names.push_back(std::move(name));
  terminal.push_back(is_terminal);
  node_cost.push_back(is_terminal ? Rational(0) : cost);
  subdivision_of.push_back(kNone);
  return num_vertices() - 1;
}

TreeEdgeId StapInstance::add_tree_edge(VertexId u, VertexId v) {
  tree_edges.push_back({u, v});
  return num_tree_edges() - 1;
}

LinkId StapInstance::add_link(VertexId u, VertexId v, Rational cost) {
  Link l;
  l.u = u;
  l.v = v;
  l.cost = std::move(cost);
  l.cost.canonicalize();
  l.expansion = {num_links()};
  links.push_back(std::move(l));
  return num_links() - 1;
}

ValidationReport validate(const StapInstance& inst) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    if (std::find(report.violations.begin(), report.violations.end(), msg) ==
        report.violations.end()) {
      report.violations.push_back(std::move(msg));
    }
  };
  const int n = inst.num_vertices();
  if (static_cast<int>(inst.terminal.size()) != n ||
      static_cast<int>(inst.node_cost.size()) != n) {
    fail("vertex tables have inconsistent sizes");
    report.ok = false;
    return report;
  }

  const auto terminals = inst.terminals();
  if (terminals.empty()) fail("no terminals");

  // Tree: endpoints are distinct terminals, |E(T)| = |R| - 1, acyclic,
  // connected over R.
  std::vector<int> dsu(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  bool endpoints_ok = true;
  for (const auto& e : inst.tree_edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      fail("tree edge references unknown vertex");
      endpoints_ok = false;
      continue;
    }
    if (!inst.terminal[e.u] || !inst.terminal[e.v]) {
      fail("tree edge endpoint is not a terminal");
    }
    if (e.u == e.v) {
      fail("tree edge is a self-loop");
      continue;
    }
    int a = find(e.u), b = find(e.v);
    if (a == b) {
      fail("tree_edges not acyclic");
    } else {
      dsu[a] = b;
    }
  }
  if (inst.num_tree_edges() + 1 != static_cast<int>(terminals.size()) &&
      !terminals.empty()) {
    fail("tree edge count is not |R| - 1");
  }
  if (endpoints_ok && !terminals.empty()) {
    int root = find(terminals.front());
    for (VertexId t : terminals) {
      if (find(t) != root) {
        fail("tree_edges not connected over the terminals");
        break;
      }
    }
  }

  for (const auto& l : inst.links) {
    if (l.u < 0 || l.u >= n || l.v < 0 || l.v >= n) {
      fail("link references unknown vertex");
      continue;
    }
    if (l.u == l.v) fail("link is a self-loop");
    if (l.cost < 0) fail("negative link cost");
  }
  for (VertexId v = 0; v < n; ++v) {
    if (inst.node_cost[v] < 0) fail("negative node cost");
    if (inst.terminal[v] && inst.node_cost[v] != 0) {
      fail("terminal carries a node cost");
    }
  }
  if (inst.variant == Variant::kEdgeWeighted) {
    for (VertexId v = 0; v < n; ++v) {
      if (inst.node_cost[v] != 0) {
        fail("node cost in edge-weighted instance");
        break;
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

void require_valid(const StapInstance& inst) {
  auto report = validate(inst);
  if (report.ok) return;
  std::string msg = "invalid instance:";
  for (const auto& v : report.violations) msg += " " + v + ";";
  throw std::invalid_argument(msg);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

Rational parse_cost(const std::string& text, int line) {
  auto r = parse_rational(text);
  if (!r) throw ParseError(line, "malformed number '" + text + "'");
  return *r;
}

}  // namespace

StapInstance parse_instance(std::istream& in) {
  StapInstance inst;
  std::map<std::string, VertexId, std::less<>> ids;
  // (min(u,v), max(u,v)) -> link index, for duplicate collapsing.
  std::map<std::pair<VertexId, VertexId>, LinkId> link_index;
  bool have_header = false;
  std::string raw;
  int lineno = 0;

  auto lookup = [&](const std::string& name, int line) {
    auto it = ids.find(name);
    if (it == ids.end()) throw ParseError(line, "unknown vertex '" + name + "'");
    return it->second;
  };
  auto declare = [&](const std::string& name, bool is_terminal,
                     Rational cost, int line) {
    if (ids.count(name)) throw ParseError(line, "duplicate vertex '" + name + "'");
    ids.emplace(name, inst.add_vertex(name, is_terminal, std::move(cost)));
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tok = tokenize(raw);
    if (tok.empty()) continue;

    if (!have_header) {
      if (tok.size() != 3 || tok[0] != "stap") {
        throw ParseError(lineno, "expected header 'stap 1 edge|node'");
      }
      if (tok[1] != "1") throw ParseError(lineno, "unsupported version " + tok[1]);
      if (tok[2] == "edge") {
        inst.variant = Variant::kEdgeWeighted;
      } else if (tok[2] == "node") {
        inst.variant = Variant::kNodeWeighted;
      } else {
        throw ParseError(lineno, "unknown variant '" + tok[2] + "'");
      }
      have_header = true;
      continue;
    }

    const bool node_mode = inst.variant == Variant::kNodeWeighted;
    const std::string& kw = tok[0];
    if (kw == "terminal") {
      if (tok.size() != 2) throw ParseError(lineno, "usage: terminal <id>");
      declare(tok[1], true, 0, lineno);
    } else if (kw == "steiner") {
      if (node_mode) {
        if (tok.size() != 3) throw ParseError(lineno, "usage: steiner <id> <cost>");
        declare(tok[1], false, parse_cost(tok[2], lineno), lineno);
      } else {
        if (tok.size() != 2) throw ParseError(lineno, "usage: steiner <id>");
        declare(tok[1], false, 0, lineno);
      }
    } else if (kw == "tree") {
      if (tok.size() != 3) throw ParseError(lineno, "usage: tree <id> <id>");
      inst.add_tree_edge(lookup(tok[1], lineno), lookup(tok[2], lineno));
    } else if (kw == "link") {
      Rational cost = 0;
      if (node_mode) {
        if (tok.size() != 3 && tok.size() != 4) {
          throw ParseError(lineno, "usage: link <id> <id> [cost]");
        }
        if (tok.size() == 4) cost = parse_cost(tok[3], lineno);
      } else {
        if (tok.size() != 4) throw ParseError(lineno, "usage: link <id> <id> <cost>");
        cost = parse_cost(tok[3], lineno);
      }
      VertexId u = lookup(tok[1], lineno), v = lookup(tok[2], lineno);
      auto key = std::minmax(u, v);
      if (auto it = link_index.find(key); it != link_index.end()) {
        auto& existing = inst.links[it->second];
        if (cost < existing.cost) existing.cost = cost;
      } else {
        link_index.emplace(key, inst.add_link(u, v, cost));
      }
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "missing header");
  return inst;
}

StapInstance parse_instance_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

StapInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_instance(in);
}

void write_instance(std::ostream& out, const StapInstance& inst) {
  const bool node_mode = inst.variant == Variant::kNodeWeighted;
  out << "stap 1 " << variant_name(inst.variant) << '\n';
  for (VertexId v = 0; v < inst.num_vertices(); ++v) {
    if (inst.terminal[v]) {
      out << "terminal " << inst.names[v] << '\n';
    } else if (node_mode) {
      out << "steiner " << inst.names[v] << ' ' << to_string(inst.node_cost[v]) << '\n';
    } else {
      out << "steiner " << inst.names[v] << '\n';
    }
  }
  for (const auto& e : inst.tree_edges) {
    out << "tree " << inst.names[e.u] << ' ' << inst.names[e.v] << '\n';
  }
  for (const auto& l : inst.links) {
    out << "link " << inst.names[l.u] << ' ' << inst.names[l.v];
    if (!node_mode || l.cost != 0) out << ' ' << to_string(l.cost);
    out << '\n';
  }
}

std::string write_instance_string(const StapInstance& inst) {
  std::ostringstream out;
  write_instance(out, inst);
  return out.str();
}

Rational link_cost(const StapInstance& inst, const std::vector<LinkId>& ids) {
  Rational total = 0;
  for (LinkId id : ids) total += inst.links[id].cost;
  return total;
}

}  // namespace stapkit
