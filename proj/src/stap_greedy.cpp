#include "stapkit/stap_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "stapkit/completion.hpp"

namespace stapkit {

GreedyParams epsilon_to_params(const Rational& epsilon, const GreedyCaps& caps) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  GreedyParams p;
  p.epsilon = epsilon;
  const long double eps = static_cast<long double>(epsilon.get_d());
  const long double ln2 = std::log(2.0L);
  p.epsilon_prime = (eps / 2) / (1 + ln2 + eps / 2);
  // 1/eps' = 2(1 + ln 2)/eps + 1 is irrational for rational eps, so the
  // ceiling is never ambiguous.
  p.gamma_exponent = static_cast<int>(std::ceil(2 * (1 + ln2) / eps + 1));
  p.gamma_theory = p.gamma_exponent >= 63 ? std::numeric_limits<std::int64_t>::max()
                                          : (std::int64_t{1} << p.gamma_exponent);
  {
    Rational q = Rational(4) / epsilon;
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    p.k_theory = c.fits_slong_p() ? c.get_si() : std::numeric_limits<std::int64_t>::max();
  }

  auto resolve = [](const ParamChoice& choice, std::int64_t theory, int fallback,
                    int minimum, const char* what) {
    std::int64_t v = 0;
    switch (choice.mode) {
      case ParamChoice::Mode::kExplicit: v = choice.value; break;
      case ParamChoice::Mode::kTheory: v = theory; break;
      case ParamChoice::Mode::kDefault: v = std::min<std::int64_t>(theory, fallback); break;
    }
    if (v < minimum) {
      throw std::invalid_argument(std::string(what) + " must be at least " + std::to_string(minimum));
    }
    return static_cast<int>(std::min<std::int64_t>(v, std::numeric_limits<int>::max()));
  };
  p.gamma = resolve(caps.gamma, p.gamma_theory, caps.default_gamma, 2, "gamma");
  p.k = resolve(caps.k, p.k_theory, caps.default_k, 1, "k");
  p.gamma_capped = p.gamma < p.gamma_theory;
  p.k_capped = p.k < p.k_theory;
  return p;
}

namespace {

EdgeSet union_coverage(std::span<const HyperLink* const> chosen, const RootedTree& rt) {
  EdgeSet covered = rt.empty_edge_set();
  for (const HyperLink* h : chosen) covered |= coverage(rt, *h);
  return covered;
}

}  // namespace

std::vector<int> drop_set(std::span<const UpLink> uplinks,
                          std::span<const HyperLink* const> chosen,
                          const RootedTree& rt) {
  EdgeSet covered = union_coverage(chosen, rt);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(uplinks.size()); ++i) {
    if (uplinks[i].path.is_subset_of(covered)) out.push_back(i);
  }
  return out;
}

Rational slack(const Rational& rho, std::span<const HyperLink* const> chosen,
               std::span<const UpLink> uplinks, const RootedTree& rt) {
  Rational dropped = 0;
  for (int i : drop_set(uplinks, chosen, rt)) dropped += uplinks[i].cost;
  Rational cost = 0;
  for (const HyperLink* h : chosen) cost += h->cost;
  return rho * dropped - cost;
}

// ---------------------------------------------------------------------------
// k-thin DP

struct KThinSearch::Run {
  Rational rho;
  std::span<const UpLink> uplinks;
  std::vector<int> up_of;  // up-link containing the edge above each vertex
  std::vector<bool> useful;  // per candidate: shares an edge with some up-link
  std::vector<std::unordered_map<std::string, Entry>> memo;
  std::int64_t states = 0;
};

KThinSearch::KThinSearch(const HyperTapInstance& inst, int k, std::int64_t max_states)
    : inst_(&inst), k_(k), max_states_(max_states) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const RootedTree& rt = inst.tree;
  std::map<std::vector<VertexId>, int> best;  // vertex set -> candidate
  for (int i = 0; i < static_cast<int>(inst.links.size()); ++i) {
    const auto& h = inst.links[i];
    Candidate c;
    c.link = i;
    c.apex = apex(rt, h);
    c.edges = coverage(rt, h);
    c.vertices = rt.touched_vertices(c.edges);
    if (c.vertices.empty()) continue;
    auto [it, inserted] = best.try_emplace(c.vertices, static_cast<int>(cands_.size()));
    if (inserted) {
      cands_.push_back(std::move(c));
    } else if (h.cost < inst.links[cands_[it->second].link].cost) {
      cands_[it->second] = std::move(c);
    }
  }
  vacuous_ = k_ >= rt.num_edges() || k_ >= static_cast<int>(cands_.size());
  by_apex_.assign(rt.num_vertices(), {});
  for (int i = 0; i < static_cast<int>(cands_.size()); ++i) by_apex_[cands_[i].apex].push_back(i);
}

const KThinSearch::Entry& KThinSearch::solve(Run& run, VertexId v,
                                             const std::string& profile) const {
  if (auto it = run.memo[v].find(profile); it != run.memo[v].end()) return it->second;
  const RootedTree& rt = inst_->tree;
  const int base = rt.preorder_index(v);

  // Choose the hyper-links with apex v: 0/1 knapsack over load profiles.
  struct Partial {
    Rational value;  // minus the cost of the chosen apex-v links
    std::vector<int> chosen;
  };
  std::map<std::string, Partial> states;
  states.emplace(profile, Partial{0, {}});
  for (int ci : by_apex_[v]) {
    if (!run.useful[ci]) continue;
    const Candidate& cand = cands_[ci];
    const Rational& cost = inst_->links[cand.link].cost;
    std::vector<std::pair<std::string, Partial>> additions;
    for (const auto& [s, part] : states) {
      bool redundant = true;
      for (VertexId w : cand.vertices) {
        if (w != v && s[rt.preorder_index(w) - base] == 0) {
          redundant = false;
          break;
        }
      }
      if (redundant) continue;
      std::string next = s;
      bool fits = true;
      for (VertexId w : cand.vertices) {
        char& load = next[rt.preorder_index(w) - base];
        if (vacuous_) {
          load = 1;
        } else if (load + 1 > k_) {
          fits = false;
          break;
        } else {
          ++load;
        }
      }
      if (!fits) continue;
      Partial p{part.value - cost, part.chosen};
      p.chosen.push_back(ci);
      additions.emplace_back(std::move(next), std::move(p));
    }
    for (auto& [s, p] : additions) {
      auto it = states.find(s);
      if (it == states.end()) {
        states.emplace(std::move(s), std::move(p));
      } else if (p.value > it->second.value) {
        it->second = std::move(p);
      }
    }
  }
  run.states += static_cast<std::int64_t>(states.size());
  if (run.states > max_states_) {
    throw ResourceError("k-thin search exceeded " + std::to_string(max_states_) +
                        " states; use a smaller k or gamma");
  }

  const int up_v = run.up_of[v];
  Entry entry;
  for (const auto& [sigma, part] : states) {
    std::optional<Rational> minus_total = part.value;
    std::optional<Rational> plus_total = part.value;
    std::vector<char> minus_flags, plus_flags;
    for (VertexId c : rt.children(v)) {
      const int off = rt.preorder_index(c) - base;
      const Entry& child = solve(run, c, sigma.substr(off, rt.subtree_size(c)));
      const int u = run.up_of[c];
      const Rational& child_minus = *child.minus.value;
      if (u < 0) {
        *minus_total += child_minus;
        if (plus_total) *plus_total += child_minus;
        minus_flags.push_back(0);
        plus_flags.push_back(0);
      } else if (run.uplinks[u].top == v) {
        // The up-link ends here: credit it if the child certifies coverage.
        bool use_plus = false;
        Rational contrib = child_minus;
        if (child.plus.value) {
          Rational with = *child.plus.value + run.rho * run.uplinks[u].cost;
          if (with > contrib) {
            contrib = with;
            use_plus = true;
          }
        }
        *minus_total += contrib;
        if (plus_total) *plus_total += contrib;
        minus_flags.push_back(use_plus);
        plus_flags.push_back(use_plus);
      } else {
        // The up-link continues above v through this child.
        *minus_total += child_minus;
        minus_flags.push_back(0);
        if (plus_total) {
          if (child.plus.value) {
            *plus_total += *child.plus.value;
          } else {
            plus_total.reset();
          }
        }
        plus_flags.push_back(1);
      }
    }
    if (!entry.minus.value || *minus_total > *entry.minus.value) {
      entry.minus = {minus_total, part.chosen, std::move(minus_flags)};
    }
    if (plus_total && (!entry.plus.value || *plus_total > *entry.plus.value)) {
      entry.plus = {plus_total, part.chosen, std::move(plus_flags)};
    }
  }
  if (up_v < 0) {
    entry.plus = entry.minus;
  } else if (profile[0] == 0) {
    // Nothing from above crosses the edge over v, so it stays uncovered.
    entry.plus = Side{};
  }
  return run.memo[v].emplace(profile, std::move(entry)).first->second;
}

void KThinSearch::collect(Run& run, VertexId v, const std::string& profile, bool plus,
                          std::vector<int>& out) const {
  const RootedTree& rt = inst_->tree;
  const Entry& entry = run.memo[v].at(profile);
  const Side& side = plus ? entry.plus : entry.minus;
  const int base = rt.preorder_index(v);
  std::string sigma = profile;
  for (int ci : side.chosen) {
    out.push_back(inst_->links[cands_[ci].link].id);
    for (VertexId w : cands_[ci].vertices) {
      char& load = sigma[rt.preorder_index(w) - base];
      load = vacuous_ ? 1 : load + 1;
    }
  }
  const auto& kids = rt.children(v);
  for (size_t i = 0; i < kids.size(); ++i) {
    const int off = rt.preorder_index(kids[i]) - base;
    collect(run, kids[i], sigma.substr(off, rt.subtree_size(kids[i])), side.child_plus[i], out);
  }
}

KThinChoice KThinSearch::best_for_rho(const Rational& rho, std::span<const UpLink> uplinks) const {
  const RootedTree& rt = inst_->tree;
  Run run;
  run.rho = rho;
  run.uplinks = uplinks;
  run.up_of.assign(rt.num_vertices(), -1);
  for (int i = 0; i < static_cast<int>(uplinks.size()); ++i) {
    const auto& p = uplinks[i].path;
    for (auto e = p.find_first(); e != EdgeSet::npos; e = p.find_next(e)) {
      VertexId low = rt.lower(e);
      if (run.up_of[low] >= 0) throw std::invalid_argument("up-links overlap");
      run.up_of[low] = i;
    }
  }
  EdgeSet on_uplinks = rt.empty_edge_set();
  for (const auto& u : uplinks) on_uplinks |= u.path;
  // Anything else only adds cost.
  run.useful.resize(cands_.size());
  for (size_t i = 0; i < cands_.size(); ++i) run.useful[i] = cands_[i].edges.intersects(on_uplinks);
  // A candidate is dominated by a sub-subtree reaching the same up-link
  // edges at no greater cost: swapping it in keeps every drop and never
  // raises a load.
  std::vector<EdgeSet> relevant(cands_.size());
  for (size_t i = 0; i < cands_.size(); ++i) relevant[i] = cands_[i].edges & on_uplinks;
  for (size_t i = 0; i < cands_.size(); ++i) {
    if (!run.useful[i]) continue;
    const Rational& ci = inst_->links[cands_[i].link].cost;
    for (size_t j = 0; j < cands_.size() && run.useful[i]; ++j) {
      if (j == i || !run.useful[j]) continue;
      const Rational& cj = inst_->links[cands_[j].link].cost;
      if (cj > ci || (cj == ci && j > i)) continue;
      if (relevant[j] == relevant[i] && cands_[j].edges.is_subset_of(cands_[i].edges)) {
        run.useful[i] = false;
      }
    }
  }
  run.memo.assign(rt.num_vertices(), {});
  const std::string root_profile(rt.subtree_size(rt.root()), 0);
  const Entry& top = solve(run, rt.root(), root_profile);
  KThinChoice out;
  out.slack = *top.minus.value;
  collect(run, rt.root(), root_profile, false, out.chosen);
  if (vacuous_) {
    // Occupancy only guards against links redundant with earlier picks;
    // strip the rest so the result has at most |E(T)| members.
    std::sort(out.chosen.begin(), out.chosen.end(), [&](int a, int b) {
      return inst_->links[b].cost < inst_->links[a].cost;
    });
    for (size_t i = 0; i < out.chosen.size();) {
      EdgeSet others = rt.empty_edge_set();
      for (size_t j = 0; j < out.chosen.size(); ++j) {
        if (j != i) others |= coverage(rt, inst_->links[out.chosen[j]]);
      }
      if (coverage(rt, inst_->links[out.chosen[i]]).is_subset_of(others)) {
        out.chosen.erase(out.chosen.begin() + static_cast<long>(i));
      } else {
        ++i;
      }
    }
  }
  std::sort(out.chosen.begin(), out.chosen.end());
  return out;
}

KThinChoice best_kthin_for_rho(const Rational& rho, const HyperTapInstance& inst,
                               std::span<const UpLink> uplinks, int k) {
  return KThinSearch(inst, k).best_for_rho(rho, uplinks);
}

// ---------------------------------------------------------------------------
// Min-ratio search

namespace {

std::vector<const HyperLink*> pointers(const HyperTapInstance& inst, const std::vector<int>& ids) {
  std::vector<const HyperLink*> out;
  for (int id : ids) out.push_back(&inst.links[id]);
  return out;
}

RatioChoice evaluate(const HyperTapInstance& inst, std::span<const UpLink> uplinks,
                     std::vector<int> chosen) {
  RatioChoice r;
  r.chosen = std::move(chosen);
  auto ptrs = pointers(inst, r.chosen);
  r.cost = 0;
  for (const HyperLink* h : ptrs) r.cost += h->cost;
  r.dropped = drop_set(uplinks, ptrs, inst.tree);
  r.dropped_cost = 0;
  for (int i : r.dropped) r.dropped_cost += uplinks[i].cost;
  r.ratio = r.dropped_cost > 0 ? Rational(r.cost / r.dropped_cost) : Rational(0);
  return r;
}

}  // namespace

RatioChoice min_ratio_kthin(const KThinSearch& search, std::span<const UpLink> uplinks,
                            const Rational& tolerance, RatioSearch mode) {
  const HyperTapInstance& inst = search.instance();
  if (uplinks.empty()) throw std::logic_error("min-ratio search with no up-links left");

  std::map<std::vector<VertexId>, int> by_terminals;
  for (const auto& h : inst.links) by_terminals.emplace(h.terminals, h.id);

  // Fallback candidates: each up-link's own endpoint pair joins at most
  // its cost and drops at least that up-link.
  std::optional<RatioChoice> best;
  for (const auto& u : uplinks) {
    auto key = std::vector<VertexId>{std::min(u.bottom, u.top), std::max(u.bottom, u.top)};
    auto it = by_terminals.find(key);
    if (it == by_terminals.end()) continue;
    RatioChoice cand = evaluate(inst, uplinks, {it->second});
    if (cand.dropped.empty()) continue;
    if (cand.dropped_cost == 0) {
      if (cand.cost == 0) return cand;  // free improvement
      continue;
    }
    if (!best || cand.ratio < best->ratio) best = std::move(cand);
  }
  if (!best) throw std::logic_error("no hyper-link set drops any up-link");

  int calls = 0;
  Rational lo = 0, hi = best->ratio;
  while (mode == RatioSearch::kBisect && hi - lo >= tolerance) {
    Rational mid = (lo + hi) / 2;
    KThinChoice res = search.best_for_rho(mid, uplinks);
    ++calls;
    if (res.slack > 0) {
      RatioChoice cand = evaluate(inst, uplinks, std::move(res.chosen));
      best = std::move(cand);
      hi = best->ratio;
    } else {
      if (!res.chosen.empty()) {
        RatioChoice cand = evaluate(inst, uplinks, res.chosen);
        if (cand.dropped_cost > 0 && cand.ratio == mid) {
          best = std::move(cand);
          break;
        }
      }
      lo = mid;
    }
  }
  // Refine: a positive best slack at the incumbent's ratio exposes a
  // strictly better set; stops at the exact optimum.
  while (true) {
    KThinChoice res = search.best_for_rho(best->ratio, uplinks);
    ++calls;
    if (res.slack <= 0) break;
    best = evaluate(inst, uplinks, std::move(res.chosen));
  }
  best->dp_calls = calls;
  return *best;
}

// ---------------------------------------------------------------------------

StapSolution local_greedy(const StapInstance& inst, const GreedyOptions& options) {
  require_valid(inst);
  if (inst.variant != Variant::kEdgeWeighted) {
    throw std::invalid_argument("local greedy needs an edge-weighted instance");
  }
  StapSolution sol;
  sol.params = epsilon_to_params(options.epsilon, options.caps);
  sol.root = options.root.value_or(default_root(inst));
  const RootedTree rt = RootedTree::build(inst, sol.root);
  const StapInstance completed = complete(inst, rt);
  sol.completed_links = completed.num_links();

  const auto uplinks = enumerate_uplinks(completed, rt);
  const UpLinkSolution optimum = optimal_uplink_solution(uplinks, rt);
  const UpLinkSolution start = shorten_exact_cover(optimum, uplinks, rt);
  sol.uplink_optimum = optimum.total_cost;
  sol.initial_cost = start.total_cost;
  sol.initial_uplinks = start.uplinks;

  const int r = static_cast<int>(inst.terminals().size());
  const int gamma = std::min(sol.params.gamma, std::max(r, 2));
  HyperTapInstance hyper = build_gamma_restricted(completed, rt, gamma, options.caps.max_subsets);
  sol.num_hyperlinks = static_cast<int>(hyper.links.size());
  KThinSearch search(hyper, sol.params.k, options.caps.max_dp_states);
  sol.theory_faithful = sol.params.gamma >= std::min<std::int64_t>(sol.params.gamma_theory, r) &&
                        sol.params.k >= std::min<std::int64_t>(sol.params.k_theory, rt.num_edges());

  std::vector<UpLink> remaining = start.uplinks;
  std::vector<bool> in_f(hyper.links.size(), false);
  while (!remaining.empty()) {
    RatioChoice step = min_ratio_kthin(search, remaining, sol.params.rho_tolerance, options.search);
    if (step.dropped.empty()) throw std::logic_error("greedy step dropped nothing");
    GreedyIteration it;
    it.chosen = step.chosen;
    it.ratio = step.ratio;
    it.cost = step.cost;
    it.dropped_cost = step.dropped_cost;
    it.dropped = static_cast<int>(step.dropped.size());
    sol.log.push_back(std::move(it));
    for (int id : step.chosen) in_f[id] = true;

    std::vector<bool> gone(remaining.size(), false);
    for (int i : step.dropped) gone[i] = true;
    std::vector<UpLink> next;
    for (size_t i = 0; i < remaining.size(); ++i) {
      if (!gone[i]) next.push_back(std::move(remaining[i]));
    }
    remaining = std::move(next);

    // Joint feasibility: F and the remaining up-links still cover T.
    EdgeSet covered = rt.empty_edge_set();
    for (size_t id = 0; id < hyper.links.size(); ++id) {
      if (in_f[id]) covered |= coverage(rt, hyper.links[id]);
    }
    for (const auto& u : remaining) covered |= u.path;
    if (!covered.all()) throw std::logic_error("greedy lost feasibility");
  }

  sol.cost = 0;
  std::vector<LinkId> realization;
  for (size_t id = 0; id < hyper.links.size(); ++id) {
    if (!in_f[id]) continue;
    sol.cost += hyper.links[id].cost;
    sol.accepted.push_back(hyper.links[id]);
    realization.insert(realization.end(), hyper.links[id].realization.begin(),
                       hyper.links[id].realization.end());
  }
  sol.links = expand_links(completed, realization);
  sol.expanded_cost = link_cost(inst, sol.links);
  if (sol.cost > sol.initial_cost) throw std::logic_error("greedy increased the cost");
  return sol;
}

}  // namespace stapkit
