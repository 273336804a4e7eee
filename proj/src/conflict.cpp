#include "cfdm/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cfdm/rng.hpp"

namespace cfdm {

namespace {

using AttrSet = std::set<std::string>;

AttrSet attr_set(const CFD& c) { return {c.lhs.begin(), c.lhs.end()}; }

AttrSet intersect(const AttrSet& a, const AttrSet& b) {
  AttrSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
  return out;
}

bool strict_subset(const AttrSet& a, const AttrSet& b) {
  return a.size() < b.size() &&
         std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// LHS cell by attribute name; nullptr when the attribute is not in X.
const PatternCell* find_cell(const CFD& c, const std::string& attr) {
  for (std::size_t i = 0; i < c.lhs.size(); ++i)
    if (c.lhs[i] == attr) return &c.pattern[i];
  return nullptr;
}

bool is_variable(const CFD& c) { return c.kind() == CfdKind::Variable; }

/// T1: X1 strictly inside X2.
bool conflict_nested(const CFD& c1, const CFD& c2) {
  bool v1 = is_variable(c1), v2 = is_variable(c2);
  if (!v1 && !v2) {
    // T1-1: same constants on the shared attributes, different conclusions.
    for (const std::string& a : c1.lhs)
      if (*find_cell(c1, a) != *find_cell(c2, a)) return false;
    return c1.rhs_cell() != c2.rhs_cell();
  }
  if (v1 && v2) {
    // T1-2: the wider rule pins an attribute the narrow one leaves free,
    // over a shared constant region.
    bool pinned = false;
    for (const std::string& a : c1.lhs) {
      const PatternCell& p1 = *find_cell(c1, a);
      const PatternCell& p2 = *find_cell(c2, a);
      if (!p1.is_const() && p2.is_const()) pinned = true;
      if (p1.is_const() && p2.is_const() && p1 != p2) return false;
    }
    return pinned;
  }
  if (v1 && !v2) return false;  // T1-3
  // T1-4: the wider variable rule lets the conclusion drift with an
  // attribute the constant rule never mentions.
  for (const std::string& a : c1.lhs) {
    const PatternCell* p2 = find_cell(c2, a);
    if (!p2->is_const() || *p2 != *find_cell(c1, a)) return false;
  }
  for (std::size_t i = 0; i < c2.lhs.size(); ++i)
    if (!c2.lhs_cell(i).is_const() && !find_cell(c1, c2.lhs[i]))
      return true;
  return false;
}

/// T2: identical LHS attribute sets.
bool conflict_same_lhs(const CFD& c1, const CFD& c2) {
  bool v1 = is_variable(c1), v2 = is_variable(c2);
  if (!v1 && !v2) {
    for (const std::string& a : c1.lhs)
      if (*find_cell(c1, a) != *find_cell(c2, a)) return false;
    return c1.rhs_cell() != c2.rhs_cell();
  }
  if (v1 && v2) {
    // T2-2: free attributes differ, and the constant regions overlap.
    bool differ = false;
    for (const std::string& a : c1.lhs) {
      const PatternCell& p1 = *find_cell(c1, a);
      const PatternCell& p2 = *find_cell(c2, a);
      if (p1.is_const() != p2.is_const()) differ = true;
      if (p1.is_const() && p2.is_const() && p1 != p2) return false;
    }
    return differ;
  }
  return false;  // T2-3
}

/// T3: overlapping but incomparable LHS sets.
bool conflict_crossing(const CFD& c1, const CFD& c2, const AttrSet& shared) {
  if (!is_variable(c1) || !is_variable(c2)) return false;
  auto one_way = [&](const CFD& open, const CFD& pinned) {
    for (std::size_t i = 0; i < open.lhs.size(); ++i)
      if (open.lhs_cell(i).is_const()) return false;
    bool inside = false, outside = false;
    for (std::size_t i = 0; i < pinned.lhs.size(); ++i) {
      if (!pinned.lhs_cell(i).is_const()) continue;
      (shared.count(pinned.lhs[i]) ? inside : outside) = true;
    }
    return inside && outside;
  };
  return one_way(c1, c2) || one_way(c2, c1);
}

}  // namespace

void RankLadder::validate() const {
  if (ranks.empty())
    throw std::invalid_argument("RankLadder: no ranks");
  for (std::size_t i = 1; i < ranks.size(); ++i)
    if (ranks[i] <= ranks[i - 1])
      throw std::invalid_argument("RankLadder: ranks must strictly increase");
}

RankLadder make_ladder(std::uint64_t n) {
  std::vector<std::uint64_t> down;
  std::uint64_t r = n / 2;
  while (r > 2) {
    down.push_back(r);
    r = (r + 1) / 2;
  }
  down.push_back(2);
  RankLadder ladder{{down.rbegin(), down.rend()}};
  ladder.validate();
  return ladder;
}

std::uint64_t weight_constant(const CFD& c, const std::vector<Tuple>& group,
                              const Schema& schema) {
  if (c.kind() != CfdKind::Constant)
    throw std::invalid_argument("weight_constant: rule is not constant");
  int rhs = schema.index_of(c.rhs);
  std::uint64_t count = 0;
  for (const Tuple& t : group) {
    if (!matches_lhs(t, c, schema)) continue;
    const Cell& cell = t.cells[rhs];
    if (cell && *cell == *c.rhs_cell().value) ++count;
  }
  return count;
}

namespace {

std::uint64_t weight_from_survival(const CFD& c, std::uint64_t n,
                                   const RankLadder& ladder,
                                   const std::vector<bool>& present) {
  if (!present[0]) {
    std::cerr << "warning: rule " << format_cfd(c)
              << " absent at the lowest rank; weight 0\n";
    return 0;
  }
  for (std::size_t i = 0; i + 1 < ladder.ranks.size(); ++i)
    if (present[i] && !present[i + 1])
      return (ladder.ranks[i] + ladder.ranks[i + 1]) / 2;
  return (4 * n + 4) / 5;  // ceil(0.8 * n)
}

}  // namespace

std::uint64_t weight_variable(const CFD& c, std::uint64_t n,
                              const RankLadder& ladder, const MinerFn& miner) {
  ladder.validate();
  std::vector<bool> present;
  for (std::uint64_t rank : ladder.ranks) {
    bool found = false;
    for (const MinedRule& r : miner(rank))
      if (r.cfd == c) {
        found = true;
        break;
      }
    present.push_back(found);
    if (!found) break;
  }
  present.resize(ladder.ranks.size(), false);
  return weight_from_survival(c, n, ladder, present);
}

std::unordered_map<CFD, std::uint64_t, CfdHash> weight_variables(
    const std::vector<CFD>& rules, std::uint64_t n, const RankLadder& ladder,
    const MinerFn& miner) {
  ladder.validate();
  std::vector<std::unordered_set<CFD, CfdHash>> mined;
  for (std::uint64_t rank : ladder.ranks) {
    std::unordered_set<CFD, CfdHash> at_rank;
    for (const MinedRule& r : miner(rank)) at_rank.insert(r.cfd);
    mined.push_back(std::move(at_rank));
  }
  std::unordered_map<CFD, std::uint64_t, CfdHash> weights;
  for (const CFD& c : rules) {
    std::vector<bool> present;
    for (const auto& at_rank : mined) present.push_back(at_rank.count(c) > 0);
    weights[c] = weight_from_survival(c, n, ladder, present);
  }
  return weights;
}

bool conflict_pair(const CFD& c1, const CFD& c2) {
  if (c1.rhs != c2.rhs) return false;
  AttrSet x1 = attr_set(c1), x2 = attr_set(c2);
  AttrSet shared = intersect(x1, x2);
  if (shared.empty()) return false;
  if (x1 == x2) return conflict_same_lhs(c1, c2);
  if (strict_subset(x1, x2)) return conflict_nested(c1, c2);
  if (strict_subset(x2, x1)) return conflict_nested(c2, c1);
  return conflict_crossing(c1, c2, shared);
}

std::optional<MergedConflict> conflict_multi(const CFD& v,
                                             const std::vector<CFD>& consts) {
  if (v.kind() != CfdKind::Variable)
    throw std::invalid_argument("conflict_multi: first rule must be variable");
  for (const CFD& c : consts) {
    if (c.kind() != CfdKind::Constant)
      throw std::invalid_argument("conflict_multi: expected constant rules");
    if (c.rhs != v.rhs)
      throw std::invalid_argument("conflict_multi: RHS attributes differ");
  }
  if (consts.size() < 2) return std::nullopt;

  AttrSet shared = attr_set(v);
  for (const CFD& c : consts) shared = intersect(shared, attr_set(c));
  if (shared.empty()) return std::nullopt;

  auto pivot_works = [&](const std::string& p) {
    if (find_cell(v, p)->is_const()) return false;
    const PatternCell& first = *find_cell(consts[0], p);
    for (const CFD& c : consts)
      if (*find_cell(c, p) != first) return false;
    // Every other shared attribute must carry one agreed constant.
    for (const std::string& a : shared) {
      if (a == p) continue;
      const PatternCell* pv = find_cell(v, a);
      if (!pv->is_const()) return false;
      for (const CFD& c : consts)
        if (*find_cell(c, a) != *pv) return false;
    }
    return true;
  };
  bool pivoted = std::any_of(shared.begin(), shared.end(), pivot_works);
  if (!pivoted) return std::nullopt;

  std::set<std::string> conclusions;
  for (const CFD& c : consts) conclusions.insert(*c.rhs_cell().value);
  if (conclusions.size() < 2) return std::nullopt;
  return MergedConflict{consts};
}

ConflictGraph build_graph(const std::vector<WeightedRule>& rules) {
  const std::size_t r = rules.size();
  std::vector<std::size_t> node_of(r, SIZE_MAX);

  // Merged nodes: for each variable rule, try every wildcard pivot and every
  // agreed pivot value over the not yet consumed constant rules.
  struct Group {
    std::size_t variable;            // index of the contradicted rule
    std::vector<std::size_t> members;
  };
  std::vector<Group> groups;
  std::vector<std::size_t> merged_id(r, SIZE_MAX);  // rule -> group index
  for (std::size_t vi = 0; vi < r; ++vi) {
    const CFD& v = rules[vi].cfd;
    if (v.kind() != CfdKind::Variable) continue;
    for (std::size_t p = 0; p < v.lhs.size(); ++p) {
      if (v.lhs_cell(p).is_const()) continue;
      const std::string& pivot = v.lhs[p];
      std::map<std::string, std::vector<std::size_t>> by_value;
      for (std::size_t ci = 0; ci < r; ++ci) {
        const CFD& c = rules[ci].cfd;
        if (c.kind() != CfdKind::Constant || c.rhs != v.rhs) continue;
        if (merged_id[ci] != SIZE_MAX) continue;
        const PatternCell* pc = find_cell(c, pivot);
        if (!pc || !pc->is_const()) continue;
        bool agrees = true;
        for (const std::string& a : c.lhs) {
          if (a == pivot) continue;
          const PatternCell* pv = find_cell(v, a);
          if (!pv) continue;
          if (!pv->is_const() || *pv != *find_cell(c, a)) {
            agrees = false;
            break;
          }
        }
        if (agrees) by_value[*pc->value].push_back(ci);
      }
      for (auto& [value, candidates] : by_value) {
        if (candidates.size() < 2) continue;
        std::vector<CFD> cfds;
        for (std::size_t ci : candidates) cfds.push_back(rules[ci].cfd);
        if (!conflict_multi(v, cfds)) continue;
        for (std::size_t ci : candidates) merged_id[ci] = groups.size();
        groups.push_back({vi, candidates});
      }
    }
  }

  // Nodes in rule order; a merged node sits where its first member was.
  ConflictGraph g;
  std::vector<std::size_t> group_node(groups.size(), SIZE_MAX);
  for (std::size_t i = 0; i < r; ++i) {
    if (merged_id[i] != SIZE_MAX) {
      std::size_t gi = merged_id[i];
      if (group_node[gi] == SIZE_MAX) {
        WeightedNode node;
        node.kind = WeightedNode::Kind::Merged;
        for (std::size_t m : groups[gi].members) {
          node.members.push_back(rules[m].cfd);
          node.weight += rules[m].weight;
        }
        group_node[gi] = g.nodes.size();
        g.nodes.push_back(std::move(node));
      }
      node_of[i] = group_node[gi];
    } else {
      node_of[i] = g.nodes.size();
      g.nodes.push_back(
          {WeightedNode::Kind::Single, {rules[i].cfd}, rules[i].weight});
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> edges;
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    edges.insert({std::min(a, b), std::max(a, b)});
  };
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    link(group_node[gi], node_of[groups[gi].variable]);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (conflict_pair(rules[i].cfd, rules[j].cfd))
        link(node_of[i], node_of[j]);
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

std::vector<std::size_t> mwid(const ConflictGraph& g, std::uint64_t seed,
                              MwidStats* stats) {
  const std::size_t n = g.nodes.size();
  const std::size_t e = g.edges.size();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t i = 0; i < e; ++i) {
    incident[g.edges[i].first].push_back(i);
    incident[g.edges[i].second].push_back(i);
  }

  std::vector<bool> alive(n, true);
  std::size_t remaining = n;
  std::vector<std::size_t> result;
  const std::size_t cap =
      10 + static_cast<std::size_t>(5.0 * std::log2(double(e) + 2.0));
  std::size_t rounds = 0;
  Rng rng(mix_seed(seed));

  // Per round, draws[i] holds the value received by each endpoint of edge i.
  std::vector<std::pair<double, double>> draws(e);
  while (remaining > 0) {
    if (++rounds > cap) throw std::runtime_error("mwid: round cap exceeded");
    for (std::size_t i = 0; i < e; ++i) {
      auto [a, b] = g.edges[i];
      std::uint64_t wa = g.nodes[a].weight, wb = g.nodes[b].weight;
      if (wa == wb) {
        draws[i] = {0.5, 0.5};
      } else {
        double heavy = 1.0 - 0.5 * rng.unit();  // (0.5, 1]
        double light = 0.5 * rng.unit();        // [0, 0.5)
        draws[i] = wa > wb ? std::make_pair(heavy, light)
                           : std::make_pair(light, heavy);
      }
    }
    std::vector<std::size_t> entered;
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      bool wins = true;
      for (std::size_t i : incident[v]) {
        auto [a, b] = g.edges[i];
        std::size_t w = a == v ? b : a;
        if (!alive[w]) continue;
        double pv = (a == v ? draws[i].first : draws[i].second) *
                    double(g.nodes[v].weight);
        double pw = (a == v ? draws[i].second : draws[i].first) *
                    double(g.nodes[w].weight);
        if (pv > pw || (pv == pw && v < w)) continue;
        wins = false;
        break;
      }
      if (wins) entered.push_back(v);
    }
    for (std::size_t v : entered) {
      result.push_back(v);
      if (alive[v]) {
        alive[v] = false;
        --remaining;
      }
      for (std::size_t i : incident[v]) {
        auto [a, b] = g.edges[i];
        std::size_t w = a == v ? b : a;
        if (alive[w]) {
          alive[w] = false;
          --remaining;
        }
      }
    }
  }
  if (stats) stats->rounds = rounds;
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<CFD> mwid_rules(const ConflictGraph& g, std::uint64_t seed,
                            MwidStats* stats) {
  std::vector<CFD> out;
  for (std::size_t v : mwid(g, seed, stats))
    for (const CFD& c : g.nodes[v].members) out.push_back(c);
  return out;
}

std::string to_dot(const ConflictGraph& g) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out.push_back('\\');
      out.push_back(ch);
    }
    return out;
  };
  std::ostringstream os;
  os << "graph conflicts {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label;
    for (const CFD& c : g.nodes[i].members) {
      if (!label.empty()) label += "\\n";
      label += escape(format_cfd(c));
    }
    os << "  n" << i << " [label=\"" << label << "\\nw="
       << g.nodes[i].weight << "\"];\n";
  }
  for (auto [a, b] : g.edges) os << "  n" << a << " -- n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace cfdm
