#include "cfdm/discovery.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace cfdm {

void DiscoveryParams::validate() const {
  if (!(e > 0.5 && e < 1.0))
    throw std::invalid_argument("e must lie in (0.5, 1)");
  if (min_support < 1)
    throw std::invalid_argument("min_support must be >= 1");
  if (max_lhs < 1) throw std::invalid_argument("max_lhs must be >= 1");
}

bool rule_valid(const RuleEval& ev, const DiscoveryParams& params) {
  return ev.t_prime > 0 && ev.u > params.e &&
         ev.supporters >= params.min_support;
}

namespace {

std::vector<int> resolve_lhs(const CFD& c, const Schema& schema) {
  std::vector<int> idx;
  for (const auto& a : c.lhs) {
    int i = schema.index_of(a);
    if (i < 0) throw std::invalid_argument("unknown attribute: " + a);
    idx.push_back(i);
  }
  return idx;
}

struct ValueStats {
  std::uint64_t missing = 0;
  std::map<std::string, std::uint64_t> counts;
};

// Tolerant satisfaction and exact supporters against a fixed RHS constant.
void accumulate_const(const ValueStats& s, const std::string& a, double e,
                      RuleEval& ev) {
  ev.u_prime += s.missing;
  for (const auto& [v, n] : s.counts) {
    if (v == a) {
      ev.u_prime += n;
      ev.supporters += n;
    } else if (string_similarity(v, a) > e) {
      ev.u_prime += n;
    }
  }
}

// Majority-subgroup counting; ties keep the first value in order.
void accumulate_variable(const ValueStats& s, double e, RuleEval& ev) {
  ev.u_prime += s.missing;
  const std::string* dom = nullptr;
  std::uint64_t best = 0;
  for (const auto& [v, n] : s.counts)
    if (n > best) {
      best = n;
      dom = &v;
    }
  if (!dom) return;
  for (const auto& [v, n] : s.counts) {
    if (v == *dom) {
      ev.u_prime += n;
      ev.supporters += n;
    } else if (string_similarity(v, *dom) > e) {
      ev.u_prime += n;
    }
  }
}

using Found = std::unordered_map<CFD, RuleEval, CfdHash>;

// All valid candidates for LHS attribute set X (schema indices, ascending)
// against every RHS attribute outside X (or only_rhs when >= 0). Patterns
// are instantiated from the value combinations present in the group.
void mine_x(const std::vector<Tuple>& group, const Schema& schema,
            const std::vector<int>& X, const DiscoveryParams& params,
            bool variable_rules, int only_rhs, Found& out) {
  std::vector<int> elig;
  for (std::size_t i = 0; i < group.size(); ++i) {
    bool ok = true;
    for (int x : X)
      if (!group[i].cells[x].has_value()) {
        ok = false;
        break;
      }
    if (ok) elig.push_back(static_cast<int>(i));
  }
  if (elig.size() < params.min_support) return;

  std::vector<int> rhs_attrs;
  if (only_rhs >= 0) {
    rhs_attrs.push_back(only_rhs);
  } else {
    for (int a = 0; a < static_cast<int>(schema.arity()); ++a)
      if (std::find(X.begin(), X.end(), a) == X.end()) rhs_attrs.push_back(a);
  }

  std::size_t xs = X.size();
  for (std::uint32_t cmask = 0; cmask < (1u << xs); ++cmask) {
    std::map<std::vector<std::string>, std::vector<int>> classes;
    for (int ti : elig) {
      std::vector<std::string> key;
      for (std::size_t j = 0; j < xs; ++j)
        if (cmask >> j & 1) key.push_back(*group[ti].cells[X[j]]);
      classes[std::move(key)].push_back(ti);
    }
    for (const auto& [key, members] : classes) {
      if (members.size() < params.min_support) continue;
      auto make_cfd = [&](PatternCell rhs_cell, int a) {
        CFD c;
        std::size_t ki = 0;
        for (std::size_t j = 0; j < xs; ++j) {
          c.lhs.push_back(schema.attributes[X[j]]);
          c.pattern.push_back(cmask >> j & 1
                                  ? PatternCell::constant(key[ki++])
                                  : PatternCell::wildcard());
        }
        c.rhs = schema.attributes[a];
        c.pattern.push_back(std::move(rhs_cell));
        return c;
      };
      for (int a : rhs_attrs) {
        ValueStats all;
        std::map<std::vector<std::string>, ValueStats> subs;
        for (int ti : members) {
          std::vector<std::string> wkey;
          for (std::size_t j = 0; j < xs; ++j)
            if (!(cmask >> j & 1)) wkey.push_back(*group[ti].cells[X[j]]);
          ValueStats& sub = subs[std::move(wkey)];
          const Cell& rc = group[ti].cells[a];
          if (!rc.has_value()) {
            ++all.missing;
            ++sub.missing;
          } else {
            ++all.counts[*rc];
            ++sub.counts[*rc];
          }
        }
        if (variable_rules) {
          RuleEval ev;
          ev.t_prime = members.size();
          for (const auto& [wk, s] : subs)
            accumulate_variable(s, params.e, ev);
          ev.u = static_cast<double>(ev.u_prime) /
                 static_cast<double>(ev.t_prime);
          if (rule_valid(ev, params))
            out.emplace(make_cfd(PatternCell::wildcard(), a), ev);
        }
        for (const auto& [val, cnt] : all.counts) {
          RuleEval ev;
          ev.t_prime = members.size();
          accumulate_const(all, val, params.e, ev);
          ev.u = static_cast<double>(ev.u_prime) /
                 static_cast<double>(ev.t_prime);
          if (rule_valid(ev, params))
            out.emplace(make_cfd(PatternCell::constant(val), a), ev);
        }
      }
    }
  }
}

// Keeps the rules with no strictly more general valid rule in `found`.
// `found` must contain every valid candidate that could act as a reducer.
std::vector<MinedRule> reduce_and_sort(const Found& found) {
  std::map<std::pair<std::string, std::string>, std::vector<const Found::value_type*>>
      buckets;
  for (const auto& entry : found) {
    const PatternCell& rc = entry.first.rhs_cell();
    buckets[{entry.first.rhs, rc.is_const() ? "=" + *rc.value : "_"}]
        .push_back(&entry);
  }
  std::vector<MinedRule> out;
  for (const auto& [bk, entries] : buckets) {
    for (const auto* e : entries) {
      bool minimal = true;
      for (const auto* g : entries) {
        if (g == e || g->first == e->first) continue;
        if (more_general_or_equal(g->first, e->first)) {
          minimal = false;
          break;
        }
      }
      if (minimal) out.push_back({e->first, e->second});
    }
  }
  std::sort(out.begin(), out.end(), [](const MinedRule& a, const MinedRule& b) {
    return format_cfd(a.cfd) < format_cfd(b.cfd);
  });
  return out;
}

void for_each_combo(std::size_t r, std::size_t size,
                    const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> X(size);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int start) {
    if (pos == size) {
      fn(X);
      return;
    }
    for (int i = start; i <= static_cast<int>(r - (size - pos)); ++i) {
      X[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

void check_arity(const Schema& schema) {
  if (schema.arity() > 64)
    throw std::invalid_argument("discovery supports at most 64 attributes");
}

}  // namespace

RuleEval evaluate_rule(const CFD& c, const std::vector<Tuple>& group,
                       const Schema& schema, double e) {
  c.validate();
  auto idx = resolve_lhs(c, schema);
  int ri = schema.index_of(c.rhs);
  if (ri < 0) throw std::invalid_argument("unknown attribute: " + c.rhs);

  RuleEval ev;
  ValueStats all;
  std::map<std::vector<std::string>, ValueStats> subs;
  bool variable = !c.rhs_cell().is_const();
  for (const Tuple& t : group) {
    bool match = true;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const Cell& cell = t.cells[idx[j]];
      if (!cell.has_value() ||
          (c.lhs_cell(j).is_const() && *c.lhs_cell(j).value != *cell)) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    ++ev.t_prime;
    ValueStats* s = &all;
    if (variable) {
      std::vector<std::string> key;
      for (int i : idx) key.push_back(*t.cells[i]);
      s = &subs[std::move(key)];
    }
    const Cell& rc = t.cells[ri];
    if (!rc.has_value())
      ++s->missing;
    else
      ++s->counts[*rc];
  }
  if (variable) {
    for (const auto& [k, s] : subs) accumulate_variable(s, e, ev);
  } else {
    accumulate_const(all, *c.rhs_cell().value, e, ev);
  }
  if (ev.t_prime > 0)
    ev.u = static_cast<double>(ev.u_prime) / static_cast<double>(ev.t_prime);
  return ev;
}

bool more_general_or_equal(const CFD& c1, const CFD& c2) {
  if (c1.rhs != c2.rhs || c1.rhs_cell() != c2.rhs_cell()) return false;
  for (std::size_t i = 0; i < c1.lhs.size(); ++i) {
    auto it = std::find(c2.lhs.begin(), c2.lhs.end(), c1.lhs[i]);
    if (it == c2.lhs.end()) return false;
    const PatternCell& p1 = c1.lhs_cell(i);
    const PatternCell& p2 = c2.lhs_cell(it - c2.lhs.begin());
    if (p1.is_const() && p1 != p2) return false;
  }
  return true;
}

GroupEvaluator::GroupEvaluator(const std::vector<Tuple>& group,
                               const Schema& schema, DiscoveryParams params)
    : group_(group), schema_(schema), params_(std::move(params)) {
  params_.validate();
}

const RuleEval& GroupEvaluator::eval(const CFD& c) {
  auto it = cache_.find(c);
  if (it == cache_.end())
    it = cache_.emplace(c, evaluate_rule(c, group_, schema_, params_.e)).first;
  return it->second;
}

bool GroupEvaluator::valid(const CFD& c) {
  return rule_valid(eval(c), params_);
}

bool GroupEvaluator::left_reduced(const CFD& c) {
  // Try every strict generalization: drop an LHS attribute, or relax a
  // constant LHS cell to a wildcard. The RHS cell stays fixed.
  std::size_t n = c.lhs.size();
  std::vector<int> state(n);  // 0 drop, 1 keep, 2 relax
  bool reducible = false;
  std::function<void(std::size_t, bool)> rec = [&](std::size_t pos,
                                                   bool changed) {
    if (reducible) return;
    if (pos == n) {
      if (!changed) return;
      CFD g;
      for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == 0) continue;
        g.lhs.push_back(c.lhs[i]);
        g.pattern.push_back(state[i] == 1 ? c.lhs_cell(i)
                                          : PatternCell::wildcard());
      }
      if (g.lhs.empty()) return;
      g.rhs = c.rhs;
      g.pattern.push_back(c.rhs_cell());
      if (valid(g)) reducible = true;
      return;
    }
    for (int s : {1, 0, 2}) {
      if (s == 2 && !c.lhs_cell(pos).is_const()) continue;
      state[pos] = s;
      rec(pos + 1, changed || s != 1);
      if (reducible) return;
    }
  };
  rec(0, false);
  return !reducible;
}

SupportIndex::SupportIndex(const std::vector<Tuple>& group,
                           const Schema& schema, std::size_t max_level)
    : schema_(schema), max_level_(max_level) {
  check_arity(schema);
  std::vector<std::pair<int, std::string>> present;
  std::vector<std::pair<int, std::string>> combo;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    ++counts_[combo];
    if (combo.size() == max_level_) return;
    for (std::size_t i = start; i < present.size(); ++i) {
      combo.push_back(present[i]);
      rec(i + 1);
      combo.pop_back();
    }
  };
  for (const Tuple& t : group) {
    present.clear();
    for (std::size_t i = 0; i < t.cells.size(); ++i)
      if (t.cells[i].has_value())
        present.emplace_back(static_cast<int>(i), *t.cells[i]);
    combo.clear();
    rec(0);
  }
}

std::uint64_t SupportIndex::support(
    const std::vector<std::pair<std::string, std::string>>& items) const {
  if (items.size() > max_level_)
    throw std::invalid_argument("support query above indexed level");
  std::vector<std::pair<int, std::string>> key;
  for (const auto& [name, value] : items) {
    int i = schema_.index_of(name);
    if (i < 0) throw std::invalid_argument("unknown attribute: " + name);
    key.emplace_back(i, value);
  }
  std::sort(key.begin(), key.end());
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t DifferenceSet::uncovered(std::uint64_t x_mask) const {
  std::size_t n = 0;
  for (std::uint64_t m : agree_masks)
    if ((m & x_mask) == x_mask) ++n;
  return n;
}

DifferenceSet build_difference_set(const std::vector<Tuple>& group,
                                   const Schema& schema,
                                   const std::string& rhs_attr, double e) {
  check_arity(schema);
  int ri = schema.index_of(rhs_attr);
  if (ri < 0) throw std::invalid_argument("unknown attribute: " + rhs_attr);
  DifferenceSet d;
  d.rhs = ri;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Cell& a = group[i].cells[ri];
    if (!a.has_value()) continue;
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      const Cell& b = group[j].cells[ri];
      if (!b.has_value() || *a == *b) continue;
      if (string_similarity(*a, *b) > e) continue;  // tolerated, no evidence
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k < schema.arity(); ++k) {
        const Cell& x = group[i].cells[k];
        const Cell& y = group[j].cells[k];
        if (x.has_value() && y.has_value() && *x == *y) mask |= 1ULL << k;
      }
      d.agree_masks.push_back(mask);
    }
  }
  return d;
}

std::vector<MinedRule> bctane(const std::vector<Tuple>& group,
                              const Schema& schema,
                              const DiscoveryParams& params) {
  params.validate();
  check_arity(schema);
  std::size_t r = schema.arity();
  Found found;
  std::size_t top = std::min(params.max_lhs, r > 0 ? r - 1 : 0);
  for (std::size_t level = 1; level <= top; ++level)
    for_each_combo(r, level, [&](const std::vector<int>& X) {
      mine_x(group, schema, X, params, true, -1, found);
    });
  return reduce_and_sort(found);
}

std::vector<MinedRule> bfcfd(const std::vector<Tuple>& group,
                             const Schema& schema,
                             const DiscoveryParams& params) {
  params.validate();
  check_arity(schema);
  std::size_t r = schema.arity();
  Found found;
  // Difference sets are quadratic in the group size; above this they stop
  // paying for themselves as an ordering heuristic.
  constexpr std::size_t kDiffSetCap = 600;
  for (int a = 0; a < static_cast<int>(r); ++a) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(r); ++i)
      if (i != a) order.push_back(i);
    if (group.size() <= kDiffSetCap) {
      DifferenceSet d =
          build_difference_set(group, schema, schema.attributes[a], params.e);
      // Visit the attributes that separate the most disagreeing pairs first.
      std::vector<std::size_t> power(r, 0);
      for (std::uint64_t m : d.agree_masks)
        for (int i : order)
          if (!(m >> i & 1)) ++power[i];
      std::stable_sort(order.begin(), order.end(),
                       [&](int x, int y) { return power[x] > power[y]; });
    }
    std::vector<int> X;
    std::function<void(std::size_t)> dfs = [&](std::size_t start) {
      for (std::size_t i = start; i < order.size(); ++i) {
        X.push_back(order[i]);
        std::vector<int> sorted_x = X;
        std::sort(sorted_x.begin(), sorted_x.end());
        mine_x(group, schema, sorted_x, params, true, a, found);
        if (X.size() < params.max_lhs) dfs(i + 1);
        X.pop_back();
      }
    };
    dfs(0);
  }
  return reduce_and_sort(found);
}

std::vector<MinedRule> bcfdm(const std::vector<Tuple>& group,
                             const Schema& schema,
                             const DiscoveryParams& params) {
  params.validate();
  check_arity(schema);
  std::size_t r = schema.arity();
  std::size_t top = std::min(params.max_lhs, r > 0 ? r - 1 : 0);
  SupportIndex index(group, schema, top);
  Found found;
  for (std::size_t level = 1; level <= top; ++level)
    for_each_combo(r, level, [&](const std::vector<int>& X) {
      std::vector<int> elig;
      for (std::size_t i = 0; i < group.size(); ++i) {
        bool ok = true;
        for (int x : X)
          if (!group[i].cells[x].has_value()) {
            ok = false;
            break;
          }
        if (ok) elig.push_back(static_cast<int>(i));
      }
      if (elig.size() < params.min_support) return;
      std::map<std::vector<std::string>, std::vector<int>> classes;
      for (int ti : elig) {
        std::vector<std::string> key;
        for (int x : X) key.push_back(*group[ti].cells[x]);
        classes[std::move(key)].push_back(ti);
      }
      for (const auto& [key, members] : classes) {
        if (members.size() < params.min_support) continue;
        if (X.size() >= 2) {
          // Non-free item sets have an equal-support proper subset; every
          // rule they would mint is reducible onto that subset.
          bool free_set = true;
          for (std::size_t skip = 0; skip < X.size() && free_set; ++skip) {
            std::vector<std::pair<std::string, std::string>> items;
            for (std::size_t j = 0; j < X.size(); ++j)
              if (j != skip)
                items.emplace_back(schema.attributes[X[j]], key[j]);
            if (index.support(items) == members.size()) free_set = false;
          }
          if (!free_set) continue;
        }
        for (int a = 0; a < static_cast<int>(r); ++a) {
          if (std::find(X.begin(), X.end(), a) != X.end()) continue;
          ValueStats all;
          for (int ti : members) {
            const Cell& rc = group[ti].cells[a];
            if (!rc.has_value())
              ++all.missing;
            else
              ++all.counts[*rc];
          }
          for (const auto& [val, cnt] : all.counts) {
            RuleEval ev;
            ev.t_prime = members.size();
            accumulate_const(all, val, params.e, ev);
            ev.u = static_cast<double>(ev.u_prime) /
                   static_cast<double>(ev.t_prime);
            if (!rule_valid(ev, params)) continue;
            CFD c;
            for (std::size_t j = 0; j < X.size(); ++j) {
              c.lhs.push_back(schema.attributes[X[j]]);
              c.pattern.push_back(PatternCell::constant(key[j]));
            }
            c.rhs = schema.attributes[a];
            c.pattern.push_back(PatternCell::constant(val));
            found.emplace(std::move(c), ev);
          }
        }
      }
    });

  bool complete_group = std::all_of(group.begin(), group.end(),
                                    [](const Tuple& t) { return is_complete(t); });
  if (complete_group) return reduce_and_sort(found);

  // With missing values around, generalizations that relax a cell to a
  // wildcard are not equivalent to dropping the attribute; fall back to
  // direct evaluation of every generalization.
  GroupEvaluator ev(group, schema, params);
  std::vector<MinedRule> out;
  for (const auto& [c, stats] : found)
    if (ev.left_reduced(c)) out.push_back({c, stats});
  std::sort(out.begin(), out.end(), [](const MinedRule& a, const MinedRule& b) {
    return format_cfd(a.cfd) < format_cfd(b.cfd);
  });
  return out;
}

DiscoveryPlan dfcfd_plan(std::size_t arity, std::uint64_t source_tuples) {
  DiscoveryPlan plan;
  plan.use_bcfdm = true;
  if (arity <= 17 && source_tuples > 1000000)
    plan.use_bctane = true;
  else
    plan.use_bfcfd = true;
  return plan;
}

std::vector<std::vector<MinedRule>> dfcfd(const SampleGroups& groups,
                                          const Schema& schema,
                                          const DiscoveryParams& params,
                                          std::uint64_t source_tuples) {
  DiscoveryPlan plan = dfcfd_plan(schema.arity(), source_tuples);
  std::vector<std::vector<MinedRule>> out;
  for (const auto& group : groups.groups) {
    std::vector<MinedRule> merged;
    std::unordered_map<CFD, bool, CfdHash> seen;
    auto add = [&](std::vector<MinedRule> rules) {
      for (auto& rule : rules)
        if (seen.emplace(rule.cfd, true).second)
          merged.push_back(std::move(rule));
    };
    if (plan.use_bctane) add(bctane(group, schema, params));
    if (plan.use_bfcfd) add(bfcfd(group, schema, params));
    if (plan.use_bcfdm) add(bcfdm(group, schema, params));
    std::sort(merged.begin(), merged.end(),
              [](const MinedRule& a, const MinedRule& b) {
                return format_cfd(a.cfd) < format_cfd(b.cfd);
              });
    out.push_back(std::move(merged));
  }
  return out;
}

}  // namespace cfdm
