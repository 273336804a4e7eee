#include "cfdm/cfd.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace cfdm {

void CFD::validate() const {
  if (lhs.empty()) throw std::invalid_argument("CFD with empty LHS");
  if (pattern.size() != lhs.size() + 1)
    throw std::invalid_argument("CFD pattern length must be |X| + 1");
  for (const auto& a : lhs)
    if (a == rhs)
      throw std::invalid_argument("trivial CFD: RHS " + rhs + " appears in LHS");
  for (const auto& cell : pattern)
    if (cell.is_const() && cell.value->empty())
      throw std::invalid_argument("empty constant in pattern");
}

std::size_t CfdHash::operator()(const CFD& c) const {
  std::size_t h = std::hash<std::string>{}(c.rhs);
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& a : c.lhs) mix(std::hash<std::string>{}(a));
  for (const auto& p : c.pattern)
    mix(p.is_const() ? std::hash<std::string>{}(*p.value) : 0x5bd1e995u);
  return h;
}

namespace {

std::vector<int> lhs_indices(const CFD& c, const Schema& schema) {
  std::vector<int> idx;
  idx.reserve(c.lhs.size());
  for (const auto& a : c.lhs) {
    int i = schema.index_of(a);
    if (i < 0) throw std::invalid_argument("unknown attribute: " + a);
    idx.push_back(i);
  }
  return idx;
}

int rhs_index(const CFD& c, const Schema& schema) {
  int i = schema.index_of(c.rhs);
  if (i < 0) throw std::invalid_argument("unknown attribute: " + c.rhs);
  return i;
}

bool matches_lhs_at(const Tuple& t, const CFD& c, const std::vector<int>& idx) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Cell& cell = t.cells[idx[k]];
    if (!cell.has_value()) return false;
    const PatternCell& p = c.lhs_cell(k);
    if (p.is_const() && *p.value != *cell) return false;
  }
  return true;
}

}  // namespace

bool matches_lhs(const Tuple& t, const CFD& c, const Schema& schema) {
  return matches_lhs_at(t, c, lhs_indices(c, schema));
}

Confidence confidence(const CFD& c, const Relation& rel) {
  c.validate();
  Confidence conf;
  if (rel.tuples.empty()) return conf;
  auto idx = lhs_indices(c, rel.schema);
  int ri = rhs_index(c, rel.schema);

  if (c.kind() == CfdKind::Constant) {
    for (const auto& t : rel.tuples) {
      if (!matches_lhs_at(t, c, idx)) continue;
      ++conf.t_prime;
      const Cell& rc = t.cells[ri];
      if (rc.has_value() && *rc == *c.rhs_cell().value) ++conf.u_prime;
    }
  } else {
    // Group LHS matches by their LHS values; the largest same-RHS subgroup
    // (over present RHS cells) supports the rule.
    std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>>
        groups;
    for (const auto& t : rel.tuples) {
      if (!matches_lhs_at(t, c, idx)) continue;
      ++conf.t_prime;
      std::vector<std::string> key;
      key.reserve(idx.size());
      for (int i : idx) key.push_back(*t.cells[i]);
      const Cell& rc = t.cells[ri];
      if (rc.has_value()) ++groups[std::move(key)][*rc];
    }
    for (const auto& [key, counts] : groups) {
      std::uint64_t best = 0;
      for (const auto& [v, n] : counts) best = std::max(best, n);
      conf.u_prime += best;
    }
  }
  if (conf.t_prime > 0)
    conf.u = static_cast<double>(conf.u_prime) / static_cast<double>(conf.t_prime);
  return conf;
}

std::vector<std::size_t> violations(const std::vector<CFD>& rules,
                                    const Relation& rel) {
  std::set<std::size_t> bad;
  for (const auto& c : rules) {
    c.validate();
    auto idx = lhs_indices(c, rel.schema);
    int ri = rhs_index(c, rel.schema);
    if (c.kind() == CfdKind::Constant) {
      for (std::size_t i = 0; i < rel.tuples.size(); ++i) {
        const Tuple& t = rel.tuples[i];
        if (!matches_lhs_at(t, c, idx)) continue;
        const Cell& rc = t.cells[ri];
        if (rc.has_value() && *rc != *c.rhs_cell().value) bad.insert(i);
      }
    } else {
      std::map<std::vector<std::string>,
               std::map<std::string, std::vector<std::size_t>>>
          groups;
      for (std::size_t i = 0; i < rel.tuples.size(); ++i) {
        const Tuple& t = rel.tuples[i];
        if (!matches_lhs_at(t, c, idx)) continue;
        const Cell& rc = t.cells[ri];
        if (!rc.has_value()) continue;
        std::vector<std::string> key;
        for (int k : idx) key.push_back(*t.cells[k]);
        groups[std::move(key)][*rc].push_back(i);
      }
      for (const auto& [key, byval] : groups) {
        // Keep the largest subgroup; among equal sizes the first value in
        // order wins, so runs are reproducible.
        std::size_t best = 0;
        for (const auto& [v, members] : byval)
          best = std::max(best, members.size());
        bool kept = false;
        for (const auto& [v, members] : byval) {
          if (!kept && members.size() == best) {
            kept = true;
            continue;
          }
          for (std::size_t i : members) bad.insert(i);
        }
      }
    }
  }
  return {bad.begin(), bad.end()};
}

namespace {

std::string_view trim_view(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.emplace_back(trim_view(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

CFD parse_cfd(std::string_view text) {
  std::string_view s = trim_view(text);
  auto fail = [&](const std::string& msg, std::size_t pos) -> CFD {
    throw CfdParseError(msg, pos);
  };

  if (s.empty() || s.front() != '[') return fail("expected '['", 0);
  std::size_t close = s.find(']');
  if (close == std::string_view::npos) return fail("expected ']'", s.size());
  CFD c;
  c.lhs = split_commas(s.substr(1, close - 1));
  if (c.lhs.size() == 1 && c.lhs[0].empty()) c.lhs.clear();

  std::size_t arrow = s.find("->", close);
  if (arrow == std::string_view::npos) return fail("expected '->'", close);
  std::size_t colon = s.find(':', arrow);
  if (colon == std::string_view::npos) return fail("expected ':'", arrow);
  c.rhs = std::string(trim_view(s.substr(arrow + 2, colon - arrow - 2)));
  if (c.rhs.empty()) return fail("empty RHS attribute", arrow + 2);

  std::string_view rest = trim_view(s.substr(colon + 1));
  if (rest.empty() || rest.front() != '(' || rest.back() != ')')
    return fail("expected '(...)' pattern", colon + 1);
  std::string_view body = rest.substr(1, rest.size() - 2);
  std::size_t sep = body.find("||");
  if (sep == std::string_view::npos) return fail("expected '||'", colon + 1);

  auto cellify = [](const std::string& tok) {
    return tok == "_" ? PatternCell::wildcard() : PatternCell::constant(tok);
  };
  std::vector<std::string> lhs_pats = split_commas(body.substr(0, sep));
  if (lhs_pats.size() == 1 && lhs_pats[0].empty()) lhs_pats.clear();
  if (lhs_pats.size() != c.lhs.size())
    return fail("pattern count does not match LHS attribute count", colon + 1);
  for (const auto& p : lhs_pats) c.pattern.push_back(cellify(p));
  std::string rhs_pat{trim_view(body.substr(sep + 2))};
  if (rhs_pat.empty()) return fail("empty RHS pattern cell", s.size());
  c.pattern.push_back(cellify(rhs_pat));

  c.validate();
  return c;
}

std::string format_cfd(const CFD& c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.lhs.size(); ++i) {
    if (i) out += ",";
    out += c.lhs[i];
  }
  out += "] -> " + c.rhs + " : (";
  for (std::size_t i = 0; i < c.lhs.size(); ++i) {
    if (i) out += ",";
    out += c.lhs_cell(i).is_const() ? *c.lhs_cell(i).value : "_";
  }
  out += " || ";
  out += c.rhs_cell().is_const() ? *c.rhs_cell().value : "_";
  out += ")";
  return out;
}

double string_similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[m]);
  return 1.0 - dist / static_cast<double>(std::max(n, m));
}

}  // namespace cfdm
