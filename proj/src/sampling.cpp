#include "cfdm/sampling.hpp"

#include <algorithm>
#include <stdexcept>

#include "cfdm/rng.hpp"

namespace cfdm {

void SamplingParams::validate(std::size_t arity) const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  if (b_lo < 1 || b_lo >= b)
    throw std::invalid_argument("need 1 <= b_lo < b");
  if (b > arity)
    throw std::invalid_argument("b must not exceed the arity");
}

namespace {

std::size_t cmp_counted(const Tuple& a, const Tuple& b, SamplingStats& stats) {
  stats.comparisons += a.cells.size();
  return cmp(a, b);
}

struct Match {
  int group = -1;  // first group with a member at similarity >= b
  bool label = false;  // some compared member reached >= b_lo
};

// Scans groups in index order; stops at the first level-b match. The b_lo
// label is collected from everything compared up to that point.
Match find_match(const Tuple& t, const std::vector<std::vector<Tuple>>& groups,
                 std::size_t b, std::size_t b_lo, SamplingStats& stats) {
  Match res;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const Tuple& s : groups[g]) {
      std::size_t c = cmp_counted(t, s, stats);
      if (c >= b) {
        res.group = static_cast<int>(g);
        return res;
      }
      if (c >= b_lo) res.label = true;
    }
  }
  return res;
}

}  // namespace

bool is_misleading(const Tuple& t, const std::vector<Tuple>& reference,
                   std::size_t b_lo) {
  if (!is_complete(t)) return true;
  for (const Tuple& s : reference)
    if (cmp(t, s) >= b_lo) return false;
  return true;
}

std::vector<Tuple> frrsc(TupleStream& data, const SamplingParams& params,
                         SamplingStats& stats) {
  params.validate(data.schema().arity());
  Rng rng = Rng(params.seed).split(1);
  std::vector<Tuple> group;
  group.reserve(params.m);
  std::uint64_t q = 0;  // similar complete tuples seen, seeds included
  std::uint64_t complete_seen = 0;
  Tuple t;
  while (data.next(t)) {
    ++stats.tuples_scanned;
    if (!is_complete(t)) {
      ++stats.rejected_incomplete;
      continue;
    }
    ++complete_seen;
    if (group.size() < params.m) {
      group.push_back(t);
      ++q;
      continue;
    }
    bool similar = false;
    for (const Tuple& s : group)
      if (cmp_counted(t, s, stats) >= params.b_lo) {
        similar = true;
        break;
      }
    if (!similar) {
      ++stats.rejected_special;
      continue;
    }
    ++q;
    std::uint64_t k = rng.range(1, q);
    if (k <= params.m) group[k - 1] = t;
  }
  ++stats.passes;
  if (group.size() < params.m)
    throw std::runtime_error("frrsc: need " + std::to_string(params.m) +
                             " complete tuples, found " +
                             std::to_string(complete_seen));
  return group;
}

std::optional<std::vector<Tuple>> trrsc(TupleStream& data,
                                        const SampleGroups& prior,
                                        const SamplingParams& params,
                                        SamplingStats& stats,
                                        std::vector<Tuple>* candidate) {
  params.validate(data.schema().arity());
  if (prior.groups.empty())
    throw std::invalid_argument("trrsc: prior groups required");
  Rng rng = Rng(params.seed).split(2);
  std::vector<Tuple> group;
  std::uint64_t q = 0;
  Tuple t;
  while (data.next(t)) {
    ++stats.tuples_scanned;
    if (!is_complete(t)) {
      ++stats.rejected_incomplete;
      continue;
    }
    // A candidate belongs to a new kind: near some prior sample (>= b_lo)
    // but not inside any prior kind (<= b everywhere).
    bool near = false, covered = false;
    for (const auto& pg : prior.groups) {
      for (const Tuple& s : pg) {
        std::size_t c = cmp_counted(t, s, stats);
        if (c > params.b) {
          covered = true;
          break;
        }
        if (c >= params.b_lo) near = true;
      }
      if (covered) break;
    }
    if (covered) continue;
    if (!near) {
      ++stats.rejected_special;
      continue;
    }
    if (group.empty()) {
      group.push_back(t);
      q = 1;
      continue;
    }
    bool match = false;
    for (const Tuple& s : group)
      if (cmp_counted(t, s, stats) >= params.b) {
        match = true;
        break;
      }
    if (!match) continue;  // a different new kind; later rounds may take it
    ++q;
    if (group.size() < params.m) {
      group.push_back(t);
    } else {
      std::uint64_t k = rng.range(1, q);
      if (k <= params.m) group[k - 1] = t;
    }
  }
  ++stats.passes;
  if (candidate) *candidate = group;
  if (q <= params.m) return std::nullopt;
  return group;
}

SampleGroups brrsc(TupleStream& data, const SamplingParams& params,
                   SamplingStats& stats) {
  params.validate(data.schema().arity());
  Rng base(params.seed);
  Rng rng_fill = base.split(1);
  Rng rng_stream = base.split(2);

  SampleGroups out;
  Tuple t;

  // T[1] is seeded with the first m complete tuples; each seed counts itself
  // as a similar tuple, so q[1] starts at m.
  std::vector<Tuple> first;
  first.reserve(params.m);
  std::uint64_t complete_seen = 0;
  while (first.size() < params.m && data.next(t)) {
    ++stats.tuples_scanned;
    if (!is_complete(t)) {
      ++stats.rejected_incomplete;
      continue;
    }
    ++complete_seen;
    first.push_back(t);
  }
  if (first.size() < params.m) {
    ++stats.passes;
    throw std::runtime_error("brrsc: need " + std::to_string(params.m) +
                             " complete tuples, found " +
                             std::to_string(complete_seen));
  }
  out.groups.push_back(std::move(first));
  out.q.push_back(params.m);
  std::uint64_t scanned = params.m;  // complete tuples seen so far

  while (data.next(t)) {
    ++stats.tuples_scanned;
    if (!is_complete(t)) {
      ++stats.rejected_incomplete;
      continue;
    }
    ++scanned;
    bool filling = false;
    for (std::uint64_t qi : out.q)
      if (qi < params.m) {
        filling = true;
        break;
      }

    if (!filling) {
      // All reservoirs are full: draw first, compare only when the draw
      // could land in a reservoir slot.
      std::uint64_t k = rng_stream.range(1, scanned);
      if (k > out.n() * params.m) continue;
      Match mt = find_match(t, out.groups, params.b, params.b_lo, stats);
      if (mt.group >= 0) {
        ++out.q[mt.group];
        out.groups[mt.group][(k - 1) % params.m] = t;
      } else if (mt.label && out.n() < params.n_max) {
        out.groups.push_back({t});
        out.q.push_back(1);
      } else {
        ++stats.rejected_special;
      }
      continue;
    }

    Match mt = find_match(t, out.groups, params.b, params.b_lo, stats);
    if (mt.group >= 0) {
      auto g = static_cast<std::size_t>(mt.group);
      if (out.q[g] < params.m) {
        out.groups[g].push_back(t);
        ++out.q[g];
      } else {
        ++out.q[g];
        std::uint64_t k = rng_fill.range(1, out.q[g]);
        if (k <= params.m) out.groups[g][k - 1] = t;
      }
    } else if (mt.label && out.n() < params.n_max) {
      out.groups.push_back({t});
      out.q.push_back(1);
    } else {
      ++stats.rejected_special;
    }
  }
  ++stats.passes;

  // Underfilled kinds are abandoned.
  SampleGroups kept;
  for (std::size_t i = 0; i < out.n(); ++i) {
    if (out.q[i] >= params.m) {
      kept.groups.push_back(std::move(out.groups[i]));
      kept.q.push_back(out.q[i]);
    } else {
      ++stats.groups_dropped;
    }
  }
  return kept;
}

}  // namespace cfdm
