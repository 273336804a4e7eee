#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfdm/relation.hpp"

namespace cfdm {

struct SamplingParams {
  std::size_t m = 4000;     // tuples per group
  std::size_t b = 9;        // upper similarity bound (same-attribute count)
  std::size_t b_lo = 4;     // lower popularity bound
  std::size_t n_max = 32;   // maximum group count
  std::uint64_t seed = 0;

  /// Throws unless 1 <= b_lo < b <= arity, m >= 1, n_max >= 2. The tuning
  /// module owns the stricter 2 < b' < b < 15 requirement block.
  void validate(std::size_t arity) const;
};

struct SampleGroups {
  std::vector<std::vector<Tuple>> groups;  // T[1..n], each <= m tuples
  std::vector<std::uint64_t> q;            // similar-tuple counters

  std::size_t n() const { return groups.size(); }
};

struct SamplingStats {
  std::uint64_t comparisons = 0;     // attribute comparisons performed
  std::uint64_t tuples_scanned = 0;  // stream tuples read, complete or not
  std::uint64_t passes = 0;
  std::uint64_t rejected_incomplete = 0;
  std::uint64_t rejected_special = 0;
  std::uint64_t groups_dropped = 0;
};

/// A tuple is misleading when it is incomplete or shares fewer than b_lo
/// attribute values with every reference tuple.
bool is_misleading(const Tuple& t, const std::vector<Tuple>& reference,
                   std::size_t b_lo);

/// First-group sampler: seeds with the first m complete tuples, then
/// reservoir-replaces among tuples similar (>= b_lo) to the group.
/// Throws if fewer than m complete tuples exist.
std::vector<Tuple> frrsc(TupleStream& data, const SamplingParams& params,
                         SamplingStats& stats);

/// One further group beyond `prior`: candidates must share >= b_lo with a
/// prior sample, <= b with every prior sample, and >= b with the growing
/// group. Returns nullopt (STOP) when the end-of-data similar count q <= m;
/// `candidate`, when given, receives the group that was built even if it is
/// discarded by the STOP rule.
std::optional<std::vector<Tuple>> trrsc(TupleStream& data,
                                        const SampleGroups& prior,
                                        const SamplingParams& params,
                                        SamplingStats& stats,
                                        std::vector<Tuple>* candidate = nullptr);

/// One-pass sampler building all groups in a single scan. Groups whose final
/// q is below m are dropped from the result.
SampleGroups brrsc(TupleStream& data, const SamplingParams& params,
                   SamplingStats& stats);

}  // namespace cfdm
