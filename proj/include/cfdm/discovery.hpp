#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "cfdm/cfd.hpp"
#include "cfdm/relation.hpp"
#include "cfdm/sampling.hpp"

namespace cfdm {

struct DiscoveryParams {
  double e = 0.9;              // confidence threshold
  std::size_t min_support = 2;  // absolute supporter floor
  std::size_t max_lhs = 5;      // LHS size cap

  /// Throws unless 0.5 < e < 1, min_support >= 1, max_lhs >= 1.
  void validate() const;
};

/// Tolerant and exact statistics of one rule over one sample group.
struct RuleEval {
  std::uint64_t t_prime = 0;     // tuples matching the LHS pattern
  std::uint64_t u_prime = 0;     // tolerant satisfaction count
  std::uint64_t supporters = 0;  // exact full-satisfaction count
  double u = 0.0;                // u_prime / t_prime

  bool operator==(const RuleEval&) const = default;
};

/// Evaluates c over the group with tolerance threshold e: a tuple whose RHS
/// cell is missing, or whose RHS value has normalized similarity above e to
/// the expected value, counts toward u_prime. Supporters stay exact.
RuleEval evaluate_rule(const CFD& c, const std::vector<Tuple>& group,
                       const Schema& schema, double e);

bool rule_valid(const RuleEval& ev, const DiscoveryParams& params);

/// True iff c1 is more general than or equal to c2: same RHS attribute and
/// RHS pattern cell, LHS attributes a subset, and each shared LHS cell equal
/// or relaxed to a wildcard.
bool more_general_or_equal(const CFD& c1, const CFD& c2);

/// Cached evaluation over one group; also answers left-reduction queries by
/// checking every strict generalization of a rule for validity.
class GroupEvaluator {
 public:
  GroupEvaluator(const std::vector<Tuple>& group, const Schema& schema,
                 DiscoveryParams params);

  const RuleEval& eval(const CFD& c);
  bool valid(const CFD& c);
  bool left_reduced(const CFD& c);

 private:
  const std::vector<Tuple>& group_;
  const Schema& schema_;
  DiscoveryParams params_;
  std::unordered_map<CFD, RuleEval, CfdHash> cache_;
};

/// Supporter counts for every (attribute set, value combination) up to
/// max_level, over one sample group.
class SupportIndex {
 public:
  SupportIndex(const std::vector<Tuple>& group, const Schema& schema,
               std::size_t max_level);

  /// items: (attribute name, value) pairs, any order, distinct attributes.
  std::uint64_t support(
      const std::vector<std::pair<std::string, std::string>>& items) const;

  std::size_t max_level() const { return max_level_; }

 private:
  const Schema& schema_;
  std::size_t max_level_;
  std::map<std::vector<std::pair<int, std::string>>, std::uint64_t> counts_;
};

/// Evidence for one RHS attribute: one agreement bitmask per pair of tuples
/// that disagree on the RHS (present on both sides and not tolerantly
/// similar). Bit i is set when the pair agrees on attribute i.
struct DifferenceSet {
  int rhs = -1;
  std::vector<std::uint64_t> agree_masks;

  bool empty() const { return agree_masks.empty(); }
  /// Pairs that x_mask fails to separate (every attribute of x_mask agrees).
  std::size_t uncovered(std::uint64_t x_mask) const;
};

DifferenceSet build_difference_set(const std::vector<Tuple>& group,
                                   const Schema& schema,
                                   const std::string& rhs_attr, double e);

struct MinedRule {
  CFD cfd;
  RuleEval eval;

  bool operator==(const MinedRule&) const = default;
};

/// Level-wise lattice miner. Emits every valid, left-reduced CFD with LHS
/// size up to max_lhs; output sorted by formatted rule text.
std::vector<MinedRule> bctane(const std::vector<Tuple>& group,
                              const Schema& schema,
                              const DiscoveryParams& params);

/// Depth-first miner driven by per-attribute difference sets. Same output
/// contract as bctane.
std::vector<MinedRule> bfcfd(const std::vector<Tuple>& group,
                             const Schema& schema,
                             const DiscoveryParams& params);

/// Free-itemset miner; constant rules only (all pattern cells constant).
std::vector<MinedRule> bcfdm(const std::vector<Tuple>& group,
                             const Schema& schema,
                             const DiscoveryParams& params);

struct DiscoveryPlan {
  bool use_bctane = false;
  bool use_bfcfd = false;
  bool use_bcfdm = true;

  bool operator==(const DiscoveryPlan&) const = default;
};

/// Lattice search only pays off on narrow, high-volume sources.
DiscoveryPlan dfcfd_plan(std::size_t arity, std::uint64_t source_tuples);

/// Runs the planned miners per group and unions their outputs per group
/// with duplicate elimination.
std::vector<std::vector<MinedRule>> dfcfd(const SampleGroups& groups,
                                          const Schema& schema,
                                          const DiscoveryParams& params,
                                          std::uint64_t source_tuples);

}  // namespace cfdm
