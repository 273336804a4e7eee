#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfdm/cfd.hpp"
#include "cfdm/discovery.hpp"
#include "cfdm/relation.hpp"

namespace cfdm {

/// Support thresholds r_1 < r_2 < ... < r_L used to bracket the supporter
/// count of a variable rule; the last rank is floor(n / 2).
struct RankLadder {
  std::vector<std::uint64_t> ranks;

  /// Throws unless ranks are strictly increasing and nonempty.
  void validate() const;
};

/// Doubling ladder for a group of n samples: each rank is roughly half the
/// next, floored at 2. make_ladder(100) = (2, 4, 7, 13, 25, 50).
RankLadder make_ladder(std::uint64_t n);

/// Exact count of tuples fully satisfying a constant rule.
std::uint64_t weight_constant(const CFD& c, const std::vector<Tuple>& group,
                              const Schema& schema);

/// Re-mines the group at a given min-support threshold.
using MinerFn =
    std::function<std::vector<MinedRule>(std::uint64_t min_support)>;

/// Brackets a variable rule's supporter count: if the rule is mined at rank
/// r_i but not at r_{i+1}, the weight is int((r_i + r_{i+1}) / 2); a rule
/// surviving the final rank weighs ceil(0.8 * n). Absent even at r_1 yields
/// weight 0 with a warning on stderr.
std::uint64_t weight_variable(const CFD& c, std::uint64_t n,
                              const RankLadder& ladder, const MinerFn& miner);

/// Batch form: runs the miner once per rank, not once per rule.
std::unordered_map<CFD, std::uint64_t, CfdHash> weight_variables(
    const std::vector<CFD>& rules, std::uint64_t n, const RankLadder& ladder,
    const MinerFn& miner);

/// True iff the two rules can disagree on the same data. Symmetric;
/// conflict_pair(c, c) is false. Rules with different RHS attributes or
/// disjoint LHS attribute sets never conflict.
bool conflict_pair(const CFD& c1, const CFD& c2);

/// Two or more constant rules jointly contradicting one variable rule.
struct MergedConflict {
  std::vector<CFD> members;  // the constant rules, in input order
};

/// Tests whether the constant rules pin down an attribute the variable rule
/// leaves free while disagreeing among themselves on the RHS value. All
/// rules must share the variable rule's RHS attribute.
std::optional<MergedConflict> conflict_multi(const CFD& v,
                                             const std::vector<CFD>& consts);

struct WeightedRule {
  CFD cfd;
  std::uint64_t weight = 0;
};

struct WeightedNode {
  enum class Kind { Single, Merged };
  Kind kind = Kind::Single;
  std::vector<CFD> members;  // one rule for Single, two or more for Merged
  std::uint64_t weight = 0;
};

struct ConflictGraph {
  std::vector<WeightedNode> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // first < second
};

/// Builds the weighted conflict graph: merged nodes from conflict_multi
/// (each constant rule joins at most one merged node), then pairwise edges
/// from conflict_pair, with edges to consumed constants redirected to their
/// merged node. No self-loops; merged weight is the sum of member weights.
ConflictGraph build_graph(const std::vector<WeightedRule>& rules);

struct MwidStats {
  std::size_t rounds = 0;
};

/// Randomized maximal weight independent set over the conflict graph.
/// Synchronous rounds: on each edge the heavier endpoint receives a draw
/// from (0.5, 1] and the lighter from [0, 0.5) (equal weights: both 0.5);
/// a node enters when its weighted draw beats every live neighbor's on the
/// shared edge, with ties resolved toward the lower node index. Entered
/// nodes and their neighbors leave the graph until none remain. Returns
/// node indices, ascending.
std::vector<std::size_t> mwid(const ConflictGraph& g, std::uint64_t seed,
                              MwidStats* stats = nullptr);

/// mwid output expanded to rules: merged nodes contribute all members.
std::vector<CFD> mwid_rules(const ConflictGraph& g, std::uint64_t seed,
                            MwidStats* stats = nullptr);

/// GraphViz rendering of the conflict graph for inspection.
std::string to_dot(const ConflictGraph& g);

}  // namespace cfdm
