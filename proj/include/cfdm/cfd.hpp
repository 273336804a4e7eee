#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfdm/relation.hpp"

namespace cfdm {

/// One pattern-tuple cell: a constant value or the wildcard "_".
struct PatternCell {
  std::optional<std::string> value;  // nullopt = wildcard

  static PatternCell wildcard() { return {}; }
  static PatternCell constant(std::string v) { return {std::move(v)}; }

  bool is_const() const { return value.has_value(); }
  bool operator==(const PatternCell&) const = default;
};

enum class CfdKind { Constant, Variable };

/// A conditional functional dependency (X -> A, t_P). The pattern holds one
/// cell per LHS attribute followed by the RHS cell.
struct CFD {
  std::vector<std::string> lhs;
  std::string rhs;
  std::vector<PatternCell> pattern;  // lhs.size() + 1 cells, RHS last

  const PatternCell& lhs_cell(std::size_t i) const { return pattern[i]; }
  const PatternCell& rhs_cell() const { return pattern.back(); }

  CfdKind kind() const {
    return rhs_cell().is_const() ? CfdKind::Constant : CfdKind::Variable;
  }

  /// Throws on trivial rules (A in X), empty LHS, or pattern length mismatch.
  void validate() const;

  bool operator==(const CFD&) const = default;
};

struct CfdHash {
  std::size_t operator()(const CFD& c) const;
};

struct Confidence {
  std::uint64_t u_prime = 0;  // tuples fully satisfying the rule
  std::uint64_t t_prime = 0;  // tuples matching the LHS pattern
  double u = 0.0;             // u_prime / t_prime, 0 when t_prime == 0
};

/// True iff every LHS cell matches: constants compare equal, wildcards
/// require a present value. Throws on attributes missing from the schema.
bool matches_lhs(const Tuple& t, const CFD& c, const Schema& schema);

/// Confidence of c over rel. Variable rules use majority-subgroup
/// (minimum-deletion) counting; tuples with a missing RHS cell neither
/// support nor violate.
Confidence confidence(const CFD& c, const Relation& rel);

/// Indices of tuples violating at least one rule, ascending.
std::vector<std::size_t> violations(const std::vector<CFD>& rules,
                                    const Relation& rel);

/// Grammar: [A1,...,Ak] -> B : (p1,...,pk || pB)  with `_` for wildcard.
CFD parse_cfd(std::string_view text);
std::string format_cfd(const CFD& c);

class CfdParseError : public std::runtime_error {
 public:
  CfdParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

/// Normalized Levenshtein similarity in [0,1]; 1 for equal strings.
double string_similarity(std::string_view a, std::string_view b);

}  // namespace cfdm
