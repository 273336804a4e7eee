#pragma once

#include <cstdint>
#include <vector>

#include "cfdm/cfd.hpp"
#include "cfdm/relation.hpp"

namespace cfdm {

/// Synthetic benchmark data: a block of stable prototype attributes keeps
/// every row mutually similar, three low-cardinality key attributes drive
/// the planted dependencies, and each planted rule owns one derived
/// attribute. Errors flip derived cells of randomly chosen rows to fresh
/// tokens.
struct GeneratorSpec {
  std::uint64_t rows = 1000;
  std::size_t arity = 16;
  std::size_t n_rules = 6;
  double error_rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t key_domain = 8;  // distinct values per key attribute

  /// Throws unless error_rate is in [0, 1), rows >= 1, n_rules >= 1, and
  /// the arity leaves room for keys, derived attributes, and at least one
  /// prototype attribute.
  void validate() const;
};

struct GeneratedData {
  Relation data;
  std::vector<CFD> planted;             // the standard rule set
  std::vector<std::size_t> dirty_rows;  // perturbed row indices, ascending
};

/// Deterministic in the spec: equal specs produce identical output.
GeneratedData generate(const GeneratorSpec& spec);

}  // namespace cfdm
