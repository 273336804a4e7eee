#pragma once

#include <string>
#include <vector>

#include "cfdm/relation.hpp"

namespace cfdm::testutil {

inline std::string data_path(const std::string& name) {
  return std::string(CFDM_DATA_DIR) + "/" + name;
}

inline Relation example1() { return load_csv(data_path("example1.csv")); }

/// First `count` rows of a relation (Table 1 tests mostly use t1..t8).
inline Relation head(const Relation& rel, std::size_t count) {
  Relation out;
  out.schema = rel.schema;
  for (std::size_t i = 0; i < count && i < rel.tuples.size(); ++i)
    out.tuples.push_back(rel.tuples[i]);
  return out;
}

/// Builds a relation from rows of raw strings; cells matching the default
/// null markers become missing.
inline Relation make_relation(std::vector<std::string> attrs,
                              std::vector<std::vector<std::string>> rows) {
  Relation rel;
  rel.schema.attributes = std::move(attrs);
  rel.schema.validate();
  NullPolicy policy;
  for (auto& row : rows) {
    Tuple t;
    for (auto& v : row) t.cells.push_back(policy.is_null(v) ? Cell{} : Cell{v});
    if (t.cells.size() != rel.schema.arity())
      throw std::invalid_argument("bad row width in test fixture");
    rel.tuples.push_back(std::move(t));
  }
  return rel;
}

}  // namespace cfdm::testutil
