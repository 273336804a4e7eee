#include "cfdm/generator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cfdm/rng.hpp"

namespace cfdm {

namespace {

// FNV-1a, fixed here so generated data is identical across platforms.
std::uint64_t fnv1a(const std::string& s, std::uint64_t h) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (rows < 1) throw std::invalid_argument("generator: rows must be >= 1");
  if (n_rules < 1)
    throw std::invalid_argument("generator: need at least one rule");
  if (error_rate < 0 || error_rate >= 1)
    throw std::invalid_argument("generator: error rate must be in [0, 1)");
  if (key_domain < 2)
    throw std::invalid_argument("generator: key domain must be >= 2");
  if (arity < 3 + n_rules + 1)
    throw std::invalid_argument(
        "generator: arity too small for keys, derived attributes, and a "
        "prototype block");
}

GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  const std::size_t n_keys = 3;
  const std::size_t n_proto = spec.arity - n_keys - spec.n_rules;

  GeneratedData out;
  Schema& schema = out.data.schema;
  for (std::size_t i = 0; i < n_proto; ++i)
    schema.attributes.push_back("P" + std::to_string(i));
  for (std::size_t i = 0; i < n_keys; ++i)
    schema.attributes.push_back("L" + std::to_string(i));
  for (std::size_t i = 0; i < spec.n_rules; ++i)
    schema.attributes.push_back("R" + std::to_string(i));

  for (std::size_t j = 0; j < spec.n_rules; ++j) {
    CFD rule;
    rule.lhs = {"L" + std::to_string(j % n_keys),
                "L" + std::to_string((j + 1) % n_keys)};
    rule.rhs = "R" + std::to_string(j);
    rule.pattern = {PatternCell::wildcard(), PatternCell::wildcard(),
                    PatternCell::wildcard()};
    rule.validate();
    out.planted.push_back(std::move(rule));
  }

  Rng rows_rng = Rng(mix_seed(spec.seed)).split(1);
  for (std::uint64_t row = 0; row < spec.rows; ++row) {
    Tuple t;
    for (std::size_t i = 0; i < n_proto; ++i)
      t.cells.push_back("p" + std::to_string(i));
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n_keys; ++i) {
      keys.push_back("k" + std::to_string(i) + "_" +
                     std::to_string(rows_rng.range(0, spec.key_domain - 1)));
      t.cells.push_back(keys.back());
    }
    for (std::size_t j = 0; j < spec.n_rules; ++j) {
      std::uint64_t h = fnv1a(keys[j % n_keys], 1469598103934665603ULL + j);
      h = fnv1a(keys[(j + 1) % n_keys], h);
      t.cells.push_back("d" + std::to_string(j) + "_" +
                        std::to_string(h % 100000));
    }
    out.data.tuples.push_back(std::move(t));
  }

  // Perturbation: floor(rows * rate) distinct rows each get one derived
  // cell flipped to a token no clean cell ever carries.
  std::size_t n_dirty =
      static_cast<std::size_t>(double(spec.rows) * spec.error_rate);
  Rng err_rng = Rng(mix_seed(spec.seed)).split(2);
  std::vector<std::size_t> order(spec.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < n_dirty; ++i)
    std::swap(order[i], order[err_rng.range(i, order.size() - 1)]);
  out.dirty_rows.assign(order.begin(), order.begin() + n_dirty);
  std::sort(out.dirty_rows.begin(), out.dirty_rows.end());
  std::size_t fresh = 0;
  for (std::size_t row : out.dirty_rows) {
    std::size_t j = err_rng.range(0, spec.n_rules - 1);
    out.data.tuples[row].cells[n_proto + n_keys + j] =
        "ERR" + std::to_string(fresh++);
  }
  return out;
}

}  // namespace cfdm
