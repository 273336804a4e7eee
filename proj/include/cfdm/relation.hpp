#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfdm {

/// A cell is either a constant string value or missing.
using Cell = std::optional<std::string>;

struct Schema {
  std::vector<std::string> attributes;

  std::size_t arity() const { return attributes.size(); }

  /// Index of an attribute name, or -1 if absent.
  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
      if (attributes[i] == name) return static_cast<int>(i);
    return -1;
  }

  /// Throws if attribute names are empty, duplicated, or the schema is empty.
  void validate() const;

  bool operator==(const Schema&) const = default;
};

struct Tuple {
  std::vector<Cell> cells;

  Tuple() = default;
  explicit Tuple(std::vector<Cell> c) : cells(std::move(c)) {}

  bool operator==(const Tuple&) const = default;
  auto operator<=>(const Tuple&) const = default;
};

struct Relation {
  Schema schema;
  std::vector<Tuple> tuples;
};

/// Strings treated as a missing value when loading data.
struct NullPolicy {
  std::set<std::string, std::less<>> markers{"", "XXXX", "NULL", "?"};

  bool is_null(std::string_view s) const { return markers.count(s) > 0; }
};

/// True iff no cell of t is missing.
bool is_complete(const Tuple& t);

/// Number of attributes on which a and b are both present and equal.
/// Missing never equals missing. Symmetric; bounded by the arity.
std::size_t cmp(const Tuple& a, const Tuple& b);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Single-consumer stream of tuples. rewind() starts a fresh pass;
/// passes() counts completed full iterations.
class TupleStream {
 public:
  virtual ~TupleStream() = default;
  virtual const Schema& schema() const = 0;
  /// Fills out and returns true, or returns false at end of data.
  virtual bool next(Tuple& out) = 0;
  virtual void rewind() = 0;
  virtual std::uint64_t passes() const = 0;
};

/// In-memory stream over a relation's tuples.
class MemoryStream final : public TupleStream {
 public:
  explicit MemoryStream(const Relation& rel) : rel_(&rel) {}

  const Schema& schema() const override { return rel_->schema; }
  bool next(Tuple& out) override {
    if (pos_ >= rel_->tuples.size()) {
      if (!eof_) {
        eof_ = true;
        ++passes_;
      }
      return false;
    }
    out = rel_->tuples[pos_++];
    return true;
  }
  void rewind() override {
    pos_ = 0;
    eof_ = false;
  }
  std::uint64_t passes() const override { return passes_; }

 private:
  const Relation* rel_;
  std::size_t pos_ = 0;
  bool eof_ = false;
  std::uint64_t passes_ = 0;
};

/// Streaming CSV reader (RFC-4180-style, UTF-8, header row required).
/// Null markers are applied per cell; unquoted cells are trimmed.
class CsvStream final : public TupleStream {
 public:
  CsvStream(std::string path, NullPolicy policy = {});
  ~CsvStream() override;

  const Schema& schema() const override { return schema_; }
  bool next(Tuple& out) override;
  void rewind() override;
  std::uint64_t passes() const override { return passes_; }

 private:
  struct Impl;
  Impl* impl_;
  Schema schema_;
  std::string path_;
  NullPolicy policy_;
  std::uint64_t passes_ = 0;
};

/// Loads a whole CSV file into memory. Malformed rows raise CsvError with
/// the offending line number.
Relation load_csv(const std::string& path, const NullPolicy& policy = {});

/// Parses CSV text already in memory; used by fixtures and tests.
Relation parse_csv(std::string_view text, const NullPolicy& policy = {});

/// Header row plus one row per tuple; missing cells become empty fields and
/// fields are quoted only when they need it.
void write_csv(const Relation& rel, std::ostream& out);
void save_csv(const Relation& rel, const std::string& path);

}  // namespace cfdm
