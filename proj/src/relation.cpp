#include "cfdm/relation.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_set>

namespace cfdm {

void Schema::validate() const {
  if (attributes.empty())
    throw std::invalid_argument("schema must have at least one attribute");
  std::unordered_set<std::string> seen;
  for (const auto& a : attributes) {
    if (a.empty()) throw std::invalid_argument("empty attribute name");
    if (!seen.insert(a).second)
      throw std::invalid_argument("duplicate attribute name: " + a);
  }
}

bool is_complete(const Tuple& t) {
  for (const auto& c : t.cells)
    if (!c.has_value()) return false;
  return true;
}

std::size_t cmp(const Tuple& a, const Tuple& b) {
  if (a.cells.size() != b.cells.size())
    throw std::invalid_argument("cmp: tuples of different arity");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    if (a.cells[i].has_value() && b.cells[i].has_value() &&
        *a.cells[i] == *b.cells[i])
      ++n;
  return n;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Reads one CSV record (possibly spanning lines inside quotes). Returns false
// at end of input. line counts physical lines consumed so far.
bool read_record(std::istream& in, std::vector<std::string>& out,
                 std::size_t& line) {
  out.clear();
  int ch = in.get();
  if (ch == EOF) return false;
  std::string field;
  bool quoted = false, was_quoted = false, any = false;
  auto push = [&] {
    out.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };
  ++line;
  while (true) {
    if (ch == EOF) {
      if (quoted) throw CsvError("unterminated quoted field", line);
      push();
      return true;
    }
    char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        int nx = in.peek();
        if (nx == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else {
      if (c == '"' && field.empty() && !any) {
        quoted = was_quoted = true;
      } else if (c == ',') {
        push();
        any = false;
        ch = in.get();
        continue;
      } else if (c == '\r') {
        // swallow; \r\n handled by the \n branch
      } else if (c == '\n') {
        push();
        return true;
      } else {
        field.push_back(c);
      }
    }
    any = true;
    ch = in.get();
  }
}

Tuple row_to_tuple(const std::vector<std::string>& fields, const Schema& schema,
                 const NullPolicy& policy, std::size_t line) {
  if (fields.size() != schema.arity())
    throw CsvError("expected " + std::to_string(schema.arity()) +
                       " cells, got " + std::to_string(fields.size()),
                   line);
  Tuple t;
  t.cells.reserve(fields.size());
  for (const auto& f : fields)
    t.cells.push_back(policy.is_null(f) ? Cell{} : Cell{f});
  return t;
}

}  // namespace

struct CsvStream::Impl {
  std::ifstream in;
  std::size_t line = 0;
  bool eof = false;
};

CsvStream::CsvStream(std::string path, NullPolicy policy)
    : impl_(new Impl), path_(std::move(path)), policy_(std::move(policy)) {
  impl_->in.open(path_);
  if (!impl_->in) {
    delete impl_;
    throw std::runtime_error("cannot open file: " + path_);
  }
  std::vector<std::string> header;
  if (!read_record(impl_->in, header, impl_->line)) {
    delete impl_;
    throw CsvError("missing header row", 1);
  }
  schema_.attributes = header;
  schema_.validate();
}

CsvStream::~CsvStream() { delete impl_; }

bool CsvStream::next(Tuple& out) {
  std::vector<std::string> fields;
  if (!read_record(impl_->in, fields, impl_->line)) {
    if (!impl_->eof) {
      impl_->eof = true;
      ++passes_;
    }
    return false;
  }
  out = row_to_tuple(fields, schema_, policy_, impl_->line);
  return true;
}

void CsvStream::rewind() {
  impl_->in.close();
  impl_->in.clear();
  impl_->in.open(path_);
  if (!impl_->in) throw std::runtime_error("cannot reopen file: " + path_);
  impl_->line = 0;
  impl_->eof = false;
  std::vector<std::string> header;
  read_record(impl_->in, header, impl_->line);
}

namespace {

Relation load_from_stream(std::istream& in, const NullPolicy& policy) {
  std::size_t line = 0;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line)) throw CsvError("missing header row", 1);
  Relation rel;
  rel.schema.attributes = fields;
  rel.schema.validate();
  while (read_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    rel.tuples.push_back(row_to_tuple(fields, rel.schema, policy, line));
  }
  return rel;
}

}  // namespace

Relation load_csv(const std::string& path, const NullPolicy& policy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return load_from_stream(in, policy);
}

Relation parse_csv(std::string_view text, const NullPolicy& policy) {
  std::istringstream in{std::string(text)};
  return load_from_stream(in, policy);
}

namespace {

void write_field(std::ostream& out, const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) {
    out << value;
    return;
  }
  out << '"';
  for (char ch : value) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

}  // namespace

void write_csv(const Relation& rel, std::ostream& out) {
  for (std::size_t i = 0; i < rel.schema.attributes.size(); ++i) {
    if (i) out << ',';
    write_field(out, rel.schema.attributes[i]);
  }
  out << '\n';
  for (const Tuple& t : rel.tuples) {
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      if (i) out << ',';
      if (t.cells[i]) write_field(out, *t.cells[i]);
    }
    out << '\n';
  }
}

void save_csv(const Relation& rel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  write_csv(rel, out);
}

}  // namespace cfdm
