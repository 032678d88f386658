#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace owl2vec4oa {

/// Absolute IRI without angle brackets. Always satisfies is_valid_iri().
class Iri {
 public:
  Iri() = default;
  /// Throws std::invalid_argument if `value` is not a valid IRI.
  explicit Iri(std::string value);

  static std::optional<Iri> try_make(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

/// Non-empty, has a ':' scheme separator, no whitespace, '<', '>' or '"'.
bool is_valid_iri(std::string_view value) noexcept;

struct BlankNode {
  std::string label;  // without the "_:" prefix
  friend auto operator<=>(const BlankNode&, const BlankNode&) = default;
};

struct Literal {
  std::string lexical;             // escapes decoded
  std::string language;            // lowercased, empty when absent
  std::optional<Iri> datatype;     // kept but not interpreted
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Subject = std::variant<Iri, BlankNode>;
using Object = std::variant<Iri, BlankNode, Literal>;

struct Triple {
  Subject subject;
  Iri predicate;
  Object object;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

class MalformedLine : public std::runtime_error {
 public:
  MalformedLine(std::size_t line, std::string reason);
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

struct ParseOptions {
  bool lenient = false;      // skip and count bad lines instead of throwing
  unsigned workers = 1;      // >1 parses line chunks concurrently
};

struct ParseResult {
  std::vector<Triple> triples;
  std::size_t skipped_lines = 0;
  std::optional<MalformedLine> first_error;  // lenient mode only
};

/// Parses a W3C N-Triples document (LF or CRLF). Throws MalformedLine on the
/// first bad line unless options.lenient is set. Output order is input order
/// regardless of worker count.
ParseResult parse_document(std::string_view text, const ParseOptions& options = {});

/// Parses one line. Returns nullopt for blank and comment lines.
/// `line_number` is only used in the thrown MalformedLine.
std::optional<Triple> parse_line(std::string_view line, std::size_t line_number);

/// Canonical N-Triples form of one statement, without the trailing newline.
std::string to_ntriples(const Triple& triple);

}  // namespace owl2vec4oa

template <>
struct std::hash<owl2vec4oa::Iri> {
  std::size_t operator()(const owl2vec4oa::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.str());
  }
};
