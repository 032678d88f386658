#include "owl2vec4oa/ntriples.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <thread>

#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

bool is_valid_iri(std::string_view value) noexcept {
  if (value.empty() || value.find(':') == std::string_view::npos) return false;
  for (unsigned char c : value) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
        c == '<' || c == '>' || c == '"') {
      return false;
    }
  }
  return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid_iri(value_)) throw std::invalid_argument("invalid IRI: '" + value_ + "'");
}

std::optional<Iri> Iri::try_make(std::string_view value) {
  if (!is_valid_iri(value)) return std::nullopt;
  return Iri(std::string(value));
}

MalformedLine::MalformedLine(std::size_t line, std::string reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason),
      line_(line),
      reason_(std::move(reason)) {}

namespace {

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Recursive-descent cursor over a single line.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number) : s_(line), line_(number) {}

  std::optional<Triple> parse() {
    skip_ws();
    if (at_end() || peek() == '#') return std::nullopt;

    Triple t;
    if (peek() == '<') {
      t.subject = read_iri();
    } else if (peek() == '_') {
      t.subject = read_blank();
    } else {
      fail("subject must be an IRI or blank node");
    }
    require_ws_or("<");
    skip_ws();
    if (at_end() || peek() != '<') fail("predicate must be an IRI");
    t.predicate = read_iri();
    skip_ws();
    if (at_end()) fail("missing object");
    switch (peek()) {
      case '<': t.object = read_iri(); break;
      case '_': t.object = read_blank(); break;
      case '"': t.object = read_literal(); break;
      default: fail("object must be an IRI, blank node or literal");
    }
    skip_ws();
    if (at_end() || peek() != '.') fail("missing terminator");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after terminator");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& reason) const { throw MalformedLine(line_, reason); }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  // Blank node labels may touch the next term only if it starts with '<'.
  void require_ws_or(std::string_view allowed) {
    if (at_end()) return;
    if (peek() == ' ' || peek() == '\t') return;
    if (allowed.find(peek()) != std::string_view::npos) return;
    fail("expected whitespace between terms");
  }

  std::uint32_t read_uchar() {
    // pos_ points just past the backslash, at 'u' or 'U'.
    std::size_t digits = peek() == 'u' ? 4 : 8;
    ++pos_;
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = s_[pos_ + i];
      if (!is_hex(c)) fail("bad hex digit in unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(
                         is_digit(c) ? c - '0' : (c | 0x20) - 'a' + 10);
    }
    pos_ += digits;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point in escape");
    return cp;
  }

  Iri read_iri() {
    ++pos_;  // '<'
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = peek();
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        if (at_end() || (peek() != 'u' && peek() != 'U')) fail("only \\u escapes allowed in IRI");
        append_utf8(value, read_uchar());
        continue;
      }
      auto uc = static_cast<unsigned char>(c);
      if (uc <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`') {
        fail("illegal character in IRI");
      }
      value += c;
      ++pos_;
    }
    auto iri = Iri::try_make(value);
    if (!iri) fail("not an absolute IRI: '" + value + "'");
    return std::move(*iri);
  }

  BlankNode read_blank() {
    if (s_.substr(pos_, 2) != "_:") fail("expected blank node '_:'");
    pos_ += 2;
    std::size_t start = pos_;
    if (at_end() || !(is_alpha(peek()) || is_digit(peek()))) fail("bad blank node label");
    while (!at_end() && (is_alpha(peek()) || is_digit(peek()) || peek() == '.' ||
                         peek() == '_' || peek() == '-')) {
      ++pos_;
    }
    // A label never ends in '.', so trailing dots belong to the terminator.
    while (pos_ > start + 1 && s_[pos_ - 1] == '.') --pos_;
    return BlankNode{std::string(s_.substr(start, pos_ - start))};
  }

  Literal read_literal() {
    ++pos_;  // opening quote
    Literal lit;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = peek();
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      if (c == '\\') {
        ++pos_;
        if (at_end()) fail("dangling escape");
        char e = peek();
        switch (e) {
          case 't': lit.lexical += '\t'; ++pos_; break;
          case 'b': lit.lexical += '\b'; ++pos_; break;
          case 'n': lit.lexical += '\n'; ++pos_; break;
          case 'r': lit.lexical += '\r'; ++pos_; break;
          case 'f': lit.lexical += '\f'; ++pos_; break;
          case '"': lit.lexical += '"'; ++pos_; break;
          case '\'': lit.lexical += '\''; ++pos_; break;
          case '\\': lit.lexical += '\\'; ++pos_; break;
          case 'u':
          case 'U': append_utf8(lit.lexical, read_uchar()); break;
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      lit.lexical += c;
      ++pos_;
    }
    if (!at_end() && peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && is_alpha(peek())) ++pos_;
      if (pos_ == start) fail("empty language tag");
      while (!at_end() && peek() == '-') {
        std::size_t sub = ++pos_;
        while (!at_end() && (is_alpha(peek()) || is_digit(peek()))) ++pos_;
        if (pos_ == sub) fail("bad language subtag");
      }
      std::string tag(s_.substr(start, pos_ - start));
      std::transform(tag.begin(), tag.end(), tag.begin(),
                     [](char ch) { return is_alpha(ch) ? static_cast<char>(ch | 0x20) : ch; });
      lit.language = std::move(tag);
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (at_end() || peek() != '<') fail("datatype must be an IRI");
      lit.datatype = read_iri();
    }
    return lit;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

void append_escaped_iri(std::string& out, const std::string& value) {
  out += '<';
  for (char c : value) {
    auto uc = static_cast<unsigned char>(c);
    if (uc < 0x20 || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' || c == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", uc);
      out += buf;
    } else {
      out += c;
    }
  }
  out += '>';
}

void append_term(std::string& out, const Object& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) {
    append_escaped_iri(out, iri->str());
  } else if (const auto* bn = std::get_if<BlankNode>(&term)) {
    out += "_:";
    out += bn->label;
  } else {
    const auto& lit = std::get<Literal>(term);
    out += '"';
    for (char c : lit.lexical) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20 && c != '\t') {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned char>(c));
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += '"';
    if (!lit.language.empty()) {
      out += '@';
      out += lit.language;
    } else if (lit.datatype) {
      out += "^^";
      append_escaped_iri(out, lit.datatype->str());
    }
  }
}

struct ChunkResult {
  std::vector<Triple> triples;
  std::size_t skipped = 0;
  std::optional<MalformedLine> first_error;
};

ChunkResult parse_range(const std::vector<std::string_view>& lines, std::size_t begin,
                        std::size_t end, bool lenient) {
  ChunkResult r;
  for (std::size_t i = begin; i < end; ++i) {
    try {
      if (auto t = parse_line(lines[i], i + 1)) r.triples.push_back(std::move(*t));
    } catch (const MalformedLine& e) {
      if (!r.first_error) r.first_error = e;
      if (!lenient) return r;
      ++r.skipped;
    }
  }
  return r;
}

}  // namespace

std::optional<Triple> parse_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return LineParser(line, line_number).parse();
}

std::string to_ntriples(const Triple& triple) {
  std::string out;
  std::visit([&](const auto& s) { append_term(out, Object{s}); }, triple.subject);
  out += ' ';
  append_escaped_iri(out, triple.predicate.str());
  out += ' ';
  append_term(out, triple.object);
  out += " .";
  return out;
}

ParseResult parse_document(std::string_view text, const ParseOptions& options) {
  const std::vector<std::string_view> lines = split_lines(text);
  const std::size_t workers =
      std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, lines.size() / 1024));

  std::vector<ChunkResult> chunks(workers);
  if (workers == 1) {
    chunks[0] = parse_range(lines, 0, lines.size(), options.lenient);
  } else {
    std::vector<std::jthread> threads;
    const std::size_t per = (lines.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = std::min(lines.size(), w * per);
      const std::size_t e = std::min(lines.size(), b + per);
      threads.emplace_back([&, w, b, e] { chunks[w] = parse_range(lines, b, e, options.lenient); });
    }
  }

  ParseResult result;
  for (auto& chunk : chunks) {
    if (chunk.first_error && !result.first_error) result.first_error = chunk.first_error;
    if (chunk.first_error && !options.lenient) throw *chunk.first_error;
    result.skipped_lines += chunk.skipped;
    result.triples.insert(result.triples.end(), std::make_move_iterator(chunk.triples.begin()),
                          std::make_move_iterator(chunk.triples.end()));
  }
  return result;
}

}  // namespace owl2vec4oa
