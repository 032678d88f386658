#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owl2vec4oa {

/// Shortest decimal form that round-trips to the same double. Integral
/// values keep a trailing ".0" so weight columns read as reals ("1.0").
std::string format_real(double value);

/// Parses a complete decimal real; returns false on trailing garbage.
bool parse_real(std::string_view text, double& out);

// TSV fields escape backslash, tab, CR and LF as \\ \t \r \n.
std::string escape_tsv_field(std::string_view field);
std::string unescape_tsv_field(std::string_view field);
std::vector<std::string_view> split_fields(std::string_view line, char sep = '\t');

/// Splits text into lines on LF, stripping a trailing CR from each line.
/// A final line without LF is still returned; a trailing LF adds nothing.
std::vector<std::string_view> split_lines(std::string_view text);

class FileNotFound : public std::runtime_error {
 public:
  explicit FileNotFound(const std::filesystem::path& path)
      : std::runtime_error("cannot open " + path.string()) {}
};

/// Throws FileNotFound if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place, so a
/// failed write never leaves a truncated artifact behind.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Space-separated tokens, one sentence per line, LF-terminated.
std::string format_sentences(const std::vector<std::vector<std::string>>& sentences);
std::vector<std::vector<std::string>> parse_sentences(std::string_view text);

}  // namespace owl2vec4oa
