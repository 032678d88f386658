#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "owl2vec4oa/text_io.hpp"

using namespace owl2vec4oa;

TEST(TextIo, RealsRoundTrip) {
  EXPECT_EQ(format_real(1.0), "1.0");
  EXPECT_EQ(format_real(0.9), "0.9");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng);
    double y = 0;
    ASSERT_TRUE(parse_real(format_real(x), y));
    EXPECT_EQ(x, y);
  }
  double z;
  EXPECT_FALSE(parse_real("0.5x", z));
  EXPECT_FALSE(parse_real("", z));
}

TEST(TextIo, TsvEscaping) {
  const std::string raw = "a\tb\\c\nd\re";
  EXPECT_EQ(escape_tsv_field(raw).find('\t'), std::string::npos);
  EXPECT_EQ(unescape_tsv_field(escape_tsv_field(raw)), raw);
}

TEST(TextIo, SplitLinesStripsCr) {
  auto lines = split_lines("a\r\nb\n\nc");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "a");
  EXPECT_EQ(lines[2], "");
  EXPECT_EQ(lines[3], "c");
  EXPECT_EQ(split_lines("a\n").size(), 1u);
}

TEST(TextIo, SentencesRoundTrip) {
  std::vector<std::vector<std::string>> s{{"a", "b"}, {}, {"c"}};
  EXPECT_EQ(parse_sentences(format_sentences(s)), s);
}

TEST(TextIo, FilesAndMissingPaths) {
  auto dir = std::filesystem::temp_directory_path() / "owl2vec4oa_text_io";
  std::filesystem::remove_all(dir);
  write_file(dir / "nested" / "f.txt", "hello");
  EXPECT_EQ(read_file(dir / "nested" / "f.txt"), "hello");
  EXPECT_THROW(read_file(dir / "absent.txt"), FileNotFound);
  std::filesystem::remove_all(dir);
}
