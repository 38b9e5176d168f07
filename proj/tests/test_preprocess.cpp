#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include "emtk/error.hpp"
#include "emtk/preprocess.hpp"

using namespace emtk;

namespace {

const CleanConfig& shipped() {
  static const CleanConfig cfg = CleanConfig::defaults();
  return cfg;
}

}  // namespace

TEST(CleanText, WorkedExamples) {
  EXPECT_EQ(clean_text("It's 2 cats!!", shipped()), "It is cats");
  EXPECT_EQ(clean_text("", shipped()), "");
  EXPECT_EQ(clean_text("café", shipped()), "cafe");
}

TEST(CleanText, StepOrder) {
  // Contractions survive because they expand before punctuation removal.
  EXPECT_EQ(clean_text("They're sad, aren't they?", shipped()), "They are sad are not they");
  // Curly apostrophe and upper-case initial.
  EXPECT_EQ(clean_text("Don’t go", shipped()), "Do not go");
  // Acronym is exact-match and can sit next to punctuation.
  EXPECT_EQ(clean_text("the USA.", shipped()), "the United States of America");
  EXPECT_EQ(clean_text("the usa", shipped()), "the usa");
  // Digits vanish, single characters drop, whitespace collapses.
  EXPECT_EQ(clean_text("  a  b2d  x99y   ", shipped()), "bd xy");
  EXPECT_EQ(clean_text("Zoë naïve façade Œuvre", shipped()), "Zoe naive facade OEuvre");
}

TEST(CleanText, CasePreserved) { EXPECT_EQ(clean_text("Hello WORLD", shipped()), "Hello WORLD"); }

TEST(CleanText, InvalidUtf8BecomesSpace) {
  EXPECT_EQ(clean_text("ab\xff\xfe" "cd", shipped()), "ab cd");
}

TEST(CleanText, PropertiesOnRandomInputs) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"It's", "can't", "USA", "U.S.", "café", "Ünïcode", "42",
                                           "x",    "!!",    "--",  "  ",   "\t",   "we're",   "I'm",
                                           "o'clock", "ok", "Hello", "a1b", "\xe2\x80\x99", "ß", "lol"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      s += pieces[rng() % pieces.size()];
      if (rng() % 2) s += " ";
    }
    const std::string once = clean_text(s, shipped());
    EXPECT_EQ(clean_text(once, shipped()), once) << "input: " << s;
    EXPECT_EQ(once.find("  "), std::string::npos);
    for (char c : once) {
      EXPECT_FALSE(std::isdigit(static_cast<unsigned char>(c))) << once;
    }
    std::size_t start = 0;
    while (start < once.size()) {
      auto end = once.find(' ', start);
      if (end == std::string::npos) end = once.size();
      EXPECT_GE(end - start, 2u) << once;
      start = end + 1;
    }
  }
}

TEST(CleanConfig, RejectsExpansionContainingAKey) {
  EXPECT_THROW(CleanConfig({{"it's", "it's here"}}, {}), ConfigError);
  EXPECT_THROW(CleanConfig({}, {{"TV", "TV set"}}), ConfigError);
  EXPECT_THROW(CleanConfig({}, {}, 0), ConfigError);
  EXPECT_NO_THROW(CleanConfig({{"it's", "it is"}}, {{"TV", "television"}}));
}

TEST(CleanConfig, ShippedListSize) { EXPECT_GE(shipped().contractions().size(), 120u); }

TEST(TokenizeAndPad, Counting) {
  const auto seq = tokenize_and_pad("It is cats", shipped());
  EXPECT_EQ(seq.tokens.size(), 200u);
  EXPECT_EQ(seq.attention_length, 3u);
  EXPECT_EQ(seq.tokens[3], "<pad>");
  EXPECT_EQ(seq.real_tokens().size(), 3u);
}

TEST(TokenizeAndPad, TruncatesLongEssays) {
  std::string text;
  for (int i = 0; i < 250; ++i) text += "w" + std::string(1, static_cast<char>('a' + i % 26)) + " ";
  const auto seq = tokenize_and_pad(text, shipped());
  EXPECT_EQ(seq.tokens.size(), 200u);
  EXPECT_EQ(seq.attention_length, 200u);
  EXPECT_EQ(seq.tokens[199], "wr");  // 199 % 26 == 17
}

TEST(TokenizeAndPad, EmptyIsAllPads) {
  const auto seq = tokenize_and_pad("", shipped());
  EXPECT_EQ(seq.tokens.size(), 200u);
  EXPECT_EQ(seq.attention_length, 0u);
}

TEST(TokenizeAndPad, LengthConstantForAnyInput) {
  const CleanConfig small({}, {}, 5, "_");
  for (const char* s : {"", "one", "a b c d e f g h", "x y z"}) {
    EXPECT_EQ(tokenize_and_pad(s, small).tokens.size(), 5u);
  }
}
