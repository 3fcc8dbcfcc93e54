#include <gtest/gtest.h>

#include <sstream>

#include "ddes/lexicon.hpp"
#include "test_support.hpp"

using namespace ddes;

namespace {

Lexicon parse(const std::string& text) {
  std::istringstream in(text);
  return parse_lexicon(in);
}

ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::BadFormat;
}

}  // namespace

TEST(Lexicon, ParsesRowAndScales) {
  const auto lex = parse("contentment\t0.875\t0.610\t0.782\n");
  ASSERT_EQ(lex.size(), 1u);
  const auto e = lex.find("contentment");
  ASSERT_TRUE(e);
  EXPECT_EQ(e->valence, 0.875);
  EXPECT_EQ(e->arousal, 0.610);
  EXPECT_EQ(e->dominance, 0.782);

  const auto p = lookup_va(lex, "contentment");
  EXPECT_NEAR(p.valence(), 0.75, 1e-12);
  EXPECT_NEAR(p.arousal(), 0.22, 1e-12);
}

TEST(Lexicon, LookupNormalizesInput) {
  const auto lex = testing_support::fixture_lexicon();
  const auto a = lookup_va(lex, "sadness");
  const auto b = lookup_va(lex, " Sadness ");
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a.valence(), -0.896, 1e-12);
  EXPECT_NEAR(a.arousal(), -0.424, 1e-12);
}

TEST(Lexicon, HeaderDetectedAndBlankLinesSkipped) {
  const auto lex = parse("word\tvalence\tarousal\tdominance\n\nawe\t0.84\t0.795\t0.52\r\n");
  EXPECT_EQ(lex.size(), 1u);
  EXPECT_TRUE(lex.find("AWE"));
}

TEST(Lexicon, EmptyFileIsValidButLookupsFail) {
  const auto lex = parse("");
  EXPECT_TRUE(lex.empty());
  try {
    lookup_va(lex, "awe");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WordNotFound);
  }
}

TEST(Lexicon, Errors) {
  EXPECT_EQ(parse_error("joy\t1.5\t0.5\t0.5\n"), ErrorCode::ValueOutOfRange);
  EXPECT_EQ(parse_error("joy\t0.5\t0.5\t0.5\nJoy\t0.4\t0.5\t0.5\n"), ErrorCode::DuplicateWord);
  std::string msg;
  EXPECT_EQ(parse_error("joy\t0.5\t0.5\t0.5\nfear\t0.1\t0.9\n", &msg), ErrorCode::MalformedRow);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_EQ(parse_error("joy\t0.5\t0.5\t0.5\nfear\tx\t0.9\t0.2\n"), ErrorCode::MalformedRow);
  try {
    load_lexicon("/nonexistent/lexicon.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

TEST(Lexicon, PropertyStoredRoundTrip) {
  testing_support::Random rng(3);
  Lexicon lex;
  std::vector<std::pair<double, double>> expected;
  for (int i = 0; i < 500; ++i) {
    const double v = rng.uniform(-1, 1), a = rng.uniform(-1, 1);
    lex.add("w" + std::to_string(i), {(v + 1) / 2, (a + 1) / 2, 0.5});
    expected.emplace_back(v, a);
  }
  for (int i = 0; i < 500; ++i) {
    const auto p = lookup_va(lex, "W" + std::to_string(i));
    EXPECT_NEAR(p.valence(), expected[i].first, 1e-12);
    EXPECT_NEAR(p.arousal(), expected[i].second, 1e-12);
  }
}
