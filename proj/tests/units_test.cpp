#include <gtest/gtest.h>

#include "compsim/units.hpp"

using compsim::parse_eng;

TEST(ParseEng, PlainNumbers) {
  EXPECT_DOUBLE_EQ(*parse_eng("0.8"), 0.8);
  EXPECT_DOUBLE_EQ(*parse_eng("-5"), -5.0);
  EXPECT_DOUBLE_EQ(*parse_eng("+2"), 2.0);
  EXPECT_DOUBLE_EQ(*parse_eng("1e-3"), 1e-3);
}

TEST(ParseEng, Suffixes) {
  EXPECT_DOUBLE_EQ(*parse_eng("1f"), 1e-15);
  EXPECT_DOUBLE_EQ(*parse_eng("0.05p"), 0.05e-12);
  EXPECT_DOUBLE_EQ(*parse_eng("3n"), 3e-9);
  EXPECT_DOUBLE_EQ(*parse_eng("450u"), 450e-6);
  EXPECT_DOUBLE_EQ(*parse_eng("-5m"), -5e-3);
  EXPECT_DOUBLE_EQ(*parse_eng("10k"), 1e4);
  EXPECT_DOUBLE_EQ(*parse_eng("5MEG"), 5e6);
  EXPECT_DOUBLE_EQ(*parse_eng("5G"), 5e9);
  EXPECT_DOUBLE_EQ(*parse_eng("2M"), 2e-3);  // SPICE: M is milli
}

TEST(ParseEng, TrailingUnitsIgnored) {
  EXPECT_DOUBLE_EQ(*parse_eng("1fF"), 1e-15);
  EXPECT_DOUBLE_EQ(*parse_eng("10ps"), 10e-12);
  EXPECT_DOUBLE_EQ(*parse_eng("0.8V"), 0.8);
}

TEST(ParseEng, Rejects) {
  EXPECT_FALSE(parse_eng(""));
  EXPECT_FALSE(parse_eng("abc"));
  EXPECT_FALSE(parse_eng("1.5.3"));
  EXPECT_FALSE(parse_eng("5m2"));
  EXPECT_FALSE(parse_eng("inf"));
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.0, 1e-15, 5e-14, 0.1, 1.0 / 3.0, -2.5e-7, 123456.789}) {
    EXPECT_EQ(*parse_eng(compsim::format_double(v)), v);
  }
}
