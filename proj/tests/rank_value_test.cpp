#include "monotest/rank_value.hpp"

#include <gtest/gtest.h>

#include "monotest/random.hpp"

namespace monotest {
namespace {

RankValue digits(std::uint32_t base, std::initializer_list<Digit> d) {
  return RankValue::from_digits(base, DigitString(d.begin(), d.end()));
}

TEST(RankValue, DigitFormHasIntegerValue) {
  EXPECT_EQ(digits(4, {1, 2}).to_integer(), 6);
  EXPECT_EQ(digits(4, {2, 2}).to_integer(), 10);
  EXPECT_EQ(digits(5, {0, 0, 0}).to_integer(), 0);
}

TEST(RankValue, MixedFormsCompareByValue) {
  EXPECT_EQ(digits(4, {1, 3}), RankValue(7));
  EXPECT_EQ(RankValue(7), digits(4, {1, 3}));
  EXPECT_LT(digits(4, {1, 3}), RankValue(8));
  EXPECT_GT(digits(4, {1, 3}), RankValue(6));
  // Integer too wide for two base-4 digits.
  EXPECT_LT(digits(4, {3, 3}), RankValue(16));
  EXPECT_GT(RankValue(16), digits(4, {3, 3}));
  // Different bases and widths.
  EXPECT_EQ(digits(4, {0, 1, 3}), digits(8, {7}));
  EXPECT_LT(digits(3, {2, 2}), digits(10, {0, 9}));
}

TEST(RankValue, RejectsInvalidDigits) {
  EXPECT_THROW(digits(4, {4}), DomainError);
  EXPECT_THROW(digits(1, {0}), DomainError);
  EXPECT_THROW(RankValue(-1), DomainError);
}

TEST(RankValue, WideValuesRoundTripThroughDigits) {
  const BigInt big = big_pow(1000, 10) - 1;  // beyond 64 bits
  const RankValue v(big);
  const auto d = v.digits(1000, 10);
  ASSERT_TRUE(d.has_value());
  for (Digit x : *d) EXPECT_EQ(x, 999u);
  EXPECT_FALSE(v.digits(1000, 9).has_value());
  EXPECT_EQ(RankValue::from_digits(1000, *d), v);
  EXPECT_EQ(v.to_string(), big.str());
}

TEST(RankValue, LexicographicOrderAgreesWithIntegerOrder) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto base = static_cast<std::uint32_t>(2 + uniform_below(rng, 9));
    const std::size_t len = 1 + uniform_below(rng, 6);
    DigitString a(len), b(len);
    for (auto& x : a) x = static_cast<Digit>(uniform_below(rng, base));
    for (auto& x : b) x = static_cast<Digit>(uniform_below(rng, base));
    const auto va = RankValue::from_digits(base, a);
    const auto vb = RankValue::from_digits(base, b);
    const auto ia = va.to_integer();
    const auto ib = vb.to_integer();
    EXPECT_EQ(va < vb, ia < ib);
    EXPECT_EQ(va == vb, ia == ib);
    EXPECT_EQ(va < RankValue(ib), ia < ib);
    EXPECT_EQ(RankValue(ia) < vb, ia < ib);
  }
}

}  // namespace
}  // namespace monotest
