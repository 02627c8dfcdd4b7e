#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "monotest/errors.hpp"

namespace monotest {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
// Expression templates off: values are stored and compared, rarely chained.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational::backend_type,
                                               boost::multiprecision::et_off>;

using Digit = std::uint32_t;
// Most significant digit first. Twelve inline digits covers the instance sizes
// used in practice without touching the heap.
using DigitString = boost::container::small_vector<Digit, 12>;

inline BigInt big_pow(std::uint64_t base, std::size_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

// Base-`base` expansion of `value` padded with leading zeros to exactly
// `length` digits; nullopt when value >= base^length.
inline std::optional<DigitString> integer_to_digits(const BigInt& value, std::uint32_t base,
                                                    std::size_t length) {
  if (value < 0) return std::nullopt;
  DigitString out(length, 0);
  if (value <= std::numeric_limits<std::uint64_t>::max()) {
    auto v = value.convert_to<std::uint64_t>();
    for (std::size_t i = length; i-- > 0 && v != 0;) {
      out[i] = static_cast<Digit>(v % base);
      v /= base;
    }
    if (v != 0) return std::nullopt;
    return out;
  }
  BigInt v = value;
  for (std::size_t i = length; i-- > 0 && v != 0;) {
    out[i] = static_cast<Digit>(static_cast<std::uint64_t>(v % base));
    v /= base;
  }
  if (v != 0) return std::nullopt;
  return out;
}

inline BigInt digits_to_integer(std::span<const Digit> digits, std::uint32_t base) {
  BigInt v = 0;
  for (Digit d : digits) v = v * base + d;
  return v;
}

/// A non-negative range value with a total order.
///
/// Two representations share one order: a plain integer (ingested data, or
/// anything computed arithmetically) and a fixed-length base-m digit vector
/// (generated instances, where r = m^k quickly outgrows 64 bits). Values of
/// either form with the same numeric value compare equal.
class RankValue {
 public:
  struct Digits {
    std::uint32_t base;
    DigitString digits;
  };

  RankValue() : rep_(BigInt(0)) {}
  template <std::integral T>
  RankValue(T v) : rep_(BigInt(checked_nonnegative(v))) {}  // NOLINT(google-explicit-constructor)
  explicit RankValue(BigInt v) : rep_(std::move(v)) {
    if (std::get<BigInt>(rep_) < 0) throw DomainError("rank values are non-negative");
  }

  static RankValue from_digits(std::uint32_t base, DigitString digits) {
    if (base < 2) throw DomainError("digit base must be at least 2");
    for (Digit d : digits) {
      if (d >= base) throw DomainError("digit out of range for base");
    }
    RankValue v;
    v.rep_ = Digits{base, std::move(digits)};
    return v;
  }

  bool has_digit_form() const noexcept { return std::holds_alternative<Digits>(rep_); }

  // Only valid when has_digit_form().
  const Digits& digit_form() const { return std::get<Digits>(rep_); }

  BigInt to_integer() const {
    if (const auto* d = std::get_if<Digits>(&rep_)) return digits_to_integer({d->digits.data(), d->digits.size()}, d->base);
    return std::get<BigInt>(rep_);
  }

  // Exactly `length` base-`base` digits, or nullopt if the value does not fit.
  std::optional<DigitString> digits(std::uint32_t base, std::size_t length) const {
    if (const auto* d = std::get_if<Digits>(&rep_)) {
      if (d->base == base && d->digits.size() == length) return d->digits;
      if (d->base == base && d->digits.size() > length) {
        const auto extra = d->digits.size() - length;
        if (std::any_of(d->digits.begin(), d->digits.begin() + extra, [](Digit x) { return x != 0; }))
          return std::nullopt;
        return DigitString(d->digits.begin() + extra, d->digits.end());
      }
    }
    return integer_to_digits(to_integer(), base, length);
  }

  std::string to_string() const { return to_integer().str(); }

  friend std::strong_ordering operator<=>(const RankValue& a, const RankValue& b) {
    const auto* da = std::get_if<Digits>(&a.rep_);
    const auto* db = std::get_if<Digits>(&b.rep_);
    if (da && db) {
      if (da->base == db->base && da->digits.size() == db->digits.size()) {
        return lexicographic(da->digits, db->digits);
      }
      return cmp(a.to_integer(), b.to_integer());
    }
    if (!da && !db) return cmp(std::get<BigInt>(a.rep_), std::get<BigInt>(b.rep_));
    if (da) return mixed(*da, std::get<BigInt>(b.rep_));
    return 0 <=> mixed(*db, std::get<BigInt>(a.rep_));
  }

  friend bool operator==(const RankValue& a, const RankValue& b) { return (a <=> b) == 0; }

 private:
  template <std::integral T>
  static std::uint64_t checked_nonnegative(T v) {
    if constexpr (std::is_signed_v<T>) {
      if (v < 0) throw DomainError("rank values are non-negative");
    }
    return static_cast<std::uint64_t>(v);
  }

  static std::strong_ordering cmp(const BigInt& a, const BigInt& b) {
    const int c = a.compare(b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  static std::strong_ordering lexicographic(const DigitString& a, const DigitString& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] <=> b[i];
    }
    return std::strong_ordering::equal;
  }

  // Digit vector vs integer: bring the integer into the same base and width.
  static std::strong_ordering mixed(const Digits& d, const BigInt& v) {
    auto vd = integer_to_digits(v, d.base, d.digits.size());
    if (!vd) return std::strong_ordering::less;
    return lexicographic(d.digits, *vd);
  }

  std::variant<BigInt, Digits> rep_;
};

}  // namespace monotest
