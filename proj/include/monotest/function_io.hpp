#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "monotest/errors.hpp"
#include "monotest/function_model.hpp"
#include "monotest/rank_value.hpp"

// Text format:
//   n r
//   f(0)
//   ...
//   f(n-1)
// all in decimal, of arbitrary precision.

namespace monotest {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline BigInt parse_decimal(std::string_view token, std::size_t line) {
  if (token.empty()) throw ParseError(line, "expected a decimal value");
  for (char c : token) {
    if (c < '0' || c > '9') throw ParseError(line, "not a non-negative decimal integer: '" + std::string(token) + "'");
  }
  return BigInt(std::string(token));
}

}  // namespace detail

inline void write_function(std::ostream& os, const LineFunction& f) {
  os << f.size() << ' ' << f.range_bound().to_string() << '\n';
  for (const auto& v : f.values()) os << v.to_string() << '\n';
}

inline std::string format_function(const LineFunction& f) {
  std::ostringstream os;
  write_function(os, f);
  return os.str();
}

inline LineFunction read_function(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw ParseError(1, "empty input, expected header 'n r'");
  const auto header = detail::trim(line);
  const auto space = header.find_first_of(" \t");
  if (space == std::string_view::npos) throw ParseError(1, "header must be 'n r'");
  const auto n_token = header.substr(0, space);
  const auto r_token = detail::trim(header.substr(space));
  const BigInt n_big = detail::parse_decimal(n_token, 1);
  const BigInt r = detail::parse_decimal(r_token, 1);
  if (n_big < 1 || n_big > (BigInt(1) << 40)) throw ParseError(1, "n must be in [1, 2^40]");
  const auto n = n_big.convert_to<std::size_t>();

  std::vector<RankValue> values;
  values.reserve(n);
  while (values.size() < n) {
    ++line_no;
    if (!std::getline(is, line)) {
      throw ParseError(line_no, "expected " + std::to_string(n) + " values, found " + std::to_string(values.size()));
    }
    BigInt v = detail::parse_decimal(detail::trim(line), line_no);
    if (v >= r) throw ParseError(line_no, "value is not below the range bound " + r.str());
    values.emplace_back(std::move(v));
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) throw ParseError(line_no, "trailing content after " + std::to_string(n) + " values");
  }
  return LineFunction(std::move(values), RankValue(r));
}

inline LineFunction parse_function(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_function(is);
}

inline LineFunction load_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_function(in);
}

}  // namespace monotest
