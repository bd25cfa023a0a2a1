// Copyright 2026 The koopman-dual Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KOOPMAN_CSV_HPP_
#define KOOPMAN_CSV_HPP_

#include <charconv>
#include <string>
#include <system_error>

namespace koopman {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

/// Space-separated exponents, the header form used in matrix CSVs ("2 0").
template <class Index>
std::string exponents_text(const Index& n) {
  std::string s;
  for (std::size_t d = 0; d < n.size(); ++d) {
    if (d) s += ' ';
    s += std::to_string(n[d]);
  }
  return s;
}

}  // namespace koopman

#endif  // KOOPMAN_CSV_HPP_
