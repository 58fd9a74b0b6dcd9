// SPDX-License-Identifier: Apache-2.0
#include "lens/num_io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "lens/errors.hpp"

namespace lens {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, bool allow_nonfinite) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw ParseError("bad number \"" + std::string(token) + "\"");
  if (!allow_nonfinite && !std::isfinite(v))
    throw ParseError("non-finite number \"" + std::string(token) + "\"");
  return v;
}

long long parse_int(std::string_view token) {
  long long v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || v < 0)
    throw ParseError("bad integer \"" + std::string(token) + "\"");
  return v;
}

}  // namespace lens
