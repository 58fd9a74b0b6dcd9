// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace lens {

// Shortest decimal that parses back to exactly `v`. All text formats in this
// project use it so that save/load round-trips are bit-exact.
std::string format_double(double v);

// Strict double parser: the whole token must be consumed and the value must
// be finite unless `allow_nonfinite`. Throws ParseError otherwise.
double parse_double(std::string_view token, bool allow_nonfinite = false);

// Strict non-negative integer parser; throws ParseError.
long long parse_int(std::string_view token);

}  // namespace lens
