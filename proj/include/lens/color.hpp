// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace lens {

// Linear RGB triple; radiance fields emit values in [0, 1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  Rgb operator+(const Rgb& o) const { return {r + o.r, g + o.g, b + o.b}; }
  Rgb operator*(double s) const { return {r * s, g * s, b * s}; }
  Rgb& operator+=(const Rgb& o) { r += o.r; g += o.g; b += o.b; return *this; }

  bool operator==(const Rgb& o) const = default;
};

inline Rgb operator*(double s, const Rgb& c) { return c * s; }

}  // namespace lens
