// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lens/color.hpp"
#include "lens/errors.hpp"

namespace lens {

// Row-major linear-RGB raster, y = 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  Image() = default;
  Image(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw DomainError("image size must be positive");
    pixels.resize(static_cast<std::size_t>(w) * h);
  }

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Binary PPM (P6, maxval 255). Channels are quantized with
// round(255 * clamp(v, 0, 1)), so equal float images give equal bytes.
void write_ppm(const Image& image, const std::string& path);
Image read_ppm(const std::string& path);  // values come back as v / 255

// Mean-pools factor x factor blocks; both dimensions must divide evenly.
Image box_downsample(const Image& image, int factor);

// Mean squared error over all pixels and channels; sizes must match.
double image_mse(const Image& a, const Image& b);

}  // namespace lens
