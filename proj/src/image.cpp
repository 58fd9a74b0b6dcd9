// SPDX-License-Identifier: Apache-2.0
#include "lens/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lens {

namespace {

unsigned char quantize(double v) {
  return static_cast<unsigned char>(
      std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

}  // namespace

void write_ppm(const Image& image, const std::string& path) {
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.width) * image.height)
    throw DomainError("write_ppm: malformed image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Rgb& p = image.at(x, y);
      row[3 * x + 0] = quantize(p.r);
      row[3 * x + 1] = quantize(p.g);
      row[3 * x + 2] = quantize(p.b);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out.flush()) throw DomainError("failed writing " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (magic != "P6" || width < 1 || height < 1 || maxval != 255)
    throw ParseError(path + ": expected binary PPM with maxval 255");
  in.get();  // single whitespace after the header
  Image image(width, height);
  std::vector<unsigned char> row(static_cast<std::size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
    if (!in) throw ParseError(path + ": truncated pixel data");
    for (int x = 0; x < width; ++x)
      image.at(x, y) = Rgb{row[3 * x + 0] / 255.0, row[3 * x + 1] / 255.0,
                           row[3 * x + 2] / 255.0};
  }
  return image;
}

Image box_downsample(const Image& image, int factor) {
  if (factor < 1) throw DomainError("box_downsample: factor must be >= 1");
  if (image.width % factor != 0 || image.height % factor != 0)
    throw DomainError("box_downsample: size not divisible by factor");
  Image out(image.width / factor, image.height / factor);
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      Rgb acc;
      for (int dy = 0; dy < factor; ++dy)
        for (int dx = 0; dx < factor; ++dx)
          acc += image.at(x * factor + dx, y * factor + dy);
      out.at(x, y) = acc * inv;
    }
  return out;
}

double image_mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw DomainError("image_mse: size mismatch");
  if (a.pixels.empty()) throw DomainError("image_mse: empty image");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double dr = a.pixels[i].r - b.pixels[i].r;
    const double dg = a.pixels[i].g - b.pixels[i].g;
    const double db = a.pixels[i].b - b.pixels[i].b;
    acc += dr * dr + dg * dg + db * db;
  }
  return acc / (3.0 * static_cast<double>(a.pixels.size()));
}

}  // namespace lens
