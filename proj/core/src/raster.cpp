#include "care/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "care/error.hpp"

namespace care::raster {

ImageGrid::ImageGrid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::argument, "image dimensions must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::argument, "image value count does not match width*height");
  }
  for (double v : values_) {
    // Written so NaN fails too.
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::argument, "image value outside [0,1]: " + std::to_string(v));
    }
  }
}

ImageGrid ImageGrid::filled(int width, int height, double value) {
  std::size_t n = width > 0 && height > 0
                      ? static_cast<std::size_t>(width) * static_cast<std::size_t>(height)
                      : 0;
  return ImageGrid(width, height, std::vector<double>(n, value));
}

bool ImageGrid::is_binary() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

StructuringElement::StructuringElement(int r, ElementShape s) : radius(r), shape(s) {
  if (r < 1) throw Error(ErrorKind::argument, "structuring element radius must be >= 1");
}

std::vector<std::pair<int, int>> StructuringElement::offsets() const {
  std::vector<std::pair<int, int>> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (shape == ElementShape::cross && dx != 0 && dy != 0) continue;
      out.emplace_back(dx, dy);
    }
  }
  return out;
}

ImageGrid binarize(const ImageGrid& img, double threshold) {
  std::vector<double> out(img.size());
  auto in = img.values();
  std::transform(in.begin(), in.end(), out.begin(),
                 [threshold](double v) { return v >= threshold ? 1.0 : 0.0; });
  return ImageGrid(img.width(), img.height(), std::move(out));
}

ImageGrid multiply(const ImageGrid& a, const ImageGrid& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::argument, "multiply: dimension mismatch");
  }
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return ImageGrid(a.width(), a.height(), std::move(out));
}

namespace {

void require_binary(const ImageGrid& img, const char* op) {
  if (!img.is_binary()) {
    throw Error(ErrorKind::contract, std::string(op) + ": input image is not binary");
  }
}

// Erosion asks "all footprint pixels set", dilation "any footprint pixel set".
template <bool All>
ImageGrid morph(const ImageGrid& img, const StructuringElement& se, Border border) {
  const double outside = border == Border::one ? 1.0 : 0.0;
  const auto offsets = se.offsets();
  const int w = img.width();
  const int h = img.height();
  std::vector<double> out(img.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = All;
      for (auto [dx, dy] : offsets) {
        const int sx = x + dx;
        const int sy = y + dy;
        const double v = img.contains(sx, sy) ? img.at(sx, sy) : outside;
        if constexpr (All) {
          if (v == 0.0) { hit = false; break; }
        } else {
          if (v != 0.0) { hit = true; break; }
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = hit ? 1.0 : 0.0;
    }
  }
  return ImageGrid(w, h, std::move(out));
}

}  // namespace

ImageGrid complement(const ImageGrid& binary) {
  require_binary(binary, "complement");
  std::vector<double> out(binary.size());
  auto in = binary.values();
  std::transform(in.begin(), in.end(), out.begin(), [](double v) { return 1.0 - v; });
  return ImageGrid(binary.width(), binary.height(), std::move(out));
}

ImageGrid erode(const ImageGrid& binary, const StructuringElement& se, Border border) {
  require_binary(binary, "erode");
  return morph<true>(binary, se, border);
}

ImageGrid dilate(const ImageGrid& binary, const StructuringElement& se, Border border) {
  require_binary(binary, "dilate");
  return morph<false>(binary, se, border);
}

ImageGrid opening(const ImageGrid& binary, const StructuringElement& se) {
  return dilate(erode(binary, se), se);
}

}  // namespace care::raster
