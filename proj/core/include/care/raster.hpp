#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace care::raster {

// Row-major grayscale raster with intensities in [0,1].
// Immutable once constructed; the constructor enforces the value range.
class ImageGrid {
 public:
  ImageGrid(int width, int height, std::vector<double> values);

  static ImageGrid filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(int x, int y) const { return values_[index(x, y)]; }
  // Zero outside the raster.
  double at_or_zero(int x, int y) const noexcept {
    return contains(x, y) ? values_[index(x, y)] : 0.0;
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const double> values() const noexcept { return values_; }

  bool is_binary() const noexcept;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<double> values_;
};

enum class ElementShape { square, cross };

struct StructuringElement {
  int radius = 1;
  ElementShape shape = ElementShape::square;

  StructuringElement() = default;
  StructuringElement(int r, ElementShape s);

  // Offsets (dx,dy) covered by the footprint, centre included.
  std::vector<std::pair<int, int>> offsets() const;
};

ImageGrid load_image(const std::filesystem::path& path);
// Format picked from the extension: .png or .pgm. Values quantized to 8 bits.
void save_image(const ImageGrid& img, const std::filesystem::path& path);

// 8-bit RGB PNG; rgb holds width*height*3 values in [0,1].
void save_rgb_png(int width, int height, std::span<const double> rgb,
                  const std::filesystem::path& path);

ImageGrid binarize(const ImageGrid& img, double threshold);
ImageGrid complement(const ImageGrid& binary);

// Value assumed for pixels outside the raster. Zero is the default for both
// operators; dilate(X) == complement(erode(complement(X), se, Border::one)).
enum class Border { zero, one };

ImageGrid erode(const ImageGrid& binary, const StructuringElement& se,
                Border border = Border::zero);
ImageGrid dilate(const ImageGrid& binary, const StructuringElement& se,
                 Border border = Border::zero);
ImageGrid opening(const ImageGrid& binary, const StructuringElement& se);

// Pixelwise product of two equally sized rasters.
ImageGrid multiply(const ImageGrid& a, const ImageGrid& b);

}  // namespace care::raster
