#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "care/fitting.hpp"
#include "care/raster.hpp"

namespace care::warp {

using raster::ImageGrid;

// Bilinear sample with zero outside the raster.
double sample_bilinear(const ImageGrid& img, double x, double y);

struct WarpResult {
  ImageGrid image;
  std::size_t degenerate_pixels = 0;  // output pixels where the transform blew up
  std::vector<bool> footprint;        // output pixels that sampled inside the source
};

// Inverse mapping: output (x,y) takes source(inverse_t(x,y)).
WarpResult warp(const ImageGrid& source, const fitting::Transform& inverse_t, int out_w,
                int out_h);

// Red = warped source vessels, green = target vessels, blue = 0.
struct OverlayImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // row-major triplets
};

OverlayImage render_overlay(const ImageGrid& warped_source_vessels,
                            const ImageGrid& target_vessels);

void save_overlay(const OverlayImage& overlay, const std::filesystem::path& path);

}  // namespace care::warp
