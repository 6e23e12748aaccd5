#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "care/raster.hpp"

namespace care::vessel {

using raster::ImageGrid;

enum class Modality { octa, cfp, wfcfp, fa, unknown };

std::string_view to_string(Modality m);
// Unrecognised names map to Modality::unknown.
Modality parse_modality(std::string_view name);

// Unified cross-modal representation: per-pixel vessel probability.
struct VesselMap {
  ImageGrid grid;
  Modality source_modality = Modality::unknown;
};

struct VesselnessParams {
  std::vector<double> scales{1.0, 2.0, 3.0};
  double beta = 0.5;    // blob-vs-line sensitivity
  double gamma = 15.0;  // structureness normalisation, on [0,1] intensities
  bool bright_ridges = true;
};

// Multi-scale Hessian ridge filter; output is rescaled so its maximum is 1
// (all zeros when the image has no ridge structure).
VesselMap enhance_vesselness(const ImageGrid& raw, const VesselnessParams& params = {},
                             Modality modality = Modality::unknown);

// Binary centreline image (1 = skeleton pixel).
struct Skeleton {
  ImageGrid grid;
};

// Zhang–Suen thinning. Each pass marks candidates in parallel, then confirms
// them in raster order against the current image so that no 8-connected
// component is ever removed or split.
Skeleton skeletonize(const ImageGrid& binary_map);

// Number of 8-connected foreground components of a binary raster.
int count_components(const ImageGrid& binary);

}  // namespace care::vessel
