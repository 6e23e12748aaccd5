#pragma once

#include "care/geometry.hpp"
#include "care/raster.hpp"

namespace care::crop {

enum class RoiLabel { macula, optic_disc };

// Axis-aligned box in full-target pixel coordinates.
struct RoiBox {
  RoiLabel label = RoiLabel::macula;
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
};

// How far the square reaches towards the optic disc.
enum class RadiusRule {
  farthest_corner,  // OD-box corner farthest from the macula centre
  along_axis,       // farthest OD-box extent projected on the macula->OD direction
};

// Macula-centred square before it is fitted into the image.
struct CropSquare {
  Point2 center;
  int side = 0;
  Point2 origin;  // center - side/2, not rounded
};

struct CropFrame {
  Point2 center;
  int side = 0;
  int x0 = 0;
  int y0 = 0;
};

CropSquare crop_square(const RoiBox& macula, const RoiBox& od,
                       RadiusRule rule = RadiusRule::farthest_corner);

// Rounds the origin to the pixel grid, translates the square inside the image
// and shrinks it only when it cannot fit.
CropFrame clamp_to_image(const CropSquare& square, int image_w, int image_h);

CropFrame compute_crop(const RoiBox& macula, const RoiBox& od, int image_w, int image_h,
                       RadiusRule rule = RadiusRule::farthest_corner);

raster::ImageGrid extract(const raster::ImageGrid& img, const CropFrame& frame);

// Writes `patch` into a copy of `img` with its top-left corner at (x0,y0).
raster::ImageGrid paste(const raster::ImageGrid& img, const raster::ImageGrid& patch, int x0,
                        int y0);

inline Point2 lift_to_full(Point2 pt, const CropFrame& frame) {
  return {pt.x + frame.x0, pt.y + frame.y0};
}
inline Point2 lower_to_crop(Point2 pt, const CropFrame& frame) {
  return {pt.x - frame.x0, pt.y - frame.y0};
}

}  // namespace care::crop
