#include "care/crop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "care/error.hpp"

namespace care::crop {

namespace {

void check_box(const RoiBox& box, const char* name) {
  for (double v : {box.x_min, box.y_min, box.x_max, box.y_max}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::argument, std::string(name) + " box is not finite");
  }
  if (box.x_min > box.x_max || box.y_min > box.y_max) {
    throw Error(ErrorKind::argument, std::string(name) + " box has inverted corners");
  }
}

}  // namespace

CropSquare crop_square(const RoiBox& macula, const RoiBox& od, RadiusRule rule) {
  if (macula.label != RoiLabel::macula || od.label != RoiLabel::optic_disc) {
    throw Error(ErrorKind::argument, "crop: ROI labels must be (macula, optic_disc)");
  }
  check_box(macula, "macula");
  check_box(od, "optic disc");
  // The optic disc may be a point box; the macula needs an area to have a centre.
  if (!(macula.x_max > macula.x_min && macula.y_max > macula.y_min)) {
    throw Error(ErrorKind::argument, "crop: macula box has zero area");
  }

  const Point2 c = macula.center();
  const std::array<Point2, 4> corners{Point2{od.x_min, od.y_min}, Point2{od.x_max, od.y_min},
                                      Point2{od.x_min, od.y_max}, Point2{od.x_max, od.y_max}};
  double d = 0.0;
  if (rule == RadiusRule::farthest_corner) {
    for (Point2 p : corners) d = std::max(d, distance(p, c));
  } else {
    const Point2 axis = od.center() - c;
    const double len = std::hypot(axis.x, axis.y);
    if (len == 0.0) {
      for (Point2 p : corners) d = std::max(d, distance(p, c));
    } else {
      for (Point2 p : corners) {
        const Point2 r = p - c;
        d = std::max(d, (r.x * axis.x + r.y * axis.y) / len);
      }
    }
  }

  CropSquare sq;
  sq.center = c;
  sq.side = std::max(1, static_cast<int>(std::lround(2.0 * d)));
  sq.origin = {c.x - 0.5 * sq.side, c.y - 0.5 * sq.side};
  return sq;
}

CropFrame clamp_to_image(const CropSquare& square, int image_w, int image_h) {
  if (image_w <= 0 || image_h <= 0) throw Error(ErrorKind::argument, "crop: empty image");
  if (!(square.center.x >= 0.0 && square.center.x < image_w && square.center.y >= 0.0 &&
        square.center.y < image_h)) {
    throw Error(ErrorKind::argument, "crop: macula centre outside the image");
  }
  CropFrame f;
  f.center = square.center;
  f.side = std::min({square.side, image_w, image_h});
  auto place = [&](double origin, int limit) {
    // Shrinking keeps the square centred on the macula before translation.
    const double o = origin + 0.5 * (square.side - f.side);
    const int rounded = static_cast<int>(std::floor(o + 0.5));
    return std::clamp(rounded, 0, limit - f.side);
  };
  f.x0 = place(square.origin.x, image_w);
  f.y0 = place(square.origin.y, image_h);
  return f;
}

CropFrame compute_crop(const RoiBox& macula, const RoiBox& od, int image_w, int image_h,
                       RadiusRule rule) {
  return clamp_to_image(crop_square(macula, od, rule), image_w, image_h);
}

raster::ImageGrid extract(const raster::ImageGrid& img, const CropFrame& frame) {
  if (frame.side < 1 || frame.x0 < 0 || frame.y0 < 0 || frame.x0 + frame.side > img.width() ||
      frame.y0 + frame.side > img.height()) {
    throw Error(ErrorKind::argument, "crop frame exceeds image bounds");
  }
  std::vector<double> out(static_cast<std::size_t>(frame.side) * frame.side);
  for (int j = 0; j < frame.side; ++j) {
    for (int i = 0; i < frame.side; ++i) {
      out[static_cast<std::size_t>(j) * frame.side + i] = img.at(frame.x0 + i, frame.y0 + j);
    }
  }
  return raster::ImageGrid(frame.side, frame.side, std::move(out));
}

raster::ImageGrid paste(const raster::ImageGrid& img, const raster::ImageGrid& patch, int x0,
                        int y0) {
  std::vector<double> out(img.values().begin(), img.values().end());
  for (int j = 0; j < patch.height(); ++j) {
    for (int i = 0; i < patch.width(); ++i) {
      if (img.contains(x0 + i, y0 + j)) {
        out[static_cast<std::size_t>(y0 + j) * img.width() + x0 + i] = patch.at(i, j);
      }
    }
  }
  return raster::ImageGrid(img.width(), img.height(), std::move(out));
}

}  // namespace care::crop
