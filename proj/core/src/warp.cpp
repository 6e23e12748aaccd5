#include "care/warp.hpp"

#include <algorithm>
#include <cmath>

#include "care/error.hpp"

namespace care::warp {

double sample_bilinear(const ImageGrid& img, double x, double y) {
  if (!(x > -1.0 && y > -1.0 && x < img.width() && y < img.height())) return 0.0;
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double tx = x - fx;
  const double ty = y - fy;
  const double v00 = img.at_or_zero(x0, y0);
  if (tx == 0.0 && ty == 0.0) return v00;
  const double v10 = img.at_or_zero(x0 + 1, y0);
  const double v01 = img.at_or_zero(x0, y0 + 1);
  const double v11 = img.at_or_zero(x0 + 1, y0 + 1);
  return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

WarpResult warp(const ImageGrid& source, const fitting::Transform& inverse_t, int out_w,
                int out_h) {
  if (out_w <= 0 || out_h <= 0) throw Error(ErrorKind::argument, "warp: empty output size");
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  std::vector<bool> footprint(out.size(), false);
  std::size_t degenerate = 0;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      Point2 s;
      try {
        s = fitting::eval_transform(inverse_t, {static_cast<double>(x), static_cast<double>(y)});
      } catch (const Error&) {
        ++degenerate;
        continue;
      }
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
        ++degenerate;
        continue;
      }
      const std::size_t idx = static_cast<std::size_t>(y) * out_w + x;
      footprint[idx] = s.x >= 0.0 && s.y >= 0.0 && s.x <= source.width() - 1.0 &&
                       s.y <= source.height() - 1.0;
      out[idx] = std::clamp(sample_bilinear(source, s.x, s.y), 0.0, 1.0);
    }
  }
  return WarpResult{ImageGrid(out_w, out_h, std::move(out)), degenerate, std::move(footprint)};
}

OverlayImage render_overlay(const ImageGrid& warped_source_vessels,
                            const ImageGrid& target_vessels) {
  if (warped_source_vessels.width() != target_vessels.width() ||
      warped_source_vessels.height() != target_vessels.height()) {
    throw Error(ErrorKind::argument, "overlay: dimension mismatch");
  }
  OverlayImage o;
  o.width = target_vessels.width();
  o.height = target_vessels.height();
  o.rgb.resize(target_vessels.size() * 3, 0.0);
  auto r = warped_source_vessels.values();
  auto g = target_vessels.values();
  for (std::size_t i = 0; i < target_vessels.size(); ++i) {
    o.rgb[3 * i] = r[i];
    o.rgb[3 * i + 1] = g[i];
  }
  return o;
}

void save_overlay(const OverlayImage& overlay, const std::filesystem::path& path) {
  raster::save_rgb_png(overlay.width, overlay.height, overlay.rgb, path);
}

}  // namespace care::warp
