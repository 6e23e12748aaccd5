#include <cmath>
#include <limits>
#include <string>

#include "care/error.hpp"
#include "care/fitting.hpp"

namespace care::fitting {

double Homography::determinant() const {
  return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
         h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Homography Homography::normalized() const {
  double s = h[8];
  if (s == 0.0) {
    double f = 0.0;
    for (double v : h) f += v * v;
    s = std::sqrt(f);
  }
  if (s == 0.0 || !std::isfinite(s)) throw Error(ErrorKind::degeneracy, "zero homography");
  Homography out;
  for (int i = 0; i < 9; ++i) out.h[i] = h[i] / s;
  return out;
}

Homography Homography::inverse() const {
  const double det = determinant();
  const double scale = std::abs(h[8]) > 0.0 ? std::abs(h[8]) : 1.0;
  if (!(std::abs(det) / (scale * scale * scale) > 1e-12)) {
    throw Error(ErrorKind::degeneracy, "homography is singular");
  }
  Homography inv;
  inv.h = {h[4] * h[8] - h[5] * h[7], h[2] * h[7] - h[1] * h[8], h[1] * h[5] - h[2] * h[4],
           h[5] * h[6] - h[3] * h[8], h[0] * h[8] - h[2] * h[6], h[2] * h[3] - h[0] * h[5],
           h[3] * h[7] - h[4] * h[6], h[1] * h[6] - h[0] * h[7], h[0] * h[4] - h[1] * h[3]};
  for (double& v : inv.h) v /= det;
  return inv.normalized();
}

Homography compose(const Homography& outer, const Homography& inner) {
  Homography out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += outer(r, k) * inner(k, c);
      out.h[3 * r + c] = acc;
    }
  }
  return out.normalized();
}

Polynomial2D::Polynomial2D(int degree)
    : Polynomial2D(degree, std::vector<double>(coefficient_count(std::max(degree, 0)), 0.0),
                   std::vector<double>(coefficient_count(std::max(degree, 0)), 0.0)) {}

Polynomial2D::Polynomial2D(int degree, std::vector<double> a, std::vector<double> b)
    : degree_(degree), a_(std::move(a)), b_(std::move(b)) {
  if (degree < 1) throw Error(ErrorKind::argument, "polynomial degree must be >= 1");
  const std::size_t n = coefficient_count(degree);
  if (a_.size() != n || b_.size() != n) {
    throw Error(ErrorKind::argument, "polynomial of degree " + std::to_string(degree) +
                                         " needs " + std::to_string(n) + " coefficients per axis");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(a_[k]) || !std::isfinite(b_[k])) {
      throw Error(ErrorKind::argument, "polynomial coefficients must be finite");
    }
  }
}

Polynomial2D Polynomial2D::identity(int degree) {
  Polynomial2D p(degree);
  p.set_a(1, 0, 1.0);
  p.set_b(0, 1, 1.0);
  return p;
}

std::size_t Polynomial2D::index(int i, int j) {
  if (i < 0 || j < 0) throw Error(ErrorKind::argument, "negative monomial power");
  const int k = i + j;
  return coefficient_count(k - 1) + static_cast<std::size_t>(j);
}

Point2 Polynomial2D::operator()(Point2 uv) const {
  // Powers of u and v up to the degree, then one pass over the monomials.
  std::vector<double> up(degree_ + 1), vp(degree_ + 1);
  up[0] = vp[0] = 1.0;
  for (int k = 1; k <= degree_; ++k) {
    up[k] = up[k - 1] * uv.x;
    vp[k] = vp[k - 1] * uv.y;
  }
  double x = 0.0, y = 0.0;
  std::size_t idx = 0;
  for (int k = 0; k <= degree_; ++k) {
    for (int j = 0; j <= k; ++j, ++idx) {
      const double m = up[k - j] * vp[j];
      x += a_[idx] * m;
      y += b_[idx] * m;
    }
  }
  return {x, y};
}

Point2 eval_transform(const Transform& t, Point2 uv) {
  Point2 out;
  if (const auto* h = std::get_if<Homography>(&t.model)) {
    const double x = (*h)(0, 0) * uv.x + (*h)(0, 1) * uv.y + (*h)(0, 2);
    const double y = (*h)(1, 0) * uv.x + (*h)(1, 1) * uv.y + (*h)(1, 2);
    const double w = (*h)(2, 0) * uv.x + (*h)(2, 1) * uv.y + (*h)(2, 2);
    if (!(std::abs(w) >= 1e-12)) {
      throw Error(ErrorKind::degeneracy, "homogeneous coordinate vanishes");
    }
    out = {x / w, y / w};
  } else {
    out = std::get<Polynomial2D>(t.model)(uv);
  }
  return out + t.offset;
}

Transform with_offset(Transform t, Point2 offset) {
  if (auto* h = std::get_if<Homography>(&t.model)) {
    const Point2 total = t.offset + offset;
    *h = compose(Homography::translation(total.x, total.y), *h);
    t.offset = {0.0, 0.0};
  } else {
    t.offset = t.offset + offset;
  }
  return t;
}

double reprojection_error(const Homography& h, const Correspondence& c) {
  const double x = h(0, 0) * c.src.x + h(0, 1) * c.src.y + h(0, 2);
  const double y = h(1, 0) * c.src.x + h(1, 1) * c.src.y + h(1, 2);
  const double w = h(2, 0) * c.src.x + h(2, 1) * c.src.y + h(2, 2);
  if (!(std::abs(w) >= 1e-12)) return std::numeric_limits<double>::infinity();
  return std::hypot(x / w - c.tgt.x, y / w - c.tgt.y);
}

void RansacConfig::validate() const {
  if (!(reproj_threshold > 0.0)) throw Error(ErrorKind::argument, "RANSAC threshold must be > 0");
  if (max_iterations < 1) throw Error(ErrorKind::argument, "RANSAC needs >= 1 iteration");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::argument, "RANSAC confidence must lie in (0,1)");
  }
}

std::size_t RansacResult::inlier_count() const {
  std::size_t n = 0;
  for (bool b : inlier_mask) n += b;
  return n;
}

}  // namespace care::fitting
