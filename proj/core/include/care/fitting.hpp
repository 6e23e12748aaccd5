#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "care/geometry.hpp"

namespace care::fitting {

// 3x3 projective map, row-major, scaled so h[8] == 1 whenever it is nonzero.
struct Homography {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography identity() { return {}; }
  static Homography translation(double dx, double dy) { return {{1, 0, dx, 0, 1, dy, 0, 0, 1}}; }

  double operator()(int r, int c) const { return h[3 * r + c]; }
  double determinant() const;
  // Rescales so h[8] == 1 (Frobenius-normalised when h[8] is zero).
  Homography normalized() const;
  Homography inverse() const;

  friend bool operator==(const Homography&, const Homography&) = default;
};

Homography compose(const Homography& outer, const Homography& inner);

// Bivariate polynomial map of total degree n:
//   x = sum_{i+j<=n} a_ij u^i v^j,   y = sum_{i+j<=n} b_ij u^i v^j.
// Coefficients are stored per total degree k = 0..n, and within a degree by
// descending power of u: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
class Polynomial2D {
 public:
  explicit Polynomial2D(int degree);
  Polynomial2D(int degree, std::vector<double> a, std::vector<double> b);

  static Polynomial2D identity(int degree);

  static std::size_t coefficient_count(int degree) {
    return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  }
  static std::size_t index(int i, int j);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }

  double a(int i, int j) const { return a_.at(index(i, j)); }
  double b(int i, int j) const { return b_.at(index(i, j)); }
  void set_a(int i, int j, double v) { a_.at(index(i, j)) = v; }
  void set_b(int i, int j, double v) { b_.at(index(i, j)) = v; }

  Point2 operator()(Point2 uv) const;

  friend bool operator==(const Polynomial2D&, const Polynomial2D&) = default;

 private:
  int degree_;
  std::vector<double> a_;
  std::vector<double> b_;
};

// Source -> target coordinate map: model first, then the offset (crop origin).
struct Transform {
  std::variant<Homography, Polynomial2D> model = Homography{};
  Point2 offset{0.0, 0.0};

  bool is_homography() const { return std::holds_alternative<Homography>(model); }
  bool is_polynomial() const { return std::holds_alternative<Polynomial2D>(model); }
};

// Throws degeneracy when a homography sends the point to infinity.
Point2 eval_transform(const Transform& t, Point2 uv);

// Homographies fold the offset into the matrix; polynomials keep it separate.
Transform with_offset(Transform t, Point2 offset);

struct RansacConfig {
  double reproj_threshold = 10.0;
  int max_iterations = 2000;
  double confidence = 0.999;
  std::uint64_t seed = 42;

  void validate() const;
};

struct RansacResult {
  Homography homography;
  std::vector<bool> inlier_mask;
  int iterations = 0;

  std::size_t inlier_count() const;
};

struct RanPolyResult {
  Polynomial2D polynomial;
  std::vector<bool> inlier_mask;
};

// Normalised DLT: Hartley conditioning of both point sets, SVD null vector,
// denormalisation. Exact on noiseless projective data.
Homography fit_homography_dlt(const CorrespondenceSet& pairs);

// 4-point RANSAC with a seeded generator; the best consensus is refit by DLT.
RansacResult ransac_homography(const CorrespondenceSet& pairs, const RansacConfig& cfg = {});

// Least squares on the monomial basis, solved in coordinates scaled to [-1,1]^2
// and mapped back to raw-pixel coefficients.
Polynomial2D fit_polynomial(const CorrespondenceSet& pairs, int degree);

// RANSAC inlier filtering followed by polynomial least squares on the inliers.
RanPolyResult fit_ran_poly(const CorrespondenceSet& pairs, const RansacConfig& cfg = {},
                           int degree = 2);

// Target -> source mapping for resampling. Homographies invert exactly; a
// polynomial is refit with roles swapped on the inlier sources and their
// images under `t`.
Transform invert_for_warp(const Transform& t, const CorrespondenceSet& inliers, int degree);

double reprojection_error(const Homography& h, const Correspondence& c);

}  // namespace care::fitting
