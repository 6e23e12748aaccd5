#include <string>

#include "care/error.hpp"
#include "care/fitting.hpp"

namespace care::fitting {

RanPolyResult fit_ran_poly(const CorrespondenceSet& pairs, const RansacConfig& cfg, int degree) {
  if (degree < 1) throw Error(ErrorKind::argument, "polynomial degree must be >= 1");
  RansacResult ransac = ransac_homography(pairs, cfg);
  const CorrespondenceSet inliers = pairs.select(ransac.inlier_mask);
  const std::size_t needed = Polynomial2D::coefficient_count(degree);
  if (inliers.size() < needed) {
    throw Error(ErrorKind::insufficient_data,
                "RANSAC kept " + std::to_string(inliers.size()) + " inliers, degree-" +
                    std::to_string(degree) + " polynomial needs " + std::to_string(needed));
  }
  return RanPolyResult{fit_polynomial(inliers, degree), std::move(ransac.inlier_mask)};
}

Transform invert_for_warp(const Transform& t, const CorrespondenceSet& inliers, int degree) {
  if (t.is_homography()) {
    const Transform folded = with_offset(t, {0.0, 0.0});
    return Transform{std::get<Homography>(folded.model).inverse(), {0.0, 0.0}};
  }
  CorrespondenceSet swapped;
  swapped.pairs.reserve(inliers.size());
  for (const auto& c : inliers.pairs) swapped.pairs.push_back({eval_transform(t, c.src), c.src});
  return Transform{fit_polynomial(swapped, degree), {0.0, 0.0}};
}

}  // namespace care::fitting
