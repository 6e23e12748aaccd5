#pragma once

#include <cstddef>
#include <vector>

#include "care/geometry.hpp"
#include "care/vessel.hpp"

namespace care::keypoints {

enum class JunctionKind { bifurcation, crossover };

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  JunctionKind kind = JunctionKind::bifurcation;
  double strength = 0.0;  // crossing number of the strongest merged candidate
};

inline constexpr std::size_t kDescriptorLength = 128;

struct Descriptor {
  std::vector<double> values;  // unit L2 norm
};

struct Feature {
  Keypoint keypoint;
  Descriptor descriptor;
};

// Number of 0->1 transitions around the circular 8-neighbourhood of (x,y).
int crossing_number(const raster::ImageGrid& skeleton, int x, int y);

// Skeleton pixels with crossing number >= 3, single-linkage merged when closer
// than nms_radius and reported at the cluster centroid.
std::vector<Keypoint> detect_junctions(const vessel::Skeleton& sk, double nms_radius);

// 4x4 spatial cells x 8 orientation bins of the vessel-probability gradient over
// a (2r+1)^2 patch, zero-padded outside the image. A patch without gradient
// gets the uniform vector 1/sqrt(D).
Descriptor describe(const vessel::VesselMap& img, const Keypoint& kp, int patch_radius);

std::vector<Feature> describe_all(const vessel::VesselMap& img,
                                  const std::vector<Keypoint>& kps, int patch_radius);

double descriptor_distance(const Descriptor& a, const Descriptor& b);

struct MatchOptions {
  double ratio = 0.8;
  bool cross_check = true;
};

// Index pair produced by the matcher: src[source] <-> tgt[target].
struct Match {
  std::size_t source;
  std::size_t target;
  double distance;
};

// Lowe ratio test against the second-nearest neighbour (skipped when only one
// candidate exists). With cross_check the pair must be mutual nearest
// neighbours and pass the ratio test from both sides, so swapping src and tgt
// swaps roles in the result.
std::vector<Match> match_descriptors(const std::vector<Descriptor>& src,
                                     const std::vector<Descriptor>& tgt,
                                     const MatchOptions& options = {});

CorrespondenceSet match_bruteforce(const std::vector<Feature>& src,
                                   const std::vector<Feature>& tgt,
                                   const MatchOptions& options = {});

}  // namespace care::keypoints
