#include "care/keypoints.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "care/error.hpp"

namespace care::keypoints {

namespace {

constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

constexpr int kCells = 4;
constexpr int kBins = 8;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

int crossing_number(const raster::ImageGrid& skeleton, int x, int y) {
  int transitions = 0;
  for (int k = 0; k < 8; ++k) {
    const double a = skeleton.at_or_zero(x + kDx[k], y + kDy[k]);
    const double b = skeleton.at_or_zero(x + kDx[(k + 1) % 8], y + kDy[(k + 1) % 8]);
    if (a == 0.0 && b != 0.0) ++transitions;
  }
  return transitions;
}

std::vector<Keypoint> detect_junctions(const vessel::Skeleton& sk, double nms_radius) {
  const auto& grid = sk.grid;
  struct Candidate {
    int x, y, cn;
  };
  std::vector<Candidate> cands;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.at(x, y) == 0.0) continue;
      const int cn = crossing_number(grid, x, y);
      if (cn >= 3) cands.push_back({x, y, cn});
    }
  }

  UnionFind uf(cands.size());
  const double r2 = nms_radius * nms_radius;
  // Candidates are in raster order, so the inner scan can stop once dy exceeds the radius.
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      const double dy = cands[j].y - cands[i].y;
      if (dy * dy >= r2) break;
      const double dx = cands[j].x - cands[i].x;
      if (dx * dx + dy * dy < r2) uf.unite(i, j);
    }
  }

  // Clusters reported in order of their first (raster-order) member.
  std::vector<Keypoint> out;
  std::vector<std::size_t> slot(cands.size(), std::numeric_limits<std::size_t>::max());
  std::vector<std::array<double, 2>> offset_sum;
  std::vector<std::array<int, 2>> anchor;
  std::vector<int> members;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = out.size();
      out.push_back(Keypoint{});
      offset_sum.push_back({0.0, 0.0});
      anchor.push_back({cands[i].x, cands[i].y});
      members.push_back(0);
    }
    const std::size_t s = slot[root];
    // Offsets from an anchor pixel keep the centroid translation-exact.
    offset_sum[s][0] += cands[i].x - anchor[s][0];
    offset_sum[s][1] += cands[i].y - anchor[s][1];
    ++members[s];
    out[s].strength = std::max(out[s].strength, static_cast<double>(cands[i].cn));
  }
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s].x = anchor[s][0] + offset_sum[s][0] / members[s];
    out[s].y = anchor[s][1] + offset_sum[s][1] / members[s];
    out[s].kind = out[s].strength >= 4 ? JunctionKind::crossover : JunctionKind::bifurcation;
  }
  return out;
}

Descriptor describe(const vessel::VesselMap& img, const Keypoint& kp, int patch_radius) {
  if (patch_radius < 1) throw Error(ErrorKind::argument, "describe: patch radius must be >= 1");
  const auto& g = img.grid;
  const int cx = static_cast<int>(std::floor(kp.x + 0.5));
  const int cy = static_cast<int>(std::floor(kp.y + 0.5));
  const int side = 2 * patch_radius + 1;

  std::vector<double> hist(kCells * kCells * kBins, 0.0);
  for (int py = 0; py < side; ++py) {
    for (int px = 0; px < side; ++px) {
      const int x = cx - patch_radius + px;
      const int y = cy - patch_radius + py;
      const double gx = 0.5 * (g.at_or_zero(x + 1, y) - g.at_or_zero(x - 1, y));
      const double gy = 0.5 * (g.at_or_zero(x, y + 1) - g.at_or_zero(x, y - 1));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      const double pos = angle / (2.0 * std::numbers::pi) * kBins;
      const int b0 = static_cast<int>(std::floor(pos)) % kBins;
      const int b1 = (b0 + 1) % kBins;
      const double frac = pos - std::floor(pos);
      const int cell_x = std::min(kCells - 1, px * kCells / side);
      const int cell_y = std::min(kCells - 1, py * kCells / side);
      const int base = (cell_y * kCells + cell_x) * kBins;
      hist[base + b0] += mag * (1.0 - frac);
      hist[base + b1] += mag * frac;
    }
  }

  auto normalise = [&hist]() {
    const double n = std::sqrt(std::inner_product(hist.begin(), hist.end(), hist.begin(), 0.0));
    if (n == 0.0) return false;
    for (double& v : hist) v /= n;
    return true;
  };
  if (!normalise()) {
    std::fill(hist.begin(), hist.end(), 1.0 / std::sqrt(static_cast<double>(hist.size())));
    return Descriptor{std::move(hist)};
  }
  // Clip dominant bins so one strong edge cannot swamp the descriptor.
  for (double& v : hist) v = std::min(v, 0.2);
  normalise();
  return Descriptor{std::move(hist)};
}

std::vector<Feature> describe_all(const vessel::VesselMap& img,
                                  const std::vector<Keypoint>& kps, int patch_radius) {
  std::vector<Feature> out;
  out.reserve(kps.size());
  for (const auto& kp : kps) out.push_back({kp, describe(img, kp, patch_radius)});
  return out;
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorKind::argument, "descriptor length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {

struct Nearest {
  std::size_t index = 0;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

bool passes_ratio(const Nearest& n, double ratio) {
  if (std::isinf(n.second)) return true;  // single candidate: nothing to be ambiguous with
  if (n.second == 0.0) return false;
  return n.best / n.second <= ratio;
}

}  // namespace

std::vector<Match> match_descriptors(const std::vector<Descriptor>& src,
                                     const std::vector<Descriptor>& tgt,
                                     const MatchOptions& options) {
  if (!(options.ratio > 0.0 && options.ratio <= 1.0)) {
    throw Error(ErrorKind::argument, "match ratio must lie in (0,1]");
  }
  std::vector<Match> out;
  if (src.empty() || tgt.empty()) return out;
  const std::size_t dim = src.front().values.size();
  for (const auto& d : src) {
    if (d.values.size() != dim) throw Error(ErrorKind::argument, "descriptor length mismatch");
  }
  for (const auto& d : tgt) {
    if (d.values.size() != dim) throw Error(ErrorKind::argument, "descriptor length mismatch");
  }

  std::vector<Nearest> fwd(src.size()), bwd(tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      const double d = descriptor_distance(src[i], tgt[j]);
      // Strict comparisons: ties resolve to the lowest index.
      auto update = [d](Nearest& n, std::size_t idx) {
        if (d < n.best) {
          n.second = n.best;
          n.best = d;
          n.index = idx;
        } else if (d < n.second) {
          n.second = d;
        }
      };
      update(fwd[i], j);
      update(bwd[j], i);
    }
  }

  for (std::size_t i = 0; i < src.size(); ++i) {
    const Nearest& f = fwd[i];
    if (!passes_ratio(f, options.ratio)) continue;
    if (options.cross_check) {
      const Nearest& b = bwd[f.index];
      if (b.index != i || !passes_ratio(b, options.ratio)) continue;
    }
    out.push_back({i, f.index, f.best});
  }
  return out;
}

CorrespondenceSet match_bruteforce(const std::vector<Feature>& src,
                                   const std::vector<Feature>& tgt,
                                   const MatchOptions& options) {
  std::vector<Descriptor> sd, td;
  sd.reserve(src.size());
  td.reserve(tgt.size());
  for (const auto& f : src) sd.push_back(f.descriptor);
  for (const auto& f : tgt) td.push_back(f.descriptor);
  CorrespondenceSet out;
  for (const Match& m : match_descriptors(sd, td, options)) {
    const auto& a = src[m.source].keypoint;
    const auto& b = tgt[m.target].keypoint;
    out.pairs.push_back({{a.x, a.y}, {b.x, b.y}});
  }
  return out;
}

}  // namespace care::keypoints
