#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "care/error.hpp"
#include "care/fitting.hpp"

namespace care::fitting {

namespace {

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
Eigen::Matrix3d conditioning(const std::vector<Point2>& pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - mx, p.y - my);
  mean_dist /= pts.size();
  if (!(mean_dist > 0.0)) throw Error(ErrorKind::degeneracy, "DLT: coincident points");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
  return t;
}

// Twice the triangle area relative to the squared longest edge.
bool nearly_collinear(Point2 a, Point2 b, Point2 c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double scale =
      std::max({(b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y),
                (c.x - a.x) * (c.x - a.x) + (c.y - a.y) * (c.y - a.y),
                (c.x - b.x) * (c.x - b.x) + (c.y - b.y) * (c.y - b.y)});
  return scale == 0.0 || std::abs(cross) <= 1e-6 * scale;
}

bool degenerate_sample(const std::array<Correspondence, 4>& s) {
  for (int skip = 0; skip < 4; ++skip) {
    std::array<int, 3> idx{};
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) idx[k++] = i;
    }
    if (nearly_collinear(s[idx[0]].src, s[idx[1]].src, s[idx[2]].src)) return true;
    if (nearly_collinear(s[idx[0]].tgt, s[idx[1]].tgt, s[idx[2]].tgt)) return true;
  }
  return false;
}

Homography dlt(const Correspondence* pairs, std::size_t m) {
  std::vector<Point2> src(m), tgt(m);
  for (std::size_t i = 0; i < m; ++i) {
    src[i] = pairs[i].src;
    tgt[i] = pairs[i].tgt;
  }
  const Eigen::Matrix3d ts = conditioning(src);
  const Eigen::Matrix3d tt = conditioning(tgt);

  Eigen::MatrixXd a(2 * m, 9);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = tt * Eigen::Vector3d(tgt[i].x, tgt[i].y, 1.0);
    const double x = p.x(), y = p.y(), xp = q.x(), yp = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, xp * x, xp * y, xp;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, yp * x, yp * y, yp;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Eight independent constraints are needed for a unique null vector.
  if (sv.size() < 8 || !(sv(7) > 1e-10 * sv(0))) {
    throw Error(ErrorKind::degeneracy, "DLT: rank-deficient design");
  }
  const Eigen::VectorXd n = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << n(0), n(1), n(2), n(3), n(4), n(5), n(6), n(7), n(8);
  if (!(std::abs(hn.determinant()) > 1e-10 * std::pow(hn.norm(), 3))) {
    throw Error(ErrorKind::degeneracy, "DLT: singular homography");
  }
  const Eigen::Matrix3d h = tt.inverse() * hn * ts;
  Homography out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.h[3 * r + c] = h(r, c);
  }
  return out.normalized();
}

}  // namespace

Homography fit_homography_dlt(const CorrespondenceSet& pairs) {
  if (pairs.size() < 4) {
    throw Error(ErrorKind::insufficient_data, "homography needs at least 4 correspondences");
  }
  return dlt(pairs.pairs.data(), pairs.size());
}

RansacResult ransac_homography(const CorrespondenceSet& pairs, const RansacConfig& cfg) {
  cfg.validate();
  const std::size_t m = pairs.size();
  if (m < 4) throw Error(ErrorKind::insufficient_data, "RANSAC needs at least 4 correspondences");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);

  std::size_t best_count = 0;
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<bool> best_mask(m, false), mask(m);
  int needed = cfg.max_iterations;
  int it = 0;
  for (; it < needed; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      std::size_t candidate;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + k, candidate) != idx.begin() + k);
      idx[k] = candidate;
    }
    const std::array<Correspondence, 4> sample{pairs.pairs[idx[0]], pairs.pairs[idx[1]],
                                               pairs.pairs[idx[2]], pairs.pairs[idx[3]]};
    if (degenerate_sample(sample)) continue;
    Homography h;
    try {
      h = dlt(sample.data(), 4);
    } catch (const Error&) {
      continue;
    }

    std::size_t count = 0;
    double error_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = reprojection_error(h, pairs.pairs[i]);
      mask[i] = e <= cfg.reproj_threshold;
      if (mask[i]) {
        ++count;
        error_sum += e;
      }
    }
    if (count > best_count || (count == best_count && error_sum < best_error)) {
      best_count = count;
      best_error = error_sum;
      best_mask = mask;
      const double w = static_cast<double>(count) / m;
      const double p_good = std::pow(w, 4);
      if (p_good >= 1.0) {
        needed = std::min(needed, it + 1);
      } else if (p_good > 0.0) {
        const double n = std::log(1.0 - cfg.confidence) / std::log(1.0 - p_good);
        if (n < needed) needed = std::max(it + 1, static_cast<int>(std::ceil(n)));
      }
    }
  }

  if (best_count < 4) {
    throw Error(ErrorKind::no_consensus, "RANSAC found no consensus of 4 or more points");
  }
  RansacResult result;
  result.homography = fit_homography_dlt(pairs.select(best_mask));
  result.inlier_mask = std::move(best_mask);
  result.iterations = it;
  return result;
}

}  // namespace care::fitting
