#include "care/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "care/error.hpp"
#include "care/serialization.hpp"
#include "care/warp.hpp"

namespace care::synth {

namespace {

// Independent, reproducible generator per purpose so that changing one stage
// (say, the point count) leaves the planted transform untouched.
enum class Stream : std::uint64_t { transform = 1, points = 2, tree = 3, layout = 4 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// max |q(u,v)| over [0,s]^2 for q = c20 u^2 + c11 u v + c02 v^2. By homogeneity
// the maximum lies on the far edges u = s or v = s.
double max_abs_quadratic(double c20, double c11, double c02, double s) {
  auto edge = [s](double a, double b, double c) {
    // |a s^2 + b s t + c t^2| for t in [0, s]
    double m = std::max(std::abs(a * s * s), std::abs((a + b + c) * s * s));
    if (c != 0.0) {
      const double t = -b * s / (2.0 * c);
      if (t > 0.0 && t < s) m = std::max(m, std::abs(a * s * s + b * s * t + c * t * t));
    }
    return m;
  };
  return std::max(edge(c20, c11, c02), edge(c02, c11, c20));
}

fitting::Transform plant_quadratic(const SynthConfig& cfg, std::mt19937_64& rng) {
  fitting::Polynomial2D p = fitting::Polynomial2D::identity(2);
  std::array<double, 6> c{};
  for (double& v : c) v = uniform(rng, -1.0, 1.0);
  const double s = cfg.source_size();
  const double mx = max_abs_quadratic(c[0], c[1], c[2], s);
  const double my = max_abs_quadratic(c[3], c[4], c[5], s);
  const double bound = std::hypot(mx, my);
  const double k = cfg.coefficient_scale > 0.0 && bound > 0.0 ? cfg.coefficient_scale / bound : 0.0;
  p.set_a(2, 0, k * c[0]);
  p.set_a(1, 1, k * c[1]);
  p.set_a(0, 2, k * c[2]);
  p.set_b(2, 0, k * c[3]);
  p.set_b(1, 1, k * c[4]);
  p.set_b(0, 2, k * c[5]);
  return fitting::Transform{p, {0.0, 0.0}};
}

fitting::Transform plant_homography(const SynthConfig& cfg, std::mt19937_64& rng) {
  const double s = cfg.source_size();
  const double c = 0.5 * s;
  const double theta = uniform(rng, -cfg.max_rotation_deg, cfg.max_rotation_deg) *
                       std::numbers::pi / 180.0;
  const double scale = uniform(rng, cfg.min_scale, cfg.max_scale);
  const double tmax = cfg.max_translation_fraction * s;
  const double tx = uniform(rng, -tmax, tmax);
  const double ty = uniform(rng, -tmax, tmax);
  // w = 1 + p.(x - c); |w - 1| <= projective_strength over the frame.
  const double pmax = cfg.projective_strength / s;
  const double px = uniform(rng, -pmax, pmax);
  const double py = uniform(rng, -pmax, pmax);

  using fitting::Homography;
  const Homography to_center = Homography::translation(-c, -c);
  const Homography back = Homography::translation(c + tx, c + ty);
  const double cs = scale * std::cos(theta);
  const double sn = scale * std::sin(theta);
  const Homography similarity{{cs, -sn, 0, sn, cs, 0, 0, 0, 1}};
  const Homography projective{{1, 0, 0, 0, 1, 0, px, py, 1}};
  const Homography h =
      fitting::compose(back, fitting::compose(similarity, fitting::compose(projective, to_center)));
  return fitting::Transform{h, {0.0, 0.0}};
}

Point2 truncated_noise(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return {0.0, 0.0};
  std::normal_distribution<double> n(0.0, sigma);
  for (;;) {
    const Point2 e{n(rng), n(rng)};
    if (std::hypot(e.x, e.y) <= 3.0 * sigma) return e;
  }
}

struct Layout {
  Point2 macula_center;
  Point2 window_origin;
  crop::RoiBox macula;
  crop::RoiBox optic_disc;
};

// Macula near the middle of the wide field, optic disc placed so the crop
// square is ~1.15x the source window.
Layout make_layout(const SynthConfig& cfg) {
  auto rng = make_rng(cfg.seed, Stream::layout);
  const double st = cfg.image_size;
  const double ss = cfg.source_size();
  Layout l;
  l.macula_center = {st * (0.5 + uniform(rng, -0.05, 0.05)), st * (0.5 + uniform(rng, -0.05, 0.05))};
  l.window_origin = {l.macula_center.x - 0.5 * ss, l.macula_center.y - 0.5 * ss};
  const double hm = 0.03 * st;
  l.macula = {crop::RoiLabel::macula, l.macula_center.x - hm, l.macula_center.y - hm,
              l.macula_center.x + hm, l.macula_center.y + hm};
  const double ho = 0.045 * st;
  const double jy = uniform(rng, -0.03, 0.03) * st;
  const double d = 0.575 * ss;
  const double lateral = std::abs(jy) + ho;
  const double along = std::sqrt(std::max(d * d - lateral * lateral, 0.0)) - ho;
  const double side = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
  const Point2 od{l.macula_center.x + side * along, l.macula_center.y + jy};
  l.optic_disc = {crop::RoiLabel::optic_disc, od.x - ho, od.y - ho, od.x + ho, od.y + ho};
  return l;
}

}  // namespace

int SynthConfig::source_size() const {
  return std::max(1, static_cast<int>(std::lround(source_fov * image_size)));
}

void SynthConfig::validate() const {
  if (image_size < 16) throw Error(ErrorKind::argument, "synth: image_size must be >= 16");
  if (!(coefficient_scale >= 0.0)) throw Error(ErrorKind::argument, "synth: coefficient_scale < 0");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::argument, "synth: noise_sigma < 0");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw Error(ErrorKind::argument, "synth: outlier_fraction must lie in [0,1)");
  }
  const int minimal = transform_kind == TransformKind::homography ? 4 : 6;
  if (n_points < minimal) throw Error(ErrorKind::argument, "synth: too few points for the planted kind");
  if (!(source_fov > 0.0 && source_fov <= 1.0)) {
    throw Error(ErrorKind::argument, "synth: source_fov must lie in (0,1]");
  }
  if (!(min_scale > 0.0 && min_scale <= max_scale)) throw Error(ErrorKind::argument, "synth: bad scale range");
  if (gt_grid < 2) throw Error(ErrorKind::argument, "synth: gt_grid must be >= 2");
}

fitting::Transform plant_transform(const SynthConfig& cfg) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, Stream::transform);
  fitting::Transform t = cfg.transform_kind == TransformKind::quadratic
                             ? plant_quadratic(cfg, rng)
                             : plant_homography(cfg, rng);
  if (cfg.source_fov < 1.0) t = fitting::with_offset(t, make_layout(cfg).window_origin);
  return t;
}

NoisyCorrespondences make_correspondences(const SynthConfig& cfg, const fitting::Transform& gt) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, Stream::points);
  const double ss = cfg.source_size();
  NoisyCorrespondences out;
  out.pairs.pairs.reserve(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    const Point2 src{uniform(rng, 0.05 * ss, 0.95 * ss), uniform(rng, 0.05 * ss, 0.95 * ss)};
    const Point2 tgt = fitting::eval_transform(gt, src) + truncated_noise(rng, cfg.noise_sigma);
    out.pairs.pairs.push_back({src, tgt});
  }
  out.outlier_mask.assign(cfg.n_points, false);
  const auto n_out = static_cast<std::size_t>(std::floor(cfg.outlier_fraction * cfg.n_points));
  std::vector<std::size_t> order(cfg.n_points);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates with explicit draws keeps the choice reproducible.
  for (std::size_t k = 0; k < n_out; ++k) {
    const auto j = std::uniform_int_distribution<std::size_t>(k, order.size() - 1)(rng);
    std::swap(order[k], order[j]);
    const std::size_t idx = order[k];
    out.outlier_mask[idx] = true;
    out.pairs.pairs[idx].tgt = {uniform(rng, 0.0, cfg.image_size), uniform(rng, 0.0, cfg.image_size)};
  }
  return out;
}

CorrespondenceSet make_gt_points(const SynthConfig& cfg, const fitting::Transform& gt) {
  const double ss = cfg.source_size();
  CorrespondenceSet out;
  for (int j = 0; j < cfg.gt_grid; ++j) {
    for (int i = 0; i < cfg.gt_grid; ++i) {
      const Point2 src{ss * (0.05 + 0.9 * i / (cfg.gt_grid - 1)),
                       ss * (0.05 + 0.9 * j / (cfg.gt_grid - 1))};
      out.pairs.push_back({src, fitting::eval_transform(gt, src)});
    }
  }
  return out;
}

VesselTree grow_vessel_tree(int size, std::uint64_t seed) {
  auto rng = make_rng(seed, Stream::tree);
  std::normal_distribution<double> wiggle(0.0, 0.12);
  constexpr double kStep = 6.0;
  constexpr int kMaxDepth = 4;
  const double s = size;

  struct Vessel {
    Point2 pos;
    double heading;
    double width;
    double remaining;
    int depth;
  };
  std::vector<Vessel> pending;
  const int roots = std::max(3, static_cast<int>(std::lround(9.0 * s / 1000.0)));
  for (int r = 0; r < roots; ++r) {
    pending.push_back({{uniform(rng, 0.1 * s, 0.9 * s), uniform(rng, 0.1 * s, 0.9 * s)},
                       uniform(rng, 0.0, 2.0 * std::numbers::pi), uniform(rng, 5.0, 6.5),
                       uniform(rng, 0.5, 0.9) * s, 0});
  }

  VesselTree tree;
  while (!pending.empty()) {
    Vessel v = pending.back();
    pending.pop_back();
    double since_branch = 0.0;
    double next_branch = uniform(rng, 50.0, 100.0);
    while (v.remaining > 0.0) {
      v.heading += wiggle(rng);
      const Point2 next{v.pos.x + kStep * std::cos(v.heading), v.pos.y + kStep * std::sin(v.heading)};
      if (next.x < -20.0 || next.y < -20.0 || next.x > s + 20.0 || next.y > s + 20.0) break;
      tree.segments.push_back({v.pos, next, v.width});
      v.pos = next;
      v.remaining -= kStep;
      since_branch += kStep;
      if (since_branch >= next_branch && v.depth < kMaxDepth && v.width > 3.5) {
        const double side = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
        const double child_width = std::max(3.5, v.width - uniform(rng, 0.5, 1.5));
        pending.push_back({v.pos, v.heading + side * uniform(rng, 0.5, 1.1), child_width,
                           v.remaining * uniform(rng, 0.4, 0.7), v.depth + 1});
        tree.branch_points.push_back(v.pos);
        v.width = std::max(child_width, v.width - 0.3);
        since_branch = 0.0;
        next_branch = uniform(rng, 50.0, 100.0);
      }
    }
  }
  return tree;
}

raster::ImageGrid render_vessels(const VesselTree& tree, int width, int height) {
  std::vector<double> img(static_cast<std::size_t>(width) * height, 0.0);
  for (const auto& seg : tree.segments) {
    const double half = 0.5 * seg.width;
    const double pad = half + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(seg.a.x, seg.b.x) - pad)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(seg.a.x, seg.b.x) + pad)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(seg.a.y, seg.b.y) - pad)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(seg.a.y, seg.b.y) + pad)));
    const Point2 d = seg.b - seg.a;
    const double len2 = d.x * d.x + d.y * d.y;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Point2 p{static_cast<double>(x), static_cast<double>(y)};
        double t = len2 > 0.0 ? ((p.x - seg.a.x) * d.x + (p.y - seg.a.y) * d.y) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dist = distance(p, {seg.a.x + t * d.x, seg.a.y + t * d.y});
        // Box-filtered coverage of a band of the given width.
        const double cover = std::clamp(half + 0.5 - dist, 0.0, 1.0);
        double& px = img[static_cast<std::size_t>(y) * width + x];
        px = std::max(px, cover);
      }
    }
  }
  return raster::ImageGrid(width, height, std::move(img));
}

SynthProblem make_problem(const SynthConfig& cfg) {
  cfg.validate();
  const fitting::Transform gt = plant_transform(cfg);
  const int ss = cfg.source_size();
  raster::ImageGrid target = render_vessels(grow_vessel_tree(cfg.image_size, cfg.seed),
                                            cfg.image_size, cfg.image_size);
  // gt maps source -> target, which is exactly the inverse mapping warp() wants
  // when pulling source pixels out of the target.
  raster::ImageGrid source = warp::warp(target, gt, ss, ss).image;
  auto noisy = make_correspondences(cfg, gt);

  SynthProblem p{std::move(source),         std::move(target),
                 gt,                        std::move(noisy.pairs),
                 std::move(noisy.outlier_mask), make_gt_points(cfg, gt),
                 std::nullopt,              std::nullopt};
  if (cfg.source_fov < 1.0) {
    const Layout l = make_layout(cfg);
    p.macula = l.macula;
    p.optic_disc = l.optic_disc;
  }
  return p;
}

void export_problem(const SynthProblem& problem, const SynthConfig& cfg,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  raster::save_image(problem.source_img, dir / "source.png");
  raster::save_image(problem.target_img, dir / "target.png");
  io::write_text_file(dir / "gt_transform.json", io::transform_to_json(problem.gt_transform));
  io::write_text_file(dir / "correspondences.json",
                      io::correspondences_to_json(problem.correspondences));
  io::write_text_file(dir / "gt.json", io::correspondences_to_json(problem.gt_points));
  io::write_text_file(dir / "config.json", io::synth_config_to_json(cfg));
  if (problem.macula && problem.optic_disc) {
    io::write_text_file(dir / "rois.json", io::rois_to_json({*problem.macula, *problem.optic_disc}));
  }
}

}  // namespace care::synth
