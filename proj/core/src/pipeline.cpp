#include "care/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "care/error.hpp"
#include "care/warp.hpp"
#include "json.hpp"

namespace care::pipeline {

using nlohmann::json;

std::string_view to_string(FitStrategy s) {
  switch (s) {
    case FitStrategy::ransac_only: return "ransac_only";
    case FitStrategy::poly_only: return "poly_only";
    case FitStrategy::ran_poly: return "ran_poly";
  }
  return "ran_poly";
}

FitStrategy parse_fit_strategy(std::string_view name) {
  for (FitStrategy s : {FitStrategy::ransac_only, FitStrategy::poly_only, FitStrategy::ran_poly}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::config, "unknown fit strategy '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (poly_degree < 1 || poly_degree > 9) throw Error(ErrorKind::config, "poly_degree must be 1..9");
  try {
    ransac.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  if (!(match_ratio > 0.0 && match_ratio <= 1.0)) throw Error(ErrorKind::config, "match_ratio must lie in (0,1]");
  if (!(nms_radius >= 0.0)) throw Error(ErrorKind::config, "nms_radius must be >= 0");
  if (patch_radius < 1) throw Error(ErrorKind::config, "patch_radius must be >= 1");
  if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0)) {
    throw Error(ErrorKind::config, "binarize_threshold must lie in [0,1]");
  }
  if (opening_element.radius < 1) throw Error(ErrorKind::config, "opening radius must be >= 1");
  if (vesselness.scales.empty()) throw Error(ErrorKind::config, "vesselness scales must be non-empty");
  if (thresholds.auc_t_max < 1) throw Error(ErrorKind::config, "auc_t_max must be >= 1");
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

PipelineConfig config_from_json(std::string_view text, const PipelineConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  PipelineConfig c = base;
  read_field(j, "crop_enabled", c.crop_enabled);
  if (j.contains("crop_radius_rule") && !j["crop_radius_rule"].is_null()) {
    const auto rule = j["crop_radius_rule"].get<std::string>();
    if (rule == "farthest_corner") {
      c.crop_rule = crop::RadiusRule::farthest_corner;
    } else if (rule == "along_axis") {
      c.crop_rule = crop::RadiusRule::along_axis;
    } else {
      throw Error(ErrorKind::config, "unknown crop_radius_rule '" + rule + "'");
    }
  }
  if (j.contains("opening_enabled")) {
    const auto& v = j["opening_enabled"];
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) {
      c.opening_enabled.reset();
    } else if (v.is_boolean()) {
      c.opening_enabled = v.get<bool>();
    } else {
      throw Error(ErrorKind::config, "opening_enabled must be true, false, null or \"auto\"");
    }
  }
  if (j.contains("opening_side") && !j["opening_side"].is_null()) {
    const auto side = j["opening_side"].get<std::string>();
    if (side == "source") {
      c.opening_side = OpeningSide::source;
    } else if (side == "target") {
      c.opening_side = OpeningSide::target;
    } else {
      throw Error(ErrorKind::config, "opening_side must be \"source\" or \"target\"");
    }
  }
  read_field(j, "opening_radius", c.opening_element.radius);
  if (j.contains("opening_shape") && !j["opening_shape"].is_null()) {
    const auto shape = j["opening_shape"].get<std::string>();
    if (shape == "square") {
      c.opening_element.shape = raster::ElementShape::square;
    } else if (shape == "cross") {
      c.opening_element.shape = raster::ElementShape::cross;
    } else {
      throw Error(ErrorKind::config, "opening_shape must be \"square\" or \"cross\"");
    }
  }
  if (j.contains("fit_strategy") && !j["fit_strategy"].is_null()) {
    c.fit_strategy = parse_fit_strategy(j["fit_strategy"].get<std::string>());
  }
  read_field(j, "poly_degree", c.poly_degree);
  if (j.contains("ransac") && j["ransac"].is_object()) {
    const json& r = j["ransac"];
    read_field(r, "reproj_threshold", c.ransac.reproj_threshold);
    read_field(r, "max_iterations", c.ransac.max_iterations);
    read_field(r, "confidence", c.ransac.confidence);
    read_field(r, "seed", c.ransac.seed);
  }
  read_field(j, "match_ratio", c.match_ratio);
  read_field(j, "cross_check", c.cross_check);
  read_field(j, "nms_radius", c.nms_radius);
  read_field(j, "patch_radius", c.patch_radius);
  read_field(j, "binarize_threshold", c.binarize_threshold);
  if (j.contains("vesselness") && j["vesselness"].is_object()) {
    const json& v = j["vesselness"];
    read_field(v, "scales", c.vesselness.scales);
    read_field(v, "beta", c.vesselness.beta);
    read_field(v, "gamma", c.vesselness.gamma);
    read_field(v, "bright_ridges", c.vesselness.bright_ridges);
  }
  if (j.contains("thresholds") && j["thresholds"].is_object()) {
    const json& t = j["thresholds"];
    read_field(t, "mee", c.thresholds.mee);
    read_field(t, "mae", c.thresholds.mae);
    read_field(t, "auc_t_max", c.thresholds.auc_t_max);
    read_field(t, "match_tol", c.thresholds.match_tol);
  }
  c.validate();
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  json j{
      {"crop_enabled", c.crop_enabled},
      {"crop_radius_rule",
       c.crop_rule == crop::RadiusRule::farthest_corner ? "farthest_corner" : "along_axis"},
      {"opening_enabled", c.opening_enabled ? json(*c.opening_enabled) : json("auto")},
      {"opening_side", c.opening_side == OpeningSide::source ? "source" : "target"},
      {"opening_radius", c.opening_element.radius},
      {"opening_shape", c.opening_element.shape == raster::ElementShape::square ? "square" : "cross"},
      {"fit_strategy", to_string(c.fit_strategy)},
      {"poly_degree", c.poly_degree},
      {"ransac",
       {{"reproj_threshold", c.ransac.reproj_threshold},
        {"max_iterations", c.ransac.max_iterations},
        {"confidence", c.ransac.confidence},
        {"seed", c.ransac.seed}}},
      {"match_ratio", c.match_ratio},
      {"cross_check", c.cross_check},
      {"nms_radius", c.nms_radius},
      {"patch_radius", c.patch_radius},
      {"binarize_threshold", c.binarize_threshold},
      {"vesselness",
       {{"scales", c.vesselness.scales},
        {"beta", c.vesselness.beta},
        {"gamma", c.vesselness.gamma},
        {"bright_ridges", c.vesselness.bright_ridges}}},
      {"thresholds",
       {{"mee", c.thresholds.mee},
        {"mae", c.thresholds.mae},
        {"auc_t_max", c.thresholds.auc_t_max},
        {"match_tol", c.thresholds.match_tol}}},
  };
  return j.dump(2);
}

Registration fit_correspondences(const CorrespondenceSet& matches, const PipelineConfig& cfg) {
  Registration r;
  r.matches = matches;
  r.diagnostics.matches = matches.size();
  try {
    switch (cfg.fit_strategy) {
      case FitStrategy::ransac_only: {
        auto res = fitting::ransac_homography(matches, cfg.ransac);
        r.transform = fitting::Transform{res.homography, {0.0, 0.0}};
        r.inlier_mask = std::move(res.inlier_mask);
        break;
      }
      case FitStrategy::poly_only:
        r.transform = fitting::Transform{fitting::fit_polynomial(matches, cfg.poly_degree), {0.0, 0.0}};
        r.inlier_mask.assign(matches.size(), true);
        break;
      case FitStrategy::ran_poly: {
        auto res = fitting::fit_ran_poly(matches, cfg.ransac, cfg.poly_degree);
        r.transform = fitting::Transform{std::move(res.polynomial), {0.0, 0.0}};
        r.inlier_mask = std::move(res.inlier_mask);
        break;
      }
    }
  } catch (const Error& e) {
    if (!e.is_fit_failure()) throw;
    r.transform.reset();
    r.inlier_mask.assign(matches.size(), false);
    r.diagnostics.failure = std::string(care::to_string(e.kind())) + ": " + e.what();
  }
  r.diagnostics.inliers =
      static_cast<std::size_t>(std::count(r.inlier_mask.begin(), r.inlier_mask.end(), true));
  return r;
}

namespace {

bool opening_applies(const vessel::VesselMap& source, const vessel::VesselMap& target,
                     const PipelineConfig& cfg, OpeningSide& side) {
  if (cfg.opening_enabled) {
    side = cfg.opening_side;
    return *cfg.opening_enabled;
  }
  using vessel::Modality;
  if (source.source_modality == Modality::octa && target.source_modality == Modality::wfcfp) {
    side = OpeningSide::source;
    return true;
  }
  if (source.source_modality == Modality::wfcfp && target.source_modality == Modality::octa) {
    side = OpeningSide::target;
    return true;
  }
  return false;
}

struct SideFeatures {
  std::vector<keypoints::Feature> features;
};

std::vector<keypoints::Feature> features_for(const raster::ImageGrid& prob, bool coarsen,
                                             const PipelineConfig& cfg) {
  raster::ImageGrid mask = raster::binarize(prob, cfg.binarize_threshold);
  if (coarsen) mask = raster::opening(mask, cfg.opening_element);
  const vessel::Skeleton sk = vessel::skeletonize(mask);
  const auto kps = keypoints::detect_junctions(sk, cfg.nms_radius);
  // Description sees the probability map restricted to the (possibly coarsened) mask.
  const vessel::VesselMap described{raster::multiply(prob, mask), vessel::Modality::unknown};
  return keypoints::describe_all(described, kps, cfg.patch_radius);
}

}  // namespace

Registration register_pair(const vessel::VesselMap& source, const vessel::VesselMap& target,
                           const std::optional<io::RoiPair>& rois, const PipelineConfig& cfg) {
  cfg.validate();
  std::optional<crop::CropFrame> frame;
  if (cfg.crop_enabled) {
    if (!rois) throw Error(ErrorKind::config, "crop is enabled but no ROI boxes were supplied");
    frame = crop::compute_crop(rois->macula, rois->optic_disc, target.grid.width(),
                               target.grid.height(), cfg.crop_rule);
  }
  const raster::ImageGrid target_local = frame ? crop::extract(target.grid, *frame) : target.grid;

  OpeningSide side = cfg.opening_side;
  const bool coarsen = opening_applies(source, target, cfg, side);
  const auto src_features = features_for(source.grid, coarsen && side == OpeningSide::source, cfg);
  const auto tgt_features = features_for(target_local, coarsen && side == OpeningSide::target, cfg);

  const CorrespondenceSet local_matches = keypoints::match_bruteforce(
      src_features, tgt_features, {cfg.match_ratio, cfg.cross_check});

  Registration r = fit_correspondences(local_matches, cfg);
  const Point2 origin = frame ? Point2{static_cast<double>(frame->x0), static_cast<double>(frame->y0)}
                              : Point2{0.0, 0.0};
  if (r.transform) r.transform = fitting::with_offset(*r.transform, origin);
  for (auto& c : r.matches.pairs) c.tgt = c.tgt + origin;
  r.diagnostics.source_keypoints = src_features.size();
  r.diagnostics.target_keypoints = tgt_features.size();
  r.diagnostics.crop = frame;
  r.diagnostics.opening_applied = coarsen;
  return r;
}

namespace {

vessel::VesselMap load_map(const MapFile& f, const PipelineConfig& cfg) {
  raster::ImageGrid img = raster::load_image(f.path);
  if (f.raw) return vessel::enhance_vesselness(img, cfg.vesselness, f.modality);
  return vessel::VesselMap{std::move(img), f.modality};
}

std::optional<vessel::VesselMap> resolve(const std::optional<vessel::VesselMap>& mem,
                                         const std::optional<MapFile>& file,
                                         const PipelineConfig& cfg) {
  if (mem) return mem;
  if (file) return load_map(*file, cfg);
  return std::nullopt;
}

// Mapping used to judge whether a keypoint match is acceptable.
std::optional<fitting::Transform> reference_transform(const PairInput& pair) {
  if (pair.gt_transform) return pair.gt_transform;
  if (!pair.gt) return std::nullopt;
  try {
    if (pair.gt->size() >= fitting::Polynomial2D::coefficient_count(2)) {
      return fitting::Transform{fitting::fit_polynomial(*pair.gt, 2), {0.0, 0.0}};
    }
    return fitting::Transform{fitting::fit_homography_dlt(*pair.gt), {0.0, 0.0}};
  } catch (const Error& e) {
    if (!e.is_fit_failure()) throw;
    return std::nullopt;
  }
}

}  // namespace

PairReport evaluate_pair(const PairInput& pair, const PipelineConfig& cfg,
                         const RunOptions& options) {
  PairReport report;
  report.id = pair.id;

  std::optional<vessel::VesselMap> source, target;
  Registration reg;
  if (pair.matches) {
    reg = fit_correspondences(*pair.matches, cfg);
  } else {
    source = resolve(pair.source, pair.source_file, cfg);
    target = resolve(pair.target, pair.target_file, cfg);
    if (!source || !target) {
      throw Error(ErrorKind::config, "pair '" + pair.id + "' needs source and target maps or matches");
    }
    reg = register_pair(*source, *target, pair.rois, cfg);
  }
  report.diagnostics = reg.diagnostics;
  report.transform = reg.transform;

  eval::PairEvaluation& ev = report.evaluation;
  if (reg.failed()) {
    ev = eval::classify_pair({}, true, cfg.thresholds);
  } else if (pair.gt && !pair.gt->empty()) {
    ev = eval::classify_pair(eval::point_errors(*reg.transform, *pair.gt), false, cfg.thresholds);
  } else {
    ev.scored = false;
    ev.classification = eval::Classification::inaccurate;
  }
  ev.n_matches = reg.matches.size();
  if (const auto ref = reference_transform(pair)) {
    ev.n_acceptable_matches = eval::acceptable_matches(reg.matches, *ref, cfg.thresholds.match_tol);
  }

  if (!reg.failed() && source && target) {
    try {
      const int degree = reg.transform->is_polynomial()
                             ? std::get<fitting::Polynomial2D>(reg.transform->model).degree()
                             : cfg.poly_degree;
      const auto inverse =
          fitting::invert_for_warp(*reg.transform, reg.matches.select(reg.inlier_mask), degree);
      const auto warped =
          warp::warp(source->grid, inverse, target->grid.width(), target->grid.height());
      // Dice is measured where the registered source actually lands.
      std::vector<double> masked(target->grid.values().begin(), target->grid.values().end());
      for (std::size_t i = 0; i < masked.size(); ++i) {
        if (!warped.footprint[i]) masked[i] = 0.0;
      }
      const raster::ImageGrid target_in_view(target->grid.width(), target->grid.height(),
                                             std::move(masked));
      ev.dice_s = eval::soft_dice(warped.image, target_in_view);
      if (options.overlay_dir) {
        std::filesystem::create_directories(*options.overlay_dir);
        warp::save_overlay(warp::render_overlay(warped.image, target->grid),
                           *options.overlay_dir / (pair.id + ".png"));
      }
    } catch (const Error& e) {
      if (!e.is_fit_failure()) throw;
    }
  }
  return report;
}

DatasetRun run_dataset(const std::vector<PairInput>& pairs, const PipelineConfig& cfg,
                       const RunOptions& options) {
  cfg.validate();
  if (pairs.empty()) throw Error(ErrorKind::config, "dataset has no pairs");
  DatasetRun run;
  run.pairs.reserve(pairs.size());
  for (const auto& p : pairs) run.pairs.push_back(evaluate_pair(p, cfg, options));
  std::stable_sort(run.pairs.begin(), run.pairs.end(),
                   [](const PairReport& a, const PairReport& b) { return a.id < b.id; });
  std::vector<eval::PairEvaluation> evals;
  evals.reserve(run.pairs.size());
  for (const auto& p : run.pairs) evals.push_back(p.evaluation);
  run.report = eval::aggregate(evals, cfg.thresholds);
  return run;
}

std::vector<PairInput> load_manifest(const std::filesystem::path& manifest) {
  std::string text;
  try {
    text = io::read_text_file(manifest);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, std::string("manifest: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("manifest: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::config, "manifest must be a JSON array");
  if (j.empty()) throw Error(ErrorKind::config, "manifest lists no pairs");

  const std::filesystem::path base = manifest.parent_path();
  auto path_of = [&](const json& e, const char* key) -> std::optional<std::filesystem::path> {
    auto it = e.find(key);
    if (it == e.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(ErrorKind::config, std::string("manifest: '") + key + "' must be a path");
    std::filesystem::path p = it->get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  auto flag_of = [](const json& e, const char* key) {
    auto it = e.find(key);
    return it != e.end() && it->is_boolean() && it->get<bool>();
  };
  auto modality_of = [](const json& e, const char* key) {
    auto it = e.find(key);
    if (it == e.end() || !it->is_string()) return vessel::Modality::unknown;
    return vessel::parse_modality(it->get<std::string>());
  };

  std::vector<PairInput> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_object()) throw Error(ErrorKind::config, "manifest entries must be objects");
    PairInput p;
    if (e.contains("id") && e["id"].is_string()) {
      p.id = e["id"].get<std::string>();
    } else if (e.contains("id") && e["id"].is_number_integer()) {
      p.id = std::to_string(e["id"].get<long long>());
    } else {
      throw Error(ErrorKind::config, "manifest entry " + std::to_string(i) + " has no id");
    }
    try {
      if (auto m = path_of(e, "matches")) p.matches = io::correspondences_from_json(io::read_text_file(*m));
      if (auto s = path_of(e, "source")) {
        p.source_file = MapFile{*s, modality_of(e, "source_modality"), flag_of(e, "source_raw")};
      }
      if (auto t = path_of(e, "target")) {
        p.target_file = MapFile{*t, modality_of(e, "target_modality"), flag_of(e, "target_raw")};
      }
      if (auto r = path_of(e, "rois")) p.rois = io::rois_from_json(io::read_text_file(*r));
      if (auto g = path_of(e, "gt")) p.gt = io::correspondences_from_json(io::read_text_file(*g));
      if (auto g = path_of(e, "gt_transform")) {
        p.gt_transform = io::transform_from_json(io::read_text_file(*g));
      }
    } catch (const Error& err) {
      throw Error(ErrorKind::config, "manifest entry '" + p.id + "': " + err.what());
    }
    if (!p.matches && (!p.source_file || !p.target_file)) {
      throw Error(ErrorKind::config, "manifest entry '" + p.id + "' needs source and target");
    }
    out.push_back(std::move(p));
  }
  return out;
}

DatasetRun run_dataset(const std::filesystem::path& manifest, const PipelineConfig& cfg,
                       const RunOptions& options) {
  return run_dataset(load_manifest(manifest), cfg, options);
}

std::vector<SweepRow> degree_sweep(const std::vector<PairInput>& pairs, const PipelineConfig& cfg,
                                   const std::vector<int>& degrees) {
  if (degrees.empty()) throw Error(ErrorKind::argument, "degree sweep needs at least one degree");
  std::vector<SweepRow> rows;
  for (int n : degrees) {
    PipelineConfig c = cfg;
    c.fit_strategy = FitStrategy::ran_poly;
    c.poly_degree = n;
    rows.push_back({n, run_dataset(pairs, c).report});
  }
  return rows;
}

std::vector<SweepRow> degree_sweep(const std::filesystem::path& manifest,
                                   const PipelineConfig& cfg, const std::vector<int>& degrees) {
  if (degrees.empty()) throw Error(ErrorKind::argument, "degree sweep needs at least one degree");
  return degree_sweep(load_manifest(manifest), cfg, degrees);
}

int best_degree(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorKind::argument, "empty sweep");
  const SweepRow* best = &rows.front();
  for (const auto& r : rows) {
    if (r.report.auc > best->report.auc ||
        (r.report.auc == best->report.auc && r.degree < best->degree)) {
      best = &r;
    }
  }
  return best->degree;
}

namespace {

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const eval::DatasetReport& r) {
  return json{{"n_pairs", r.n_pairs},
              {"n_failed", r.n_failed},
              {"n_inaccurate", r.n_inaccurate},
              {"n_acceptable", r.n_acceptable},
              {"n_unscored", r.n_unscored},
              {"failed_rate", r.failed_rate},
              {"inaccurate_rate", r.inaccurate_rate},
              {"acceptable_rate", r.acceptable_rate},
              {"auc", r.auc},
              {"mean_matches", r.mean_matches},
              {"mean_acceptable_matches", r.mean_acceptable_matches},
              {"mean_dice_s", r.mean_dice_s},
              {"n_dice_excluded", r.n_dice_excluded}};
}

json pair_json(const PairReport& p) {
  const auto& e = p.evaluation;
  const bool failed = !p.transform;
  json j{{"id", p.id},
         {"classification", failed ? json("failed") : e.scored ? json(eval::to_string(e.classification)) : json(nullptr)},
         {"mee", e.scored && !failed ? json(e.mee) : json(nullptr)},
         {"mae", e.scored && !failed ? json(e.mae) : json(nullptr)},
         {"n_matches", e.n_matches},
         {"n_acceptable_matches", e.n_acceptable_matches},
         {"dice_s", nullable(e.dice_s)},
         {"source_keypoints", p.diagnostics.source_keypoints},
         {"target_keypoints", p.diagnostics.target_keypoints},
         {"inliers", p.diagnostics.inliers},
         {"opening_applied", p.diagnostics.opening_applied},
         {"failure", p.diagnostics.failure.empty() ? json(nullptr) : json(p.diagnostics.failure)}};
  if (p.diagnostics.crop) {
    const auto& f = *p.diagnostics.crop;
    j["crop"] = {{"x0", f.x0}, {"y0", f.y0}, {"side", f.side}};
  } else {
    j["crop"] = nullptr;
  }
  j["transform"] = p.transform ? json::parse(io::transform_to_json(*p.transform)) : json(nullptr);
  return j;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string pair_report_to_json(const PairReport& pair) { return pair_json(pair).dump(2); }

std::string dataset_run_to_json(const DatasetRun& run) {
  json pairs = json::array();
  for (const auto& p : run.pairs) pairs.push_back(pair_json(p));
  return json{{"report", report_json(run.report)}, {"pairs", pairs}}.dump(2);
}

std::string report_csv_header() {
  return "n_pairs,failed_rate,inaccurate_rate,acceptable_rate,auc,mean_matches,"
         "mean_acceptable_matches,mean_dice_s";
}

std::string report_csv_row(const eval::DatasetReport& r) {
  return std::to_string(r.n_pairs) + "," + fmt(r.failed_rate) + "," + fmt(r.inaccurate_rate) + "," +
         fmt(r.acceptable_rate) + "," + fmt(r.auc) + "," + fmt(r.mean_matches) + "," +
         fmt(r.mean_acceptable_matches) + "," + fmt(r.mean_dice_s);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "degree," + report_csv_header() + "\n";
  for (const auto& r : rows) out += std::to_string(r.degree) + "," + report_csv_row(r.report) + "\n";
  return out;
}

}  // namespace care::pipeline
