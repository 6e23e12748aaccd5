#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "care/error.hpp"
#include "care/fitting.hpp"
#include "care/pipeline.hpp"
#include "care/raster.hpp"
#include "care/serialization.hpp"
#include "care/synth.hpp"
#include "care/vessel.hpp"
#include "care/warp.hpp"

namespace fs = std::filesystem;
using namespace care;

namespace {

// Flags shared by every subcommand that runs the pipeline. Each one is only
// applied when given, so it overrides the config file.
struct PipelineFlags {
  std::string config_path;
  bool crop = false;
  bool no_crop = false;
  std::string opening;
  std::string opening_side;
  std::string fit_strategy;
  int poly_degree = 0;
  double reproj_threshold = 0.0;
  int max_iterations = 0;
  std::uint64_t seed = 0;
  double match_ratio = 0.0;
  bool no_cross_check = false;

  CLI::Option* degree_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "pipeline config JSON")->check(CLI::ExistingFile);
    auto* on = app->add_flag("--crop", crop, "enable Crop (needs ROI boxes)");
    app->add_flag("--no-crop", no_crop, "disable Crop")->excludes(on);
    app->add_option("--opening", opening, "morphological opening")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    app->add_option("--opening-side", opening_side, "side the opening applies to")
        ->check(CLI::IsMember({"source", "target"}));
    app->add_option("--fit", fit_strategy, "fitting strategy")
        ->check(CLI::IsMember({"ransac_only", "poly_only", "ran_poly"}));
    degree_opt = app->add_option("--degree", poly_degree, "polynomial degree")->check(CLI::Range(1, 9));
    threshold_opt = app->add_option("--ransac-threshold", reproj_threshold, "RANSAC inlier threshold, px");
    iterations_opt = app->add_option("--max-iterations", max_iterations, "RANSAC iteration cap");
    seed_opt = app->add_option("--seed", seed, "RANSAC seed");
    ratio_opt = app->add_option("--match-ratio", match_ratio, "ratio-test threshold");
    app->add_flag("--no-cross-check", no_cross_check, "accept one-directional matches");
  }

  pipeline::PipelineConfig resolve() const {
    pipeline::PipelineConfig cfg;
    if (!config_path.empty()) cfg = pipeline::config_from_json(io::read_text_file(config_path));
    if (crop) cfg.crop_enabled = true;
    if (no_crop) cfg.crop_enabled = false;
    if (opening == "auto") cfg.opening_enabled.reset();
    if (opening == "on") cfg.opening_enabled = true;
    if (opening == "off") cfg.opening_enabled = false;
    if (opening_side == "source") cfg.opening_side = pipeline::OpeningSide::source;
    if (opening_side == "target") cfg.opening_side = pipeline::OpeningSide::target;
    if (!fit_strategy.empty()) cfg.fit_strategy = pipeline::parse_fit_strategy(fit_strategy);
    if (degree_opt->count()) cfg.poly_degree = poly_degree;
    if (threshold_opt->count()) cfg.ransac.reproj_threshold = reproj_threshold;
    if (iterations_opt->count()) cfg.ransac.max_iterations = max_iterations;
    if (seed_opt->count()) cfg.ransac.seed = seed;
    if (ratio_opt->count()) cfg.match_ratio = match_ratio;
    if (no_cross_check) cfg.cross_check = false;
    cfg.validate();
    return cfg;
  }
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    io::write_text_file(out_path, text + "\n");
  }
}

struct MapArgs {
  std::string path;
  std::string modality = "unknown";
  bool raw = false;

  vessel::VesselMap load(const pipeline::PipelineConfig& cfg) const {
    const auto m = vessel::parse_modality(modality);
    auto img = raster::load_image(path);
    if (raw) return vessel::enhance_vesselness(img, cfg.vesselness, m);
    return {std::move(img), m};
  }
};

void add_map_options(CLI::App* app, MapArgs& args, const std::string& side) {
  app->add_option("--" + side, args.path, side + " vessel map (PNG or PGM)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--" + side + "-modality", args.modality, side + " modality")
      ->check(CLI::IsMember({"octa", "cfp", "wfcfp", "fa", "unknown"}));
  app->add_flag("--" + side + "-raw", args.raw, "treat the " + side + " as a raw image and enhance it");
}

// Dense source grid through `t`; enough to refit a polynomial inverse.
CorrespondenceSet probe_pairs(const fitting::Transform& t, int w, int h) {
  CorrespondenceSet out;
  constexpr int kSteps = 24;
  for (int j = 0; j <= kSteps; ++j) {
    for (int i = 0; i <= kSteps; ++i) {
      const Point2 uv{(w - 1) * static_cast<double>(i) / kSteps, (h - 1) * static_cast<double>(j) / kSteps};
      out.pairs.push_back({uv, fitting::eval_transform(t, uv)});
    }
  }
  return out;
}

int degree_of(const fitting::Transform& t, int fallback) {
  if (const auto* p = std::get_if<fitting::Polynomial2D>(&t.model)) return p->degree();
  return fallback;
}

void write_overlay(const vessel::VesselMap& source, const vessel::VesselMap& target,
                   const fitting::Transform& t, const fs::path& out) {
  const auto inverse = fitting::invert_for_warp(
      t, probe_pairs(t, source.grid.width(), source.grid.height()), degree_of(t, 2));
  const auto warped = warp::warp(source.grid, inverse, target.grid.width(), target.grid.height());
  warp::save_overlay(warp::render_overlay(warped.image, target.grid), out);
}

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      const auto dash = item.find('-');
      try {
        if (dash != std::string::npos && dash > 0) {
          const int lo = std::stoi(item.substr(0, dash));
          const int hi = std::stoi(item.substr(dash + 1));
          for (int n = lo; n <= hi; ++n) out.push_back(n);
        } else {
          out.push_back(std::stoi(item));
        }
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::argument, "bad degree list '" + text + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (int n : out) {
    if (n < 1 || n > 9) throw Error(ErrorKind::argument, "degrees must lie in 1..9");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"care: cross-modal retinal registration by crop, align and refine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "care 0.1.0");

  // register
  auto* reg = app.add_subcommand("register", "register one source/target vessel-map pair");
  PipelineFlags reg_flags;
  reg_flags.attach(reg);
  MapArgs reg_source, reg_target;
  add_map_options(reg, reg_source, "source");
  add_map_options(reg, reg_target, "target");
  std::string reg_rois, reg_out, reg_overlay, reg_matches;
  reg->add_option("--rois", reg_rois, "ROI JSON with macula and optic_disc boxes")->check(CLI::ExistingFile);
  reg->add_option("-o,--out", reg_out, "write the pair report here instead of stdout");
  reg->add_option("--overlay", reg_overlay, "write an RGB overlay PNG");
  reg->add_option("--matches-out", reg_matches, "write the matched correspondences JSON");

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "register and score every pair in a manifest");
  PipelineFlags evl_flags;
  evl_flags.attach(evl);
  std::string evl_manifest, evl_out, evl_csv, evl_overlays;
  evl->add_option("-m,--manifest", evl_manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
  evl->add_option("-o,--out", evl_out, "write the JSON report here instead of stdout");
  evl->add_option("--csv", evl_csv, "write the one-row CSV summary here");
  evl->add_option("--overlay-dir", evl_overlays, "write <id>.png overlays into this directory");

  // synth
  auto* syn = app.add_subcommand("synth", "generate a synthetic problem with known ground truth");
  synth::SynthConfig syn_cfg;
  std::string syn_config, syn_out, syn_kind;
  syn->add_option("-c,--config", syn_config, "synth config JSON")->check(CLI::ExistingFile);
  syn->add_option("-o,--out", syn_out, "output directory")->required();
  auto* syn_seed = syn->add_option("--seed", syn_cfg.seed, "random seed");
  auto* syn_size = syn->add_option("--image-size", syn_cfg.image_size, "target side, px");
  syn->add_option("--kind", syn_kind, "planted transform")->check(CLI::IsMember({"homography", "quadratic"}));
  auto* syn_scale = syn->add_option("--coefficient-scale", syn_cfg.coefficient_scale, "quadratic deviation bound, px");
  auto* syn_noise = syn->add_option("--noise", syn_cfg.noise_sigma, "correspondence noise sigma, px");
  auto* syn_outl = syn->add_option("--outliers", syn_cfg.outlier_fraction, "outlier fraction");
  auto* syn_npts = syn->add_option("--points", syn_cfg.n_points, "number of correspondences");
  auto* syn_fov = syn->add_option("--source-fov", syn_cfg.source_fov, "source side as a fraction of the target");
  const synth::SynthConfig syn_defaults;

  // overlay
  auto* ovl = app.add_subcommand("overlay", "render source warped onto target as an RGB PNG");
  MapArgs ovl_source, ovl_target;
  add_map_options(ovl, ovl_source, "source");
  add_map_options(ovl, ovl_target, "target");
  std::string ovl_transform, ovl_out;
  ovl->add_option("-t,--transform", ovl_transform, "source -> target transform JSON")
      ->required()
      ->check(CLI::ExistingFile);
  ovl->add_option("-o,--out", ovl_out, "output PNG")->required();

  // sweep
  auto* swp = app.add_subcommand("sweep", "RAN-Poly degree sweep over a manifest");
  PipelineFlags swp_flags;
  swp_flags.attach(swp);
  std::string swp_manifest, swp_degrees = "1-5", swp_out;
  swp->add_option("-m,--manifest", swp_manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
  swp->add_option("--degrees", swp_degrees, "comma list or range, e.g. 1-5 or 1,2,4");
  swp->add_option("-o,--out", swp_out, "write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reg->parsed()) {
      const auto cfg = reg_flags.resolve();
      std::optional<io::RoiPair> rois;
      if (!reg_rois.empty()) rois = io::rois_from_json(io::read_text_file(reg_rois));
      const auto source = reg_source.load(cfg);
      const auto target = reg_target.load(cfg);
      const auto r = pipeline::register_pair(source, target, rois, cfg);
      pipeline::PairReport report;
      report.id = fs::path(reg_source.path).stem().string();
      report.diagnostics = r.diagnostics;
      report.transform = r.transform;
      report.evaluation.scored = false;
      report.evaluation.n_matches = r.matches.size();
      if (r.failed()) report.evaluation.classification = eval::Classification::failed;
      emit(pipeline::pair_report_to_json(report), reg_out);
      if (!reg_matches.empty()) io::write_text_file(reg_matches, io::correspondences_to_json(r.matches));
      if (!reg_overlay.empty() && r.transform) write_overlay(source, target, *r.transform, reg_overlay);
      if (r.failed()) std::cerr << "registration failed: " << r.diagnostics.failure << '\n';
    } else if (evl->parsed()) {
      const auto cfg = evl_flags.resolve();
      pipeline::RunOptions options;
      if (!evl_overlays.empty()) options.overlay_dir = fs::path(evl_overlays);
      const auto run = pipeline::run_dataset(fs::path(evl_manifest), cfg, options);
      emit(pipeline::dataset_run_to_json(run), evl_out);
      if (!evl_csv.empty()) {
        io::write_text_file(evl_csv, pipeline::report_csv_header() + "\n" +
                                         pipeline::report_csv_row(run.report) + "\n");
      }
    } else if (syn->parsed()) {
      synth::SynthConfig cfg = syn_defaults;
      if (!syn_config.empty()) cfg = io::synth_config_from_json(io::read_text_file(syn_config));
      if (syn_seed->count()) cfg.seed = syn_cfg.seed;
      if (syn_size->count()) cfg.image_size = syn_cfg.image_size;
      if (syn_kind == "homography") cfg.transform_kind = synth::TransformKind::homography;
      if (syn_kind == "quadratic") cfg.transform_kind = synth::TransformKind::quadratic;
      if (syn_scale->count()) cfg.coefficient_scale = syn_cfg.coefficient_scale;
      if (syn_noise->count()) cfg.noise_sigma = syn_cfg.noise_sigma;
      if (syn_outl->count()) cfg.outlier_fraction = syn_cfg.outlier_fraction;
      if (syn_npts->count()) cfg.n_points = syn_cfg.n_points;
      if (syn_fov->count()) cfg.source_fov = syn_cfg.source_fov;
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::config, e.what());
      }
      synth::export_problem(synth::make_problem(cfg), cfg, syn_out);
      std::cout << "wrote " << syn_out << '\n';
    } else if (ovl->parsed()) {
      const pipeline::PipelineConfig cfg;
      const auto t = io::transform_from_json(io::read_text_file(ovl_transform));
      write_overlay(ovl_source.load(cfg), ovl_target.load(cfg), t, ovl_out);
    } else if (swp->parsed()) {
      const auto cfg = swp_flags.resolve();
      const auto rows = pipeline::degree_sweep(fs::path(swp_manifest), cfg, parse_degrees(swp_degrees));
      std::string csv = pipeline::sweep_to_csv(rows);
      if (!csv.empty() && csv.back() == '\n') csv.pop_back();
      emit(csv, swp_out);
    }
  } catch (const Error& e) {
    std::cerr << "care: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return e.kind() == ErrorKind::config || e.kind() == ErrorKind::argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "care: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
