#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "care/crop.hpp"
#include "care/evaluation.hpp"
#include "care/fitting.hpp"
#include "care/keypoints.hpp"
#include "care/raster.hpp"
#include "care/serialization.hpp"
#include "care/vessel.hpp"

namespace care::pipeline {

enum class FitStrategy { ransac_only, poly_only, ran_poly };
enum class OpeningSide { source, target };

std::string_view to_string(FitStrategy s);
FitStrategy parse_fit_strategy(std::string_view name);

struct PipelineConfig {
  bool crop_enabled = true;
  crop::RadiusRule crop_rule = crop::RadiusRule::farthest_corner;
  // Unset: applied to the OCTA side of OCTA/wfCFP pairs and skipped otherwise.
  std::optional<bool> opening_enabled;
  OpeningSide opening_side = OpeningSide::source;
  raster::StructuringElement opening_element{1, raster::ElementShape::square};
  FitStrategy fit_strategy = FitStrategy::ran_poly;
  int poly_degree = 2;
  fitting::RansacConfig ransac;
  double match_ratio = 0.8;
  bool cross_check = true;
  double nms_radius = 5.0;
  int patch_radius = 16;
  double binarize_threshold = 0.5;
  vessel::VesselnessParams vesselness;
  eval::Thresholds thresholds;

  void validate() const;
};

// Keys absent from the document keep their value from `base`.
PipelineConfig config_from_json(std::string_view text, const PipelineConfig& base = {});
std::string config_to_json(const PipelineConfig& cfg);

struct Diagnostics {
  std::size_t source_keypoints = 0;
  std::size_t target_keypoints = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
  std::optional<crop::CropFrame> crop;
  bool opening_applied = false;
  std::string failure;  // empty unless fitting failed
};

struct Registration {
  std::optional<fitting::Transform> transform;  // source -> full target frame
  CorrespondenceSet matches;                    // target side in the full frame
  std::vector<bool> inlier_mask;                // per match; all true without RANSAC
  Diagnostics diagnostics;

  bool failed() const { return !transform.has_value(); }
};

// Fits the configured strategy; fitting errors become a failed Registration.
Registration fit_correspondences(const CorrespondenceSet& matches, const PipelineConfig& cfg);

// Crop -> binarise -> opening -> skeletonise -> detect/describe/match -> fit in
// the crop frame -> shift to the full target frame.
Registration register_pair(const vessel::VesselMap& source, const vessel::VesselMap& target,
                           const std::optional<io::RoiPair>& rois, const PipelineConfig& cfg);

struct MapFile {
  std::filesystem::path path;
  vessel::Modality modality = vessel::Modality::unknown;
  bool raw = false;  // raw fundus image: run the vesselness fallback first
};

struct PairInput {
  std::string id;
  std::optional<vessel::VesselMap> source;  // in memory, or
  std::optional<MapFile> source_file;       // loaded when the pair is processed
  std::optional<vessel::VesselMap> target;
  std::optional<MapFile> target_file;
  std::optional<io::RoiPair> rois;
  std::optional<CorrespondenceSet> matches;  // precomputed: skips detection and matching
  std::optional<CorrespondenceSet> gt;
  std::optional<fitting::Transform> gt_transform;
};

struct PairReport {
  std::string id;
  eval::PairEvaluation evaluation;
  Diagnostics diagnostics;
  std::optional<fitting::Transform> transform;
};

struct DatasetRun {
  eval::DatasetReport report;
  std::vector<PairReport> pairs;  // sorted by id
};

struct RunOptions {
  std::optional<std::filesystem::path> overlay_dir;
};

// Manifest: [{"id":..,"source":path,"target":path,"rois":path|null,"gt":path|null}, ...]
// plus optional "gt_transform", "matches", "source_modality", "target_modality",
// "source_raw", "target_raw". Relative paths resolve against the manifest's folder.
std::vector<PairInput> load_manifest(const std::filesystem::path& manifest);

PairReport evaluate_pair(const PairInput& pair, const PipelineConfig& cfg,
                         const RunOptions& options = {});

DatasetRun run_dataset(const std::vector<PairInput>& pairs, const PipelineConfig& cfg,
                       const RunOptions& options = {});
DatasetRun run_dataset(const std::filesystem::path& manifest, const PipelineConfig& cfg,
                       const RunOptions& options = {});

struct SweepRow {
  int degree = 0;
  eval::DatasetReport report;
};

// run_dataset with ran_poly at each degree.
std::vector<SweepRow> degree_sweep(const std::vector<PairInput>& pairs, const PipelineConfig& cfg,
                                   const std::vector<int>& degrees);
std::vector<SweepRow> degree_sweep(const std::filesystem::path& manifest,
                                   const PipelineConfig& cfg, const std::vector<int>& degrees);

// Smallest degree attaining the highest AUC.
int best_degree(const std::vector<SweepRow>& rows);

std::string pair_report_to_json(const PairReport& pair);
std::string dataset_run_to_json(const DatasetRun& run);
std::string report_csv_header();
std::string report_csv_row(const eval::DatasetReport& report);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace care::pipeline
