#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "care/crop.hpp"
#include "care/fitting.hpp"
#include "care/raster.hpp"

namespace care::synth {

enum class TransformKind { homography, quadratic };

struct SynthConfig {
  std::uint64_t seed = 0;
  int image_size = 1000;  // target frame side, pixels
  TransformKind transform_kind = TransformKind::quadratic;
  double coefficient_scale = 5.0;  // bound on the quadratic deviation, pixels
  double noise_sigma = 0.0;
  double outlier_fraction = 0.0;
  int n_points = 50;

  // Homography sampling bounds.
  double max_rotation_deg = 15.0;
  double min_scale = 0.9;
  double max_scale = 1.1;
  double max_translation_fraction = 0.1;
  double projective_strength = 0.02;  // max |w - 1| over the source frame

  // Fraction of the target side covered by the source. Below 1 the target is a
  // wide field around a synthetic macula and ROI boxes are generated for Crop.
  double source_fov = 1.0;
  int gt_grid = 5;  // ground-truth annotation grid per axis

  int source_size() const;
  void validate() const;
};

struct Segment {
  Point2 a;
  Point2 b;
  double width = 1.0;
};

struct VesselTree {
  std::vector<Segment> segments;
  std::vector<Point2> branch_points;
};

struct SynthProblem {
  raster::ImageGrid source_img;
  raster::ImageGrid target_img;
  fitting::Transform gt_transform;      // source -> target
  CorrespondenceSet correspondences;    // noisy, with outliers
  std::vector<bool> outlier_mask;
  CorrespondenceSet gt_points;          // exact annotation grid
  std::optional<crop::RoiBox> macula;
  std::optional<crop::RoiBox> optic_disc;
};

// Planted map over the source frame [0, source_size]^2.
fitting::Transform plant_transform(const SynthConfig& cfg);

struct NoisyCorrespondences {
  CorrespondenceSet pairs;
  std::vector<bool> outlier_mask;
};

// n_points sources through gt with truncated Gaussian noise (|noise| <= 3 sigma),
// then floor(outlier_fraction * n_points) targets replaced by uniform points.
NoisyCorrespondences make_correspondences(const SynthConfig& cfg, const fitting::Transform& gt);

CorrespondenceSet make_gt_points(const SynthConfig& cfg, const fitting::Transform& gt);

VesselTree grow_vessel_tree(int size, std::uint64_t seed);
raster::ImageGrid render_vessels(const VesselTree& tree, int width, int height);

SynthProblem make_problem(const SynthConfig& cfg);

// Writes source.png, target.png, gt_transform.json, correspondences.json,
// gt.json, config.json and (when present) rois.json into dir.
void export_problem(const SynthProblem& problem, const SynthConfig& cfg,
                    const std::filesystem::path& dir);

}  // namespace care::synth
