#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "care/fitting.hpp"
#include "care/raster.hpp"

namespace care::eval {

enum class Classification { failed, inaccurate, acceptable };

std::string_view to_string(Classification c);

struct Thresholds {
  double mee = 20.0;        // acceptable needs MEE strictly below this
  double mae = 50.0;        // ... and MAE strictly below this
  int auc_t_max = 25;       // MEE thresholds 1..t_max
  double match_tol = 20.0;  // acceptable keypoint match radius
};

struct PairEvaluation {
  double mee = 0.0;
  double mae = 0.0;
  Classification classification = Classification::failed;
  std::size_t n_matches = 0;
  std::size_t n_acceptable_matches = 0;
  std::optional<double> dice_s;
  // False when no ground-truth points exist (Dice-only pairs); such pairs
  // stay out of the rate and AUC denominators unless the fit failed.
  bool scored = true;
};

struct DatasetReport {
  std::size_t n_pairs = 0;
  std::size_t n_failed = 0;
  std::size_t n_inaccurate = 0;
  std::size_t n_acceptable = 0;
  double failed_rate = 0.0;
  double inaccurate_rate = 0.0;
  double acceptable_rate = 0.0;
  double auc = 0.0;
  double mean_matches = 0.0;
  double mean_acceptable_matches = 0.0;
  double mean_dice_s = 0.0;
  std::size_t n_dice_excluded = 0;  // failed pairs and pairs without a Dice score
  std::size_t n_unscored = 0;
};

std::vector<double> point_errors(const fitting::Transform& t, const CorrespondenceSet& gt);

// Even counts take the mean of the two middle values.
double median(std::vector<double> values);

PairEvaluation classify_pair(const std::vector<double>& errors, bool fit_failed,
                             const Thresholds& th = {});

// nullopt marks a failed pair, which never counts as under any threshold.
double auc(const std::vector<std::optional<double>>& mees, int t_max = 25);

std::size_t acceptable_matches(const CorrespondenceSet& matches, const fitting::Transform& gt_t,
                               double tol = 20.0);

// 2 sum(a b) / (sum a + sum b); two empty maps agree perfectly (1).
double soft_dice(const raster::ImageGrid& a, const raster::ImageGrid& b);

DatasetReport aggregate(const std::vector<PairEvaluation>& pairs, const Thresholds& th = {});

}  // namespace care::eval
