#include "care/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "care/error.hpp"

namespace care::eval {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::failed: return "failed";
    case Classification::inaccurate: return "inaccurate";
    case Classification::acceptable: return "acceptable";
  }
  return "failed";
}

std::vector<double> point_errors(const fitting::Transform& t, const CorrespondenceSet& gt) {
  if (gt.empty()) throw Error(ErrorKind::argument, "point_errors: empty ground truth");
  std::vector<double> out;
  out.reserve(gt.size());
  for (const auto& c : gt.pairs) out.push_back(distance(fitting::eval_transform(t, c.src), c.tgt));
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::argument, "median of empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

PairEvaluation classify_pair(const std::vector<double>& errors, bool fit_failed,
                             const Thresholds& th) {
  PairEvaluation e;
  if (fit_failed) {
    e.classification = Classification::failed;
    if (!errors.empty()) {
      e.mee = median(errors);
      e.mae = *std::max_element(errors.begin(), errors.end());
    }
    return e;
  }
  if (errors.empty()) throw Error(ErrorKind::argument, "classify_pair: no errors to classify");
  e.mee = median(errors);
  e.mae = *std::max_element(errors.begin(), errors.end());
  e.classification = e.mee < th.mee && e.mae < th.mae ? Classification::acceptable
                                                       : Classification::inaccurate;
  return e;
}

double auc(const std::vector<std::optional<double>>& mees, int t_max) {
  if (mees.empty()) throw Error(ErrorKind::argument, "auc: empty list");
  if (t_max < 1) throw Error(ErrorKind::argument, "auc: t_max must be >= 1");
  double total = 0.0;
  for (int t = 1; t <= t_max; ++t) {
    std::size_t under = 0;
    for (const auto& m : mees) {
      if (m && *m <= t) ++under;
    }
    total += static_cast<double>(under) / static_cast<double>(mees.size());
  }
  return total / t_max;
}

std::size_t acceptable_matches(const CorrespondenceSet& matches, const fitting::Transform& gt_t,
                               double tol) {
  std::size_t n = 0;
  for (const auto& c : matches.pairs) {
    try {
      if (distance(fitting::eval_transform(gt_t, c.src), c.tgt) <= tol) ++n;
    } catch (const Error&) {
      // A point the reference mapping cannot place is not an acceptable match.
    }
  }
  return n;
}

double soft_dice(const raster::ImageGrid& a, const raster::ImageGrid& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::argument, "soft_dice: dimension mismatch");
  }
  double inter = 0.0, sa = 0.0, sb = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    inter += av[i] * bv[i];
    sa += av[i];
    sb += bv[i];
  }
  if (sa + sb == 0.0) return 1.0;
  return 2.0 * inter / (sa + sb);
}

DatasetReport aggregate(const std::vector<PairEvaluation>& pairs, const Thresholds& th) {
  if (pairs.empty()) throw Error(ErrorKind::argument, "aggregate: no pairs");
  DatasetReport r;
  r.n_pairs = pairs.size();
  std::vector<std::optional<double>> mees;
  double matches = 0.0, acceptable = 0.0, dice = 0.0;
  std::size_t n_dice = 0;
  for (const auto& p : pairs) {
    matches += static_cast<double>(p.n_matches);
    acceptable += static_cast<double>(p.n_acceptable_matches);
    if (p.classification != Classification::failed && p.dice_s) {
      dice += *p.dice_s;
      ++n_dice;
    }
    if (!p.scored && p.classification != Classification::failed) {
      ++r.n_unscored;
      continue;
    }
    switch (p.classification) {
      case Classification::failed: ++r.n_failed; break;
      case Classification::inaccurate: ++r.n_inaccurate; break;
      case Classification::acceptable: ++r.n_acceptable; break;
    }
    mees.push_back(p.classification == Classification::failed ? std::nullopt
                                                              : std::optional<double>(p.mee));
  }
  const double n = static_cast<double>(r.n_pairs);
  if (!mees.empty()) {
    const double scored = static_cast<double>(mees.size());
    r.failed_rate = r.n_failed / scored;
    r.inaccurate_rate = r.n_inaccurate / scored;
    r.acceptable_rate = r.n_acceptable / scored;
    r.auc = auc(mees, th.auc_t_max);
  }
  r.mean_matches = matches / n;
  r.mean_acceptable_matches = acceptable / n;
  r.mean_dice_s = n_dice > 0 ? dice / static_cast<double>(n_dice) : 0.0;
  r.n_dice_excluded = r.n_pairs - n_dice;
  return r;
}

}  // namespace care::eval
