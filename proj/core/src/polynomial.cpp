#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "care/error.hpp"
#include "care/fitting.hpp"

namespace care::fitting {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Affine map of one axis onto [-1,1]: t = (s - center) / half_range.
struct AxisScale {
  double center = 0.0;
  double half_range = 1.0;
};

AxisScale axis_scale(double lo, double hi) {
  AxisScale s;
  s.center = 0.5 * (lo + hi);
  s.half_range = hi > lo ? 0.5 * (hi - lo) : 1.0;
  return s;
}

// Coefficients of ((s - c)/h)^i in powers of s.
std::vector<double> expand_power(int i, const AxisScale& s) {
  std::vector<double> out(i + 1);
  for (int k = 0; k <= i; ++k) {
    out[k] = binomial(i, k) * std::pow(-s.center, i - k) / std::pow(s.half_range, i);
  }
  return out;
}

}  // namespace

Polynomial2D fit_polynomial(const CorrespondenceSet& pairs, int degree) {
  if (degree < 1) throw Error(ErrorKind::argument, "polynomial degree must be >= 1");
  const std::size_t terms = Polynomial2D::coefficient_count(degree);
  const std::size_t m = pairs.size();
  if (m < terms) {
    throw Error(ErrorKind::insufficient_data,
                "degree-" + std::to_string(degree) + " polynomial needs " + std::to_string(terms) +
                    " correspondences, got " + std::to_string(m));
  }

  double umin = pairs.pairs[0].src.x, umax = umin;
  double vmin = pairs.pairs[0].src.y, vmax = vmin;
  for (const auto& c : pairs.pairs) {
    umin = std::min(umin, c.src.x);
    umax = std::max(umax, c.src.x);
    vmin = std::min(vmin, c.src.y);
    vmax = std::max(vmax, c.src.y);
  }
  const AxisScale su = axis_scale(umin, umax);
  const AxisScale sv = axis_scale(vmin, vmax);

  Eigen::MatrixXd design(m, terms);
  Eigen::MatrixXd rhs(m, 2);
  for (std::size_t r = 0; r < m; ++r) {
    const double u = (pairs.pairs[r].src.x - su.center) / su.half_range;
    const double v = (pairs.pairs[r].src.y - sv.center) / sv.half_range;
    std::size_t col = 0;
    for (int k = 0; k <= degree; ++k) {
      for (int j = 0; j <= k; ++j) design(r, col++) = std::pow(u, k - j) * std::pow(v, j);
    }
    rhs(r, 0) = pairs.pairs[r].tgt.x;
    rhs(r, 1) = pairs.pairs[r].tgt.y;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-10 * s(0))) {
    throw Error(ErrorKind::degeneracy, "polynomial design matrix is rank deficient");
  }
  const Eigen::MatrixXd scaled = svd.solve(rhs);

  // Back to the raw-pixel monomial basis.
  Polynomial2D out(degree);
  std::vector<double> a(terms, 0.0), b(terms, 0.0);
  std::size_t col = 0;
  for (int k = 0; k <= degree; ++k) {
    for (int j = 0; j <= k; ++j, ++col) {
      const int i = k - j;
      const auto eu = expand_power(i, su);
      const auto ev = expand_power(j, sv);
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= j; ++q) {
          const std::size_t idx = Polynomial2D::index(p, q);
          a[idx] += scaled(col, 0) * eu[p] * ev[q];
          b[idx] += scaled(col, 1) * eu[p] * ev[q];
        }
      }
    }
  }
  return Polynomial2D(degree, std::move(a), std::move(b));
}

}  // namespace care::fitting
