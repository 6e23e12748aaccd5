#include <cmath>
#include <random>

#include "care/error.hpp"
#include "care/fitting.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace care;
using namespace care::fitting;

namespace {

CorrespondenceSet through(const Transform& t, const std::vector<Point2>& pts) {
  CorrespondenceSet out;
  for (auto p : pts) out.pairs.push_back({p, oracle::transform_eval(t, p)});
  return out;
}

std::vector<Point2> random_points(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point2> out;
  for (int i = 0; i < n; ++i) out.push_back({u(rng), u(rng)});
  return out;
}

// Degree-n polynomial with coefficients in [-1,1] scaled so each term stays
// bounded on [0,S]^2, plus identity linear part.
Polynomial2D planted_poly(std::mt19937_64& rng, int n, double S) {
  std::uniform_real_distribution<double> c(-1, 1);
  Polynomial2D p(n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double scale = std::pow(S, 1 - (i + j));
      p.set_a(i, j, c(rng) * scale);
      p.set_b(i, j, c(rng) * scale);
    }
  return p;
}

double max_coef_diff(const Polynomial2D& a, const Polynomial2D& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.a().size(); ++k) {
    m = std::max(m, std::abs(a.a()[k] - b.a()[k]));
    m = std::max(m, std::abs(a.b()[k] - b.b()[k]));
  }
  return m;
}

double max_h_diff(const Homography& a, const Homography& b) {
  double m = 0;
  for (int k = 0; k < 9; ++k) m = std::max(m, std::abs(a.normalized().h[k] - b.normalized().h[k]));
  return m;
}

}  // namespace

TEST_CASE("eval_transform examples") {
  const Transform id{Homography::identity(), {0, 0}};
  CHECK(eval_transform(id, {123.4, 56.7}) == Point2{123.4, 56.7});
  const Transform lin{Polynomial2D::identity(1), {0, 0}};
  CHECK(eval_transform(lin, {3.25, -9.5}) == Point2{3.25, -9.5});

  Polynomial2D p = Polynomial2D::identity(2);
  p.set_a(0, 0, 2);
  p.set_a(1, 0, 0.5);
  p.set_a(0, 1, 0.1);
  p.set_a(2, 0, 0.001);
  const auto r = eval_transform(Transform{p, {0, 0}}, {10, 20});
  CHECK(r.x == doctest::Approx(9.1).epsilon(1e-14));
  CHECK(r.y == doctest::Approx(20.0).epsilon(1e-14));

  const Transform inf{Homography{{1, 0, 0, 0, 1, 0, 1, 0, -5}}, {0, 0}};
  CHECK_THROWS_AS(eval_transform(inf, {5, 0}), Error);
}

TEST_CASE("polynomial evaluation matches the power-sum oracle") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 5; ++n) {
    const auto p = planted_poly(rng, n, 500);
    for (auto q : random_points(rng, 20, -10, 600)) {
      const auto a = p(q);
      const auto b = oracle::poly_eval(p, q);
      CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
      CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
    }
  }
}

TEST_CASE("Polynomial2D layout and validation") {
  CHECK(Polynomial2D::coefficient_count(2) == 6);
  CHECK(Polynomial2D::index(0, 0) == 0);
  CHECK(Polynomial2D::index(1, 0) == 1);
  CHECK(Polynomial2D::index(0, 1) == 2);
  CHECK(Polynomial2D::index(2, 0) == 3);
  CHECK(Polynomial2D::index(1, 1) == 4);
  CHECK(Polynomial2D::index(0, 2) == 5);
  CHECK_THROWS_AS(Polynomial2D(0), Error);
  CHECK_THROWS_AS(Polynomial2D(2, std::vector<double>(5), std::vector<double>(6)), Error);
  CHECK_THROWS_AS(Polynomial2D(1, {0, 1, NAN}, {0, 0, 1}), Error);
}

TEST_CASE("homography algebra") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 20; ++t) {
    const auto H = oracle::random_homography(rng, 1000);
    const auto Hi = H.inverse();
    for (auto p : random_points(rng, 5, 0, 1000)) {
      const auto q = oracle::homography_eval(Hi, oracle::homography_eval(H, p));
      CHECK(q.x == doctest::Approx(p.x).epsilon(1e-9));
      CHECK(q.y == doctest::Approx(p.y).epsilon(1e-9));
    }
    const auto C = compose(H, Homography::translation(3, -4));
    const auto p = Point2{10, 20};
    const auto direct = oracle::homography_eval(H, {13, 16});
    CHECK(oracle::homography_eval(C, p).x == doctest::Approx(direct.x));
  }
  CHECK_THROWS_AS((Homography{{1, 2, 0, 2, 4, 0, 0, 0, 1}}.inverse()), Error);
}

TEST_CASE("fit_homography_dlt examples") {
  const std::vector<Point2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(max_h_diff(fit_homography_dlt(through({Homography::identity(), {}}, square)), Homography::identity()) <
        1e-12);
  CorrespondenceSet shifted;
  for (auto p : square) shifted.pairs.push_back({p, {p.x + 10, p.y + 5}});
  CHECK(max_h_diff(fit_homography_dlt(shifted), Homography::translation(10, 5)) < 1e-12);

  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto H = oracle::random_homography(rng, 1000);
    const auto got = fit_homography_dlt(through({H, {}}, random_points(rng, 8, 0, 1000)));
    CHECK(max_h_diff(got, H) < 1e-8);
  }
  CorrespondenceSet three{{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}}};
  CHECK_THROWS_AS(fit_homography_dlt(three), Error);
  CorrespondenceSet collinear;
  for (int i = 0; i < 6; ++i) collinear.pairs.push_back({{double(i), double(i)}, {double(i), double(2 * i)}});
  try {
    fit_homography_dlt(collinear);
    FAIL("collinear input must not fit");
  } catch (const Error& e) {
    CHECK(e.is_fit_failure());
  }
}

TEST_CASE("DLT is equivariant under similarity changes of coordinates") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 20; ++t) {
    const auto H = oracle::random_homography(rng, 1000);
    const auto pts = random_points(rng, 12, 0, 1000);
    std::normal_distribution<double> noise(0, 0.5);
    CorrespondenceSet data;
    for (auto p : pts) {
      auto q = oracle::homography_eval(H, p);
      data.pairs.push_back({p, {q.x + noise(rng), q.y + noise(rng)}});
    }
    const auto fitted = fit_homography_dlt(data);
    // Similarity S applied to targets: the fitted map must become S o fitted.
    const double a = 0.3, s = 1.7, tx = 40, ty = -25;
    const Homography S{{s * std::cos(a), -s * std::sin(a), tx, s * std::sin(a), s * std::cos(a), ty, 0, 0, 1}};
    CorrespondenceSet moved = data;
    for (auto& c : moved.pairs) c.tgt = oracle::homography_eval(S, c.tgt);
    const auto refit = fit_homography_dlt(moved);
    for (auto p : random_points(rng, 10, 0, 1000)) {
      const auto want = oracle::homography_eval(S, oracle::homography_eval(fitted, p));
      const auto got = oracle::homography_eval(refit, p);
      CHECK(std::abs(want.x - got.x) < 1e-8);
      CHECK(std::abs(want.y - got.y) < 1e-8);
    }
  }
}

TEST_CASE("ransac_homography") {
  std::mt19937_64 rng(25);
  const auto H = oracle::random_homography(rng, 1000);
  const auto clean = through({H, {}}, random_points(rng, 30, 0, 1000));
  const auto res = ransac_homography(clean, {});
  CHECK(res.inlier_count() == 30);
  CHECK(max_h_diff(res.homography, H) < 1e-8);

  // Determinism.
  auto noisy = clean;
  std::uniform_real_distribution<double> u(0, 1000);
  for (int i = 0; i < 10; ++i) noisy.pairs[i].tgt = {u(rng), u(rng)};
  const auto a = ransac_homography(noisy, {3.0, 2000, 0.999, 9});
  const auto b = ransac_homography(noisy, {3.0, 2000, 0.999, 9});
  CHECK(a.inlier_mask == b.inlier_mask);
  CHECK(a.homography == b.homography);

  CorrespondenceSet three(clean);
  three.pairs.resize(3);
  try {
    ransac_homography(three, {});
    FAIL("three pairs must not fit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  CHECK_THROWS_AS(ransac_homography(clean, {0.0, 10, 0.99, 1}), Error);
  CHECK_THROWS_AS(ransac_homography(clean, {1.0, 0, 0.99, 1}), Error);
  CHECK_THROWS_AS(ransac_homography(clean, {1.0, 10, 1.0, 1}), Error);
}

TEST_CASE("ransac rejects planted outliers") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    const auto H = oracle::random_homography(rng, 1000);
    auto data = through({H, {}}, random_points(rng, 50, 0, 1000));
    std::uniform_real_distribution<double> u(0, 1000);
    std::vector<bool> outlier(50, false);
    for (int i = 0; i < 15; ++i) {
      data.pairs[i].tgt = {u(rng), u(rng)};
      outlier[i] = true;
    }
    const auto r = ransac_homography(data, {3.0, 2000, 0.999, seed});
    bool ok = true;
    for (int i = 0; i < 50; ++i) {
      if (outlier[i] && r.inlier_mask[i] &&
          distance(oracle::homography_eval(H, data.pairs[i].src), data.pairs[i].tgt) > 3.0)
        ok = false;
      if (!outlier[i] &&
          distance(oracle::homography_eval(r.homography, data.pairs[i].src), data.pairs[i].tgt) >= 1.0)
        ok = false;
    }
    good += ok;
  }
  CHECK(good >= 38);
}

TEST_CASE("fit_polynomial") {
  std::mt19937_64 rng(26);
  const auto pts = random_points(rng, 30, 0, 1000);
  for (int n = 1; n <= 4; ++n) {
    const auto p = fit_polynomial(through({Polynomial2D::identity(n), {}}, pts), n);
    CHECK(max_coef_diff(p, Polynomial2D::identity(n)) < 1e-9);
  }

  CorrespondenceSet five = through({Polynomial2D::identity(2), {}}, random_points(rng, 5, 0, 100));
  try {
    fit_polynomial(five, 2);
    FAIL("five points cannot fit six coefficients");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  CorrespondenceSet line;
  for (int i = 0; i < 10; ++i) line.pairs.push_back({{double(i), 2.0 * i}, {double(i), 2.0 * i}});
  try {
    fit_polynomial(line, 2);
    FAIL("collinear sources are rank deficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degeneracy);
  }

  for (int t = 0; t < 50; ++t) {
    const auto planted = planted_poly(rng, 2, 1000);
    const auto got = fit_polynomial(through({planted, {}}, random_points(rng, 20, 0, 1000)), 2);
    CHECK(max_coef_diff(got, planted) < 1e-8);
  }
}

TEST_CASE("polynomial interpolation and degree monotonicity") {
  std::mt19937_64 rng(27);
  for (int n = 1; n <= 4; ++n) {
    const auto planted = planted_poly(rng, n, 500);
    const auto count = static_cast<int>(Polynomial2D::coefficient_count(n));
    const auto exact = through({planted, {}}, random_points(rng, count, 0, 500));
    const auto p = fit_polynomial(exact, n);
    for (const auto& c : exact.pairs) CHECK(distance(p(c.src), c.tgt) < 1e-9);

    const auto many = through({planted, {}}, random_points(rng, 40, 0, 500));
    for (int m = n; m <= 5; ++m) {
      const auto q = fit_polynomial(many, m);
      for (const auto& c : many.pairs) CHECK(distance(q(c.src), c.tgt) < 1e-9);
    }
  }
}

TEST_CASE("fit_ran_poly") {
  std::mt19937_64 rng(28);
  const auto H = oracle::random_homography(rng, 1000);
  const auto planar = through({H, {}}, random_points(rng, 40, 100, 900));
  const auto rp = fit_ran_poly(planar, {}, 3);
  for (auto p : random_points(rng, 50, 300, 700)) {
    // Degree 3 cannot reproduce a projective map exactly; the action is close.
    CHECK(distance(rp.polynomial(p), oracle::homography_eval(H, p)) < 0.5);
  }

  const Homography A{{1.02, 0.05, 12, -0.03, 0.98, -7, 0, 0, 1}};
  const auto affine = through({A, {}}, random_points(rng, 30, 0, 1000));
  const auto r1 = fit_ran_poly(affine, {}, 1);
  for (auto p : random_points(rng, 20, 0, 1000)) CHECK(distance(r1.polynomial(p), oracle::homography_eval(A, p)) < 1e-6);
  CHECK(max_coef_diff(r1.polynomial, fit_polynomial(affine, 1)) < 1e-9);

  auto five = through({A, {}}, random_points(rng, 5, 0, 1000));
  try {
    fit_ran_poly(five, {}, 2);
    FAIL("five inliers cannot fit degree 2");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}

TEST_CASE("invert_for_warp") {
  const Transform id{Homography::identity(), {0, 0}};
  const auto inv = invert_for_warp(id, {}, 2);
  CHECK(std::get<Homography>(inv.model).normalized() == Homography::identity());

  const auto tinv = invert_for_warp({Homography::translation(10, 5), {0, 0}}, {}, 2);
  CHECK(max_h_diff(std::get<Homography>(tinv.model), Homography::translation(-10, -5)) < 1e-12);

  std::mt19937_64 rng(29);
  Polynomial2D fwd = Polynomial2D::identity(2);
  fwd.set_a(0, 0, 12);
  fwd.set_b(0, 0, -8);
  fwd.set_a(2, 0, 4e-6);
  fwd.set_a(1, 1, -3e-6);
  fwd.set_b(0, 2, 5e-6);
  const Transform t{fwd, {30, 40}};
  const auto pts = random_points(rng, 60, 0, 1000);
  CorrespondenceSet inliers;
  for (auto p : pts) inliers.pairs.push_back({p, eval_transform(t, p)});
  const auto back = invert_for_warp(t, inliers, 2);
  for (auto p : random_points(rng, 100, 100, 900)) {
    CHECK(distance(eval_transform(back, eval_transform(t, p)), p) < 0.5);
  }
}

TEST_CASE("with_offset folds homographies and keeps polynomial offsets") {
  std::mt19937_64 rng(30);
  const auto H = oracle::random_homography(rng, 500);
  const auto folded = with_offset({H, {0, 0}}, {250, 100});
  CHECK(folded.offset == Point2{0, 0});
  const auto p = Point2{123, 77};
  const auto want = oracle::homography_eval(H, p);
  CHECK(eval_transform(folded, p).x == doctest::Approx(want.x + 250).epsilon(1e-12));
  const auto poly = with_offset({Polynomial2D::identity(2), {1, 2}}, {250, 100});
  CHECK(poly.offset == Point2{251, 102});
  CHECK(eval_transform(poly, p) == Point2{374, 179});
}
