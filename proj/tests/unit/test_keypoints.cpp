#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "care/error.hpp"
#include "care/keypoints.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace care;
using namespace care::keypoints;
using care::raster::ImageGrid;

namespace {

vessel::Skeleton draw(int w, int h, const std::vector<std::pair<int, int>>& px) {
  std::vector<double> v(static_cast<std::size_t>(w * h), 0.0);
  for (auto [x, y] : px) v[y * w + x] = 1.0;
  return {ImageGrid(w, h, v)};
}

std::vector<std::pair<int, int>> hline(int y, int x0, int x1) {
  std::vector<std::pair<int, int>> out;
  for (int x = x0; x <= x1; ++x) out.push_back({x, y});
  return out;
}
std::vector<std::pair<int, int>> vline(int x, int y0, int y1) {
  std::vector<std::pair<int, int>> out;
  for (int y = y0; y <= y1; ++y) out.push_back({x, y});
  return out;
}

template <typename... L>
std::vector<std::pair<int, int>> join(L... lists) {
  std::vector<std::pair<int, int>> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

Descriptor vec(std::initializer_list<double> v) { return Descriptor{std::vector<double>(v)}; }

Descriptor random_descriptor(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Descriptor d;
  for (std::size_t i = 0; i < 8; ++i) d.values.push_back(n(rng));
  return d;
}

// Exhaustive distance-matrix matcher with the documented rules.
std::set<std::pair<std::size_t, std::size_t>> oracle_matches(const std::vector<Descriptor>& s,
                                                           const std::vector<Descriptor>& t,
                                                           double ratio, bool cross) {
  const std::size_t m = s.size(), n = t.size();
  std::vector<std::vector<double>> d(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0;
      for (std::size_t k = 0; k < s[i].values.size(); ++k)
        acc += (s[i].values[k] - t[j].values[k]) * (s[i].values[k] - t[j].values[k]);
      d[i][j] = std::sqrt(acc);
    }
  auto pass = [ratio](std::vector<double> row, std::size_t& arg) {
    arg = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
    if (row.size() == 1) return true;
    const double best = row[arg];
    row.erase(row.begin() + static_cast<long>(arg));
    const double second = *std::min_element(row.begin(), row.end());
    if (second == 0) return false;
    return best / second <= ratio;
  };
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = 0;
    if (!pass(d[i], j)) continue;
    if (cross) {
      std::vector<double> col(m);
      for (std::size_t k = 0; k < m; ++k) col[k] = d[k][j];
      std::size_t back = 0;
      if (!pass(col, back) || back != i) continue;
    }
    out.insert({i, j});
  }
  return out;
}

}  // namespace

TEST_CASE("crossing number matches the neighbourhood oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = oracle::random_binary(12, 12, 0.4, rng);
    const oracle::Bits b(img);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) CHECK(crossing_number(img, x, y) == oracle::crossing_number(b, x, y));
  }
}

TEST_CASE("straight line has no junctions") {
  CHECK(detect_junctions(draw(40, 10, hline(5, 2, 37)), 5.0).empty());
  CHECK(detect_junctions(draw(8, 8, {}), 5.0).empty());
}

TEST_CASE("plus sign gives one crossover") {
  const auto sk = draw(31, 31, join(hline(15, 3, 27), vline(15, 3, 27)));
  int fours = 0;
  const oracle::Bits b(sk.grid);
  for (int y = 0; y < 31; ++y)
    for (int x = 0; x < 31; ++x)
      if (b.get(x, y, 0) && oracle::crossing_number(b, x, y) == 4) ++fours;
  CHECK(fours == 1);
  const auto kps = detect_junctions(sk, 5.0);
  REQUIRE(kps.size() == 1);
  CHECK(kps[0].kind == JunctionKind::crossover);
  CHECK(kps[0].x == 15.0);
  CHECK(kps[0].y == 15.0);
  CHECK(kps[0].strength == 4.0);
}

TEST_CASE("T junction gives one bifurcation") {
  const auto sk = draw(31, 31, join(hline(10, 3, 27), vline(15, 11, 27)));
  const auto kps = detect_junctions(sk, 5.0);
  REQUIRE(kps.size() == 1);
  CHECK(kps[0].kind == JunctionKind::bifurcation);
  CHECK(std::abs(kps[0].x - 15.0) <= 1.0);
  CHECK(std::abs(kps[0].y - 10.0) <= 1.0);
}

TEST_CASE("junctions translate exactly with the skeleton") {
  const auto base = join(hline(10, 3, 27), vline(15, 11, 27), hline(20, 16, 26), vline(8, 0, 9));
  const auto kps = detect_junctions(draw(50, 50, base), 5.0);
  REQUIRE(!kps.empty());
  for (auto [dx, dy] : {std::pair{3, 7}, std::pair{11, 2}, std::pair{0, 15}}) {
    std::vector<std::pair<int, int>> moved;
    for (auto [x, y] : base) moved.push_back({x + dx, y + dy});
    const auto shifted = detect_junctions(draw(50, 50, moved), 5.0);
    REQUIRE(shifted.size() == kps.size());
    for (std::size_t i = 0; i < kps.size(); ++i) {
      CHECK(shifted[i].x == kps[i].x + dx);
      CHECK(shifted[i].y == kps[i].y + dy);
    }
  }
}

TEST_CASE("descriptor degenerate and determinism rules") {
  const vessel::VesselMap flat{ImageGrid::filled(50, 50, 0.3), vessel::Modality::unknown};
  const auto d = describe(flat, {25, 25}, 8);
  REQUIRE(d.values.size() == kDescriptorLength);
  for (double v : d.values) CHECK(v == doctest::Approx(1.0 / std::sqrt(128.0)));

  std::vector<double> v(80 * 40, 0.0);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 80; ++x) {
      const int lx = x % 40;
      v[y * 80 + x] = (lx > 15 && y > 12) ? 1.0 : 0.0;
    }
  const vessel::VesselMap twin{ImageGrid(80, 40, v), vessel::Modality::unknown};
  const auto a = describe(twin, {18, 18}, 8);
  const auto b = describe(twin, {58, 18}, 8);
  CHECK(a.values == b.values);
  double norm = 0;
  for (double x : a.values) norm += x * x;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(describe(twin, {18, 18}, 0), Error);
}

TEST_CASE("descriptor is not rotation invariant") {
  const int n = 41;
  std::vector<double> corner(n * n, 0.0), rotated(n * n, 0.0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (x >= 20 && y >= 20 && (x < 24 || y < 24)) corner[y * n + x] = 1.0;
  // 90 degree rotation about the centre: (x,y) -> (n-1-y, x).
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) rotated[x * n + (n - 1 - y)] = corner[y * n + x];
  const vessel::VesselMap a{ImageGrid(n, n, corner), vessel::Modality::unknown};
  const vessel::VesselMap b{ImageGrid(n, n, rotated), vessel::Modality::unknown};
  CHECK(descriptor_distance(describe(a, {20, 20}, 12), describe(b, {20, 20}, 12)) > 0.1);
}

TEST_CASE("matcher examples") {
  std::mt19937_64 rng(4);
  std::vector<Descriptor> list;
  for (int i = 0; i < 10; ++i) list.push_back(random_descriptor(rng));
  const auto m = match_descriptors(list, list, {0.8, true});
  REQUIRE(m.size() == list.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i].source == i);
    CHECK(m[i].target == i);
  }
  CHECK(match_descriptors(list, {}, {}).empty());
  CHECK(match_bruteforce({}, {}, {}).empty());

  const std::vector<Descriptor> tgt{vec({0, 0}), vec({10, 0}), vec({0, 10})};
  const std::vector<Descriptor> src{vec({0.1, 0}), vec({10, 0.1}), vec({0, 10 / 1.95})};
  const auto oracle = oracle_matches(src, tgt, 0.8, true);
  CHECK(oracle == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& x : match_descriptors(src, tgt, {0.8, true})) got.insert({x.source, x.target});
  CHECK(got == oracle);

  CHECK_THROWS_AS(match_descriptors(src, {vec({1, 2, 3})}, {}), Error);
  CHECK_THROWS_AS(match_descriptors(src, tgt, {0.0, true}), Error);
  CHECK_THROWS_AS(match_descriptors(src, tgt, {1.5, true}), Error);
}

TEST_CASE("matcher agrees with the exhaustive oracle and is symmetric") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Descriptor> s, t;
    const int ns = 1 + static_cast<int>(rng() % 12), nt = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < ns; ++i) s.push_back(random_descriptor(rng));
    for (int i = 0; i < nt; ++i) {
      // Some targets are noisy copies of sources.
      if (i < ns && rng() % 2) {
        auto d = s[i];
        for (auto& x : d.values) x += 0.05 * std::normal_distribution<double>(0, 1)(rng);
        t.push_back(d);
      } else {
        t.push_back(random_descriptor(rng));
      }
    }
    for (bool cross : {true, false}) {
      const double ratio = cross ? 0.8 : 0.9;
      std::set<std::pair<std::size_t, std::size_t>> got;
      for (const auto& x : match_descriptors(s, t, {ratio, cross})) {
        got.insert({x.source, x.target});
        // Nearest-neighbour property.
        for (const auto& other : t) CHECK(x.distance <= descriptor_distance(s[x.source], other));
      }
      CHECK(got == oracle_matches(s, t, ratio, cross));
      if (cross) {
        std::set<std::pair<std::size_t, std::size_t>> swapped;
        for (const auto& x : match_descriptors(t, s, {ratio, cross})) swapped.insert({x.target, x.source});
        CHECK(swapped == got);
      }
    }
  }
}

TEST_CASE("match_bruteforce carries keypoint coordinates") {
  std::mt19937_64 rng(9);
  std::vector<Feature> s, t;
  for (int i = 0; i < 5; ++i) {
    auto d = random_descriptor(rng);
    s.push_back({{double(i), double(2 * i)}, d});
    t.push_back({{double(100 + i), double(50 - i)}, d});
  }
  std::reverse(t.begin(), t.end());
  const auto p = match_bruteforce(s, t, {});
  REQUIRE(p.size() == 5);
  for (const auto& c : p.pairs) {
    CHECK(c.tgt.x == 100 + c.src.x);
    CHECK(c.tgt.y == 50 - c.src.x);
  }
}
