#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "care/error.hpp"
#include "care/raster.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace care;
using namespace care::raster;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "care_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_pgm(const std::filesystem::path& p, int w, int h, int maxval, const std::vector<int>& px) {
  std::ofstream f(p, std::ios::binary);
  f << "P5\n# comment\n" << w << " " << h << "\n" << maxval << "\n";
  for (int v : px) {
    if (maxval > 255) f.put(static_cast<char>(v >> 8));
    f.put(static_cast<char>(v & 0xff));
  }
}

ImageGrid square_in(int n, int x0, int y0, int side) {
  std::vector<double> v(static_cast<std::size_t>(n * n), 0.0);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) v[y * n + x] = 1.0;
  return ImageGrid(n, n, v);
}

}  // namespace

TEST_CASE("ImageGrid rejects bad shapes and values") {
  CHECK_THROWS_AS(ImageGrid(0, 3, {}), Error);
  CHECK_THROWS_AS(ImageGrid(2, 2, {0, 0, 0}), Error);
  CHECK_THROWS_AS(ImageGrid(1, 1, {1.5}), Error);
  CHECK_THROWS_AS(ImageGrid(1, 1, {-0.1}), Error);
  CHECK_THROWS_AS(ImageGrid(1, 1, {std::nan("")}), Error);
  CHECK(ImageGrid::filled(3, 2, 0.25).at(2, 1) == 0.25);
}

TEST_CASE("load_image rescales 8-bit samples") {
  const auto p = temp_path("levels.pgm");
  write_pgm(p, 3, 1, 255, {255, 0, 128});
  const auto img = load_image(p);
  REQUIRE(img.width() == 3);
  CHECK(img.at(0, 0) == 1.0);
  CHECK(img.at(1, 0) == 0.0);
  CHECK(img.at(2, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("load_image reads 16-bit PGM") {
  const auto p = temp_path("deep.pgm");
  write_pgm(p, 2, 1, 65535, {65535, 32768});
  const auto img = load_image(p);
  CHECK(img.at(0, 0) == 1.0);
  CHECK(img.at(1, 0) == doctest::Approx(32768.0 / 65535.0));
}

TEST_CASE("PNG round trip is exact at 8-bit levels") {
  std::vector<double> v;
  for (int i = 0; i < 256; ++i) v.push_back(i / 255.0);
  const ImageGrid img(16, 16, v);
  const auto p = temp_path("ramp.png");
  save_image(img, p);
  const auto back = load_image(p);
  REQUIRE(back.width() == 16);
  for (int i = 0; i < 256; ++i) CHECK(back.values()[i] == doctest::Approx(v[i]).epsilon(1e-12));

  const auto q = temp_path("ramp.pgm");
  save_image(img, q);
  CHECK(load_image(q) == back);
}

TEST_CASE("load_image errors") {
  CHECK_THROWS_AS(load_image(temp_path("does_not_exist.png")), Error);
  const auto p = temp_path("junk.png");
  std::ofstream(p) << "not an image";
  try {
    load_image(p);
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
  }
}

TEST_CASE("binarize") {
  CHECK(binarize(ImageGrid::filled(4, 4, 0.5), 0.5) == ImageGrid::filled(4, 4, 1.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(25);
  for (auto& x : v) x = u(rng);
  CHECK(binarize(ImageGrid(5, 5, v), 0.0) == ImageGrid::filled(5, 5, 1.0));

  std::vector<double> checker, expect;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      checker.push_back((x + y) % 2 ? 0.7 : 0.2);
      expect.push_back((x + y) % 2 ? 1.0 : 0.0);
    }
  CHECK(binarize(ImageGrid(4, 4, checker), 0.5) == ImageGrid(4, 4, expect));
  CHECK(binarize(ImageGrid::filled(2, 2, 1.0), 1.5) == ImageGrid::filled(2, 2, 0.0));
}

TEST_CASE("erode") {
  const StructuringElement cross(1, ElementShape::cross);
  const auto e = erode(ImageGrid::filled(6, 5, 1.0), cross);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) {
      const bool border = x == 0 || y == 0 || x == 5 || y == 4;
      CHECK(e.at(x, y) == (border ? 0.0 : 1.0));
    }

  std::vector<double> speck(49, 0.0);
  speck[24] = 1.0;
  CHECK(erode(ImageGrid(7, 7, speck), StructuringElement{}) == ImageGrid::filled(7, 7, 0.0));

  const auto sq = square_in(9, 2, 2, 5);
  const auto got = erode(sq, StructuringElement{});
  CHECK(got == oracle::erode(oracle::Bits(sq), 1, false).grid());
  CHECK(got == square_in(9, 3, 3, 3));

  CHECK_THROWS_AS(erode(ImageGrid::filled(3, 3, 0.5), StructuringElement{}), Error);
  CHECK_THROWS_AS(StructuringElement(0, ElementShape::square), Error);
}

TEST_CASE("dilate") {
  CHECK(dilate(ImageGrid::filled(5, 5, 0.0), StructuringElement{}) == ImageGrid::filled(5, 5, 0.0));
  std::vector<double> dot(49, 0.0);
  dot[24] = 1.0;
  CHECK(dilate(ImageGrid(7, 7, dot), StructuringElement{}) == square_in(7, 2, 2, 3));

  std::vector<double> speck(64, 0.0);
  speck[27] = speck[28] = 1.0;
  const ImageGrid two(8, 8, speck);
  CHECK(dilate(erode(two, StructuringElement{}), StructuringElement{}) == ImageGrid::filled(8, 8, 0.0));
}

TEST_CASE("opening") {
  const auto ones = ImageGrid::filled(100, 100, 1.0);
  const StructuringElement se{};
  CHECK(opening(ones, se) == dilate(erode(ones, se), se));
  const oracle::Bits ob(ones);
  CHECK(opening(ones, se) == oracle::dilate(oracle::erode(ob, 1, false), 1, false).grid());

  std::vector<double> line(20 * 20, 0.0);
  for (int x = 2; x < 18; ++x) line[10 * 20 + x] = 1.0;
  CHECK(opening(ImageGrid(20, 20, line), se) == ImageGrid::filled(20, 20, 0.0));
}

TEST_CASE("morphology agrees with the brute-force oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto img = oracle::random_binary(23, 17, 0.55, rng);
    const oracle::Bits b(img);
    for (int r = 1; r <= 2; ++r)
      for (bool cross : {false, true}) {
        const StructuringElement se(r, cross ? ElementShape::cross : ElementShape::square);
        CHECK(erode(img, se) == oracle::erode(b, r, cross).grid());
        CHECK(dilate(img, se) == oracle::dilate(b, r, cross).grid());
      }
  }
}

TEST_CASE("morphology laws") {
  std::mt19937_64 rng(11);
  const StructuringElement se{};
  for (int trial = 0; trial < 25; ++trial) {
    const auto x = oracle::random_binary(32, 32, 0.6, rng);
    const auto noise = oracle::random_binary(32, 32, 0.3, rng);
    std::vector<double> yv(x.size());
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = std::max(x.values()[i], noise.values()[i]);
    const ImageGrid y(32, 32, yv);

    CHECK(dilate(x, se) == complement(erode(complement(x), se, Border::one)));
    const auto open = opening(x, se);
    CHECK(opening(open, se) == open);
    const auto open_y = opening(y, se);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(open.values()[i] <= x.values()[i]);
      CHECK(open.values()[i] <= open_y.values()[i]);
    }
    // With zero padding on both sides the law still holds away from the border.
    const auto d = dilate(x, se);
    const auto dual = complement(erode(complement(x), se));
    for (int yy = 1; yy < 31; ++yy)
      for (int xx = 1; xx < 31; ++xx) CHECK(d.at(xx, yy) == dual.at(xx, yy));
  }
}

TEST_CASE("multiply and complement") {
  const ImageGrid a(2, 1, {0.5, 1.0});
  const ImageGrid b(2, 1, {0.5, 0.0});
  CHECK(multiply(a, b) == ImageGrid(2, 1, {0.25, 0.0}));
  CHECK_THROWS_AS(multiply(a, ImageGrid::filled(1, 1, 0.0)), Error);
  CHECK(complement(ImageGrid(2, 1, {0.0, 1.0})) == ImageGrid(2, 1, {1.0, 0.0}));
  CHECK_THROWS_AS(complement(a), Error);
}
