#include "care/error.hpp"
#include "care/serialization.hpp"
#include "care/synth.hpp"
#include "doctest.h"

using namespace care;
using namespace care::io;
using care::fitting::Homography;
using care::fitting::Polynomial2D;
using care::fitting::Transform;

TEST_CASE("correspondences round trip") {
  CorrespondenceSet s{{{{1.5, 2.25}, {3.0, 4.0}}, {{0.1, 0.2}, {1e-17, 12345.678901234567}}}};
  CHECK(correspondences_from_json(correspondences_to_json(s)) == s);
  CHECK(correspondences_from_json(R"({"pairs":[]})").empty());
  CHECK_THROWS_AS(correspondences_from_json("{"), Error);
  CHECK_THROWS_AS(correspondences_from_json(R"({"pairs":[{"src":[1],"tgt":[1,2]}]})"), Error);
}

TEST_CASE("transform round trip") {
  const Transform h{Homography{{1.1, 0.02, 5, -0.01, 0.97, 3, 1e-6, 2e-6, 1}}, {0, 0}};
  const auto back = transform_from_json(transform_to_json(h));
  REQUIRE(back.is_homography());
  CHECK(std::get<Homography>(back.model) == std::get<Homography>(h.model));

  Polynomial2D p = Polynomial2D::identity(3);
  p.set_a(0, 0, 4.5);
  p.set_b(2, 1, -3e-7);
  const Transform t{p, {250, 125}};
  const auto text = transform_to_json(t);
  CHECK(text.find("\"21\"") != std::string::npos);
  const auto bp = transform_from_json(text);
  REQUIRE(bp.is_polynomial());
  CHECK(std::get<Polynomial2D>(bp.model) == p);
  CHECK(bp.offset == Point2{250, 125});

  CHECK_THROWS_AS(transform_from_json(R"({"type":"spline"})"), Error);
  CHECK_THROWS_AS(transform_from_json(R"({"type":"homography","h":[[1,0],[0,1]]})"), Error);
}

TEST_CASE("ROI and synth config round trip") {
  const RoiPair r{{crop::RoiLabel::macula, 1, 2, 3, 4}, {crop::RoiLabel::optic_disc, 5, 6, 7, 8}};
  const auto back = rois_from_json(rois_to_json(r));
  CHECK(back.macula.x_min == 1);
  CHECK(back.optic_disc.y_max == 8);
  CHECK(back.optic_disc.label == crop::RoiLabel::optic_disc);
  CHECK_THROWS_AS(rois_from_json(R"({"macula":[1,2,3,4]})"), Error);

  synth::SynthConfig cfg;
  cfg.seed = 77;
  cfg.transform_kind = synth::TransformKind::homography;
  cfg.noise_sigma = 1.25;
  cfg.source_fov = 0.4;
  const auto c = synth_config_from_json(synth_config_to_json(cfg));
  CHECK(c.seed == 77);
  CHECK(c.transform_kind == synth::TransformKind::homography);
  CHECK(c.noise_sigma == 1.25);
  CHECK(c.source_fov == 0.4);
}
