#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "care/crop.hpp"
#include "care/fitting.hpp"
#include "care/geometry.hpp"
#include "care/keypoints.hpp"
#include "care/synth.hpp"

// JSON wire formats. All writers emit keys in a fixed order and doubles with
// round-trip precision, so equal values give byte-identical documents.
namespace care::io {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// {"pairs":[{"src":[u,v],"tgt":[x,y]}, ...]}
std::string correspondences_to_json(const CorrespondenceSet& set);
CorrespondenceSet correspondences_from_json(std::string_view text);

// {"type":"homography","h":[[...],[...],[...]]}
// {"type":"polynomial","degree":n,"a":{"ij":v,...},"b":{...},"offset":[dx,dy]}
// Homography offsets are folded into h. Polynomial keys concatenate the
// powers of u and v, so serialisable degrees are 1..9.
std::string transform_to_json(const fitting::Transform& t);
fitting::Transform transform_from_json(std::string_view text);

// {"macula":[x_min,y_min,x_max,y_max],"optic_disc":[...]}
struct RoiPair {
  crop::RoiBox macula;
  crop::RoiBox optic_disc;
};
std::string rois_to_json(const RoiPair& rois);
RoiPair rois_from_json(std::string_view text);

// {"keypoints":[{"x":..,"y":..,"kind":"bifurcation","strength":3}, ...]}
std::string keypoints_to_json(const std::vector<keypoints::Keypoint>& kps);

std::string synth_config_to_json(const synth::SynthConfig& cfg);
synth::SynthConfig synth_config_from_json(std::string_view text);

}  // namespace care::io
