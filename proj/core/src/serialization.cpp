#include "care/serialization.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "care/error.hpp"
#include "json.hpp"

namespace care::io {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string(what) + ": " + e.what());
  }
}

Point2 point_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::format, std::string(what) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

crop::RoiBox box_from(const json& j, crop::RoiLabel label, const char* what) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::format, std::string(what) + ": expected [x_min,y_min,x_max,y_max]");
  }
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorKind::format, std::string(what) + ": non-numeric entry");
  }
  return {label, j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string monomial_key(int i, int j) { return std::to_string(i) + std::to_string(j); }

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

std::string correspondences_to_json(const CorrespondenceSet& set) {
  json pairs = json::array();
  for (const auto& c : set.pairs) {
    pairs.push_back({{"src", {c.src.x, c.src.y}}, {"tgt", {c.tgt.x, c.tgt.y}}});
  }
  return json{{"pairs", pairs}}.dump(2);
}

CorrespondenceSet correspondences_from_json(std::string_view text) {
  const json j = parse(text, "correspondences");
  if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array()) {
    throw Error(ErrorKind::format, "correspondences: missing \"pairs\" array");
  }
  CorrespondenceSet out;
  for (const auto& p : j["pairs"]) {
    if (!p.is_object() || !p.contains("src") || !p.contains("tgt")) {
      throw Error(ErrorKind::format, "correspondences: pair needs src and tgt");
    }
    out.pairs.push_back({point_from(p["src"], "src"), point_from(p["tgt"], "tgt")});
  }
  return out;
}

std::string transform_to_json(const fitting::Transform& t) {
  json j;
  if (t.is_homography()) {
    const auto h = std::get<fitting::Homography>(fitting::with_offset(t, {0.0, 0.0}).model);
    j["type"] = "homography";
    j["h"] = {{h(0, 0), h(0, 1), h(0, 2)}, {h(1, 0), h(1, 1), h(1, 2)}, {h(2, 0), h(2, 1), h(2, 2)}};
  } else {
    const auto& p = std::get<fitting::Polynomial2D>(t.model);
    if (p.degree() > 9) throw Error(ErrorKind::argument, "polynomial degree > 9 is not serialisable");
    j["type"] = "polynomial";
    j["degree"] = p.degree();
    json a = json::object(), b = json::object();
    for (int k = 0; k <= p.degree(); ++k) {
      for (int jj = 0; jj <= k; ++jj) {
        a[monomial_key(k - jj, jj)] = p.a(k - jj, jj);
        b[monomial_key(k - jj, jj)] = p.b(k - jj, jj);
      }
    }
    j["a"] = a;
    j["b"] = b;
    j["offset"] = {t.offset.x, t.offset.y};
  }
  return j.dump(2);
}

fitting::Transform transform_from_json(std::string_view text) {
  const json j = parse(text, "transform");
  const std::string type = field_or<std::string>(j, "type", "");
  if (type == "homography") {
    const json& h = j.at("h");
    if (!h.is_array() || h.size() != 3) throw Error(ErrorKind::format, "homography: h must be 3x3");
    fitting::Homography out;
    for (int r = 0; r < 3; ++r) {
      if (!h[r].is_array() || h[r].size() != 3) {
        throw Error(ErrorKind::format, "homography: h must be 3x3");
      }
      for (int c = 0; c < 3; ++c) out.h[3 * r + c] = h[r][c].get<double>();
    }
    return fitting::Transform{out.normalized(), {0.0, 0.0}};
  }
  if (type == "polynomial") {
    const int degree = field_or<int>(j, "degree", 0);
    if (degree < 1 || degree > 9) throw Error(ErrorKind::format, "polynomial: degree must be 1..9");
    fitting::Polynomial2D p(degree);
    for (const char* axis : {"a", "b"}) {
      if (!j.contains(axis) || !j[axis].is_object()) {
        throw Error(ErrorKind::format, std::string("polynomial: missing coefficient map ") + axis);
      }
      for (const auto& [key, value] : j[axis].items()) {
        if (key.size() != 2 || !std::isdigit(static_cast<unsigned char>(key[0])) ||
            !std::isdigit(static_cast<unsigned char>(key[1])) || !value.is_number()) {
          throw Error(ErrorKind::format, "polynomial: bad coefficient entry '" + key + "'");
        }
        const int i = key[0] - '0';
        const int jj = key[1] - '0';
        if (i + jj > degree) throw Error(ErrorKind::format, "polynomial: term exceeds degree");
        if (axis[0] == 'a') {
          p.set_a(i, jj, value.get<double>());
        } else {
          p.set_b(i, jj, value.get<double>());
        }
      }
    }
    Point2 offset{0.0, 0.0};
    if (j.contains("offset") && !j["offset"].is_null()) offset = point_from(j["offset"], "offset");
    return fitting::Transform{p, offset};
  }
  throw Error(ErrorKind::format, "transform: unknown type '" + type + "'");
}

std::string rois_to_json(const RoiPair& rois) {
  auto arr = [](const crop::RoiBox& b) { return json{b.x_min, b.y_min, b.x_max, b.y_max}; };
  return json{{"macula", arr(rois.macula)}, {"optic_disc", arr(rois.optic_disc)}}.dump(2);
}

RoiPair rois_from_json(std::string_view text) {
  const json j = parse(text, "rois");
  if (!j.is_object() || !j.contains("macula") || !j.contains("optic_disc")) {
    throw Error(ErrorKind::format, "rois: need \"macula\" and \"optic_disc\"");
  }
  return {box_from(j["macula"], crop::RoiLabel::macula, "macula"),
          box_from(j["optic_disc"], crop::RoiLabel::optic_disc, "optic_disc")};
}

std::string keypoints_to_json(const std::vector<keypoints::Keypoint>& kps) {
  json arr = json::array();
  for (const auto& k : kps) {
    arr.push_back({{"x", k.x},
                   {"y", k.y},
                   {"kind", k.kind == keypoints::JunctionKind::crossover ? "crossover" : "bifurcation"},
                   {"strength", k.strength}});
  }
  return json{{"keypoints", arr}}.dump(2);
}

std::string synth_config_to_json(const synth::SynthConfig& cfg) {
  json j{{"seed", cfg.seed},
         {"image_size", cfg.image_size},
         {"transform_kind",
          cfg.transform_kind == synth::TransformKind::homography ? "homography" : "quadratic"},
         {"coefficient_scale", cfg.coefficient_scale},
         {"noise_sigma", cfg.noise_sigma},
         {"outlier_fraction", cfg.outlier_fraction},
         {"n_points", cfg.n_points},
         {"max_rotation_deg", cfg.max_rotation_deg},
         {"min_scale", cfg.min_scale},
         {"max_scale", cfg.max_scale},
         {"max_translation_fraction", cfg.max_translation_fraction},
         {"projective_strength", cfg.projective_strength},
         {"source_fov", cfg.source_fov},
         {"gt_grid", cfg.gt_grid}};
  return j.dump(2);
}

synth::SynthConfig synth_config_from_json(std::string_view text) {
  const json j = parse(text, "synth config");
  if (!j.is_object()) throw Error(ErrorKind::format, "synth config must be an object");
  synth::SynthConfig c;
  c.seed = field_or<std::uint64_t>(j, "seed", c.seed);
  c.image_size = field_or<int>(j, "image_size", c.image_size);
  const std::string kind = field_or<std::string>(j, "transform_kind", "quadratic");
  if (kind == "homography") {
    c.transform_kind = synth::TransformKind::homography;
  } else if (kind == "quadratic") {
    c.transform_kind = synth::TransformKind::quadratic;
  } else {
    throw Error(ErrorKind::format, "synth config: unknown transform_kind '" + kind + "'");
  }
  c.coefficient_scale = field_or<double>(j, "coefficient_scale", c.coefficient_scale);
  c.noise_sigma = field_or<double>(j, "noise_sigma", c.noise_sigma);
  c.outlier_fraction = field_or<double>(j, "outlier_fraction", c.outlier_fraction);
  c.n_points = field_or<int>(j, "n_points", c.n_points);
  c.max_rotation_deg = field_or<double>(j, "max_rotation_deg", c.max_rotation_deg);
  c.min_scale = field_or<double>(j, "min_scale", c.min_scale);
  c.max_scale = field_or<double>(j, "max_scale", c.max_scale);
  c.max_translation_fraction =
      field_or<double>(j, "max_translation_fraction", c.max_translation_fraction);
  c.projective_strength = field_or<double>(j, "projective_strength", c.projective_strength);
  c.source_fov = field_or<double>(j, "source_fov", c.source_fov);
  c.gt_grid = field_or<int>(j, "gt_grid", c.gt_grid);
  c.validate();
  return c;
}

}  // namespace care::io
