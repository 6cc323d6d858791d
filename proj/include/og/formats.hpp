#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "og/camera.hpp"
#include "og/clustering.hpp"
#include "og/grounding.hpp"
#include "og/instances.hpp"
#include "og/scene.hpp"

namespace og {

// Camera file: {fx, fy, cx, cy, width, height, cam_to_world: 16 numbers row-major}.
nlohmann::ordered_json camera_to_json(const PinholeCamera& cam);
PinholeCamera camera_from_json(const nlohmann::ordered_json& j);  // throws FormatError
PinholeCamera load_camera(const std::filesystem::path& path);
void save_camera(const PinholeCamera& cam, const std::filesystem::path& path);

// Grounding result file. Cluster classes are written by name.
nlohmann::ordered_json grounding_to_json(const GroundingResult& result, const SemanticGrid& sem,
                                 const ClusterParams& params);

// {width, height, class[], instance[], depth[]}; misses carry depth null.
nlohmann::ordered_json view_to_json(const RenderedView& view);
RenderedView view_from_json(const nlohmann::ordered_json& j);  // throws FormatError

nlohmann::ordered_json spec_to_json(const SceneSpec& spec);

nlohmann::ordered_json eval_to_json(const AffinityEval& eval);

// Binary PGM (P5, maxval 255). Any nonzero sample reads as set; set pixels
// are written as 255.
std::string encode_pgm(const Mask2D& mask);
Mask2D decode_pgm(std::string_view bytes);  // throws FormatError
Mask2D load_pgm(const std::filesystem::path& path);
void save_pgm(const Mask2D& mask, const std::filesystem::path& path);

// Serialized form used for every JSON artifact: two-space indent plus a
// trailing newline.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace og
