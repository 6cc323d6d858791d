#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "og/scene.hpp"

namespace og {

// Files staged in memory and committed together: every file is written to a
// temp sibling first and only renamed into place once all writes succeeded.
class OutputBatch {
public:
    void add(std::filesystem::path path, std::string bytes);
    void commit();

private:
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

// Scene bundle directory: sem.ogrd, instances.ogrd, camera.json, spec.json,
// view.json and mask_<id>.pgm per instance.
struct SceneBundle {
    SemanticGrid sem;
    InstanceMap instances;
    PinholeCamera camera;
    RenderedView view;
};

void stage_bundle(OutputBatch& batch, const std::filesystem::path& dir, const SceneSpec& spec,
                  const Scene& scene, const RenderedView& view);

// Throws FormatError / std::system_error when a file is missing or malformed.
SceneBundle load_bundle(const std::filesystem::path& dir);

}  // namespace og
