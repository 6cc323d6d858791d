#include "og/bundle.hpp"

#include <system_error>

#include "og/errors.hpp"
#include "og/formats.hpp"
#include "og/grid_io.hpp"

namespace og {

void OutputBatch::add(std::filesystem::path path, std::string bytes) {
    files_.emplace_back(std::move(path), std::move(bytes));
}

void OutputBatch::commit() {
    std::vector<std::filesystem::path> staged;
    const auto discard = [&] {
        std::error_code ignored;
        for (const auto& tmp : staged) {
            std::filesystem::remove(tmp, ignored);
        }
    };
    try {
        for (const auto& [path, bytes] : files_) {
            auto tmp = path;
            tmp += ".partial";
            staged.push_back(tmp);
            write_file_atomic(tmp, bytes);
        }
        for (std::size_t n = 0; n < files_.size(); ++n) {
            std::filesystem::rename(staged[n], files_[n].first);
        }
    } catch (...) {
        discard();
        throw;
    }
    files_.clear();
}

void stage_bundle(OutputBatch& batch, const std::filesystem::path& dir, const SceneSpec& spec,
                  const Scene& scene, const RenderedView& view) {
    batch.add(dir / "sem.ogrd", encode(scene.sem));
    batch.add(dir / "instances.ogrd", encode(scene.gt_instances));
    batch.add(dir / "camera.json", dump(camera_to_json(scene.camera)));
    batch.add(dir / "spec.json", dump(spec_to_json(spec)));
    batch.add(dir / "view.json", dump(view_to_json(view)));
    for (const auto& rec : scene.gt_instances.instances()) {
        batch.add(dir / ("mask_" + std::to_string(rec.id) + ".pgm"),
                  encode_pgm(instance_mask(view, rec.id)));
    }
}

SceneBundle load_bundle(const std::filesystem::path& dir) {
    auto sem = load_grid(dir / "sem.ogrd");
    auto instances = load_instances(dir / "instances.ogrd");
    require_same_meta(sem.meta(), instances.meta(), "scene bundle");
    auto camera = load_camera(dir / "camera.json");
    const std::string view_text = read_file(dir / "view.json");
    nlohmann::ordered_json view_json;
    try {
        view_json = nlohmann::ordered_json::parse(view_text);
    } catch (const nlohmann::ordered_json::exception& e) {
        throw FormatError(std::string("view.json: ") + e.what());
    }
    auto view = view_from_json(view_json);
    if (view.width != camera.width() || view.height != camera.height()) {
        throw FormatError("view.json size does not match camera.json");
    }
    return SceneBundle{std::move(sem), std::move(instances), std::move(camera), std::move(view)};
}

}  // namespace og
