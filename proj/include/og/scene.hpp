#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "og/camera.hpp"
#include "og/grid.hpp"
#include "og/grounding.hpp"

namespace og {

// SplitMix64. Fixed algorithm so scenes reproduce across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    // Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Uniform double in [0, 1).
    double uniform01();

    // Independent stream derived from (seed, index).
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t state_;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    GridMeta meta{64, 64, 32, 0.08F, {0.0F, 0.0F, 0.0F}};
    int object_count = 4;
    std::vector<ClassId> class_pool;  // empty: every non-background class
    std::array<int, 3> size_min{3, 3, 3};
    std::array<int, 3> size_max{8, 8, 8};
    bool include_room_shell = true;
    int image_width = 160;
    int image_height = 120;
};

// Inclusive voxel box.
struct Box {
    Index3 lo;
    Index3 hi;
    ClassId class_id = 0;
};

struct Scene {
    SemanticGrid sem;
    InstanceMap gt_instances;
    PinholeCamera camera;
    std::vector<Box> boxes;  // placed objects, placement order
};

struct RenderedView {
    int width = 0;
    int height = 0;
    std::vector<ClassId> class_ids;        // row-major
    std::vector<InstanceId> instance_ids;  // 0 = none
    std::vector<double> depth;             // meters, +inf on miss

    friend bool operator==(const RenderedView&, const RenderedView&) = default;
};

BackgroundList scene_background(const SemanticGrid& sem);

// Top-down camera above the grid looking at its center, with a focal length
// that keeps the whole grid in frame.
PinholeCamera overview_camera(const GridMeta& meta, int width, int height);

// connected_components(sem, 26) over non-background classes only.
InstanceMap scene_instances(const SemanticGrid& sem);

// Places spec.object_count boxes by rejection sampling: boxes never touch
// (26-connectivity) and their projected footprints never overlap, so every
// object is fully visible. Throws PlacementFailure after 10 * n^2 attempts.
Scene generate_scene(const SceneSpec& spec);

// Scene from explicit boxes (no visibility or spacing checks).
Scene make_scene(const GridMeta& meta, const std::vector<Box>& boxes, bool include_room_shell,
                 const PinholeCamera& camera);

// First non-empty voxel along each pixel-center ray. threads = 0 picks the
// hardware concurrency; the output does not depend on it.
RenderedView render_view(const Scene& scene, unsigned threads = 0);

Mask2D instance_mask(const RenderedView& view, InstanceId id);

}  // namespace og
