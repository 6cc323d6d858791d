#include "og/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "og/errors.hpp"
#include "og/instances.hpp"

namespace og {

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::int64_t SplitMix64::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw ContractViolation("uniform_int: empty range");
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(next());
    }
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r = next();
    while (r >= limit) {
        r = next();
    }
    return lo + static_cast<std::int64_t>(r % span);
}

double SplitMix64::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return SplitMix64(mixer.next());
}

BackgroundList scene_background(const SemanticGrid& sem) {
    std::vector<std::string> present;
    for (const auto& name : default_background_names()) {
        if (sem.find_class(name)) {
            present.push_back(name);
        }
    }
    return BackgroundList::from_names(sem, present);
}

PinholeCamera overview_camera(const GridMeta& meta, int width, int height) {
    const double s = meta.voxel_size;
    const Vec3 lo = meta.origin_vec();
    const Vec3 extent{s * meta.nx, s * meta.ny, s * meta.nz};
    const Vec3 center = lo + 0.5 * extent;
    // Far enough above the top face that the floor still gets about 7/8 of
    // the top face's pixels per voxel.
    const double above_top = 7.0 * std::max(extent.z, s);
    const Vec3 eye{center.x, center.y, lo.z + extent.z + above_top};
    const double margin = 4.0;
    const double px_per_m = std::min((width - 2.0 * margin) / extent.x,
                                     (height - 2.0 * margin) / extent.y);
    const double f = std::max(px_per_m, 1e-6) * above_top;
    const Pose pose = look_at(eye, {center.x, center.y, lo.z}, {0.0, 1.0, 0.0});
    return PinholeCamera(f, f, width / 2.0, height / 2.0, width, height, pose);
}

InstanceMap scene_instances(const SemanticGrid& sem) {
    const auto bg = scene_background(sem);
    std::vector<ClassId> labels(sem.labels().begin(), sem.labels().end());
    for (auto& l : labels) {
        if (bg.contains(l)) {
            l = kEmptyClass;
        }
    }
    const SemanticGrid objects(sem.meta(), std::move(labels), sem.class_table());
    const auto cc = connected_components(objects, Connectivity::full);
    return make_instance_map(sem, std::vector<InstanceId>(cc.ids().begin(), cc.ids().end()));
}

namespace {

struct Footprint {
    double u_min, u_max, v_min, v_max;
};

std::optional<Footprint> footprint(const Box& box, const PinholeCamera& cam, const GridMeta& meta) {
    const double s = meta.voxel_size;
    const Vec3 lo = meta.origin_vec() + s * box.lo.as_vec();
    const Vec3 hi = meta.origin_vec() + s * (box.hi.as_vec() + Vec3{1.0, 1.0, 1.0});
    Footprint fp{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner{(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y, (c & 4) ? hi.z : lo.z};
        const auto proj = project_point(cam, corner);
        if (!proj) {
            return std::nullopt;
        }
        fp.u_min = std::min(fp.u_min, proj->u);
        fp.u_max = std::max(fp.u_max, proj->u);
        fp.v_min = std::min(fp.v_min, proj->v);
        fp.v_max = std::max(fp.v_max, proj->v);
    }
    return fp;
}

bool footprints_apart(const Footprint& a, const Footprint& b) {
    constexpr double kMarginPx = 1.0;
    return a.u_max + kMarginPx < b.u_min || b.u_max + kMarginPx < a.u_min ||
           a.v_max + kMarginPx < b.v_min || b.v_max + kMarginPx < a.v_min;
}

// At least one empty voxel between the boxes on some axis.
bool boxes_apart(const Box& a, const Box& b) {
    return a.hi.i + 2 <= b.lo.i || b.hi.i + 2 <= a.lo.i || a.hi.j + 2 <= b.lo.j ||
           b.hi.j + 2 <= a.lo.j || a.hi.k + 2 <= b.lo.k || b.hi.k + 2 <= a.lo.k;
}

std::vector<ClassId> shell_labels(const GridMeta& meta, const std::vector<std::string>& table,
                                  bool include_shell) {
    std::vector<ClassId> labels(meta.cell_count(), kEmptyClass);
    if (!include_shell) {
        return labels;
    }
    const auto id_of = [&](std::string_view name) {
        return static_cast<ClassId>(std::find(table.begin(), table.end(), name) - table.begin());
    };
    const ClassId floor = id_of("floor");
    const ClassId wall = id_of("wall");
    for (std::size_t linear = 0; linear < labels.size(); ++linear) {
        const Index3 p = meta.unflatten(linear);
        if (p.k == 0) {
            labels[linear] = floor;
        } else if (static_cast<std::uint32_t>(p.i) == meta.nx - 1 ||
                   static_cast<std::uint32_t>(p.j) == meta.ny - 1) {
            labels[linear] = wall;
        }
    }
    return labels;
}

}  // namespace

Scene make_scene(const GridMeta& meta, const std::vector<Box>& boxes, bool include_room_shell,
                 const PinholeCamera& camera) {
    meta.validate();
    const auto& table = default_class_table();
    auto labels = shell_labels(meta, table, include_room_shell);
    for (const auto& box : boxes) {
        if (!meta.contains(box.lo) || !meta.contains(box.hi) || box.hi.i < box.lo.i ||
            box.hi.j < box.lo.j || box.hi.k < box.lo.k) {
            throw ContractViolation("box outside the grid");
        }
        if (box.class_id == kEmptyClass || box.class_id >= table.size()) {
            throw ContractViolation("box class must be a non-empty class");
        }
        for (auto k = box.lo.k; k <= box.hi.k; ++k) {
            for (auto j = box.lo.j; j <= box.hi.j; ++j) {
                for (auto i = box.lo.i; i <= box.hi.i; ++i) {
                    labels[meta.flatten({i, j, k})] = box.class_id;
                }
            }
        }
    }
    SemanticGrid sem(meta, std::move(labels), table);
    auto instances = scene_instances(sem);
    return Scene{std::move(sem), std::move(instances), camera, boxes};
}

Scene generate_scene(const SceneSpec& spec) {
    const GridMeta& meta = spec.meta;
    meta.validate();
    if (spec.object_count < 0) {
        throw ContractViolation("object_count must be >= 0");
    }
    const auto& table = default_class_table();
    const SemanticGrid probe(meta, table);
    const auto bg = scene_background(probe);

    std::vector<ClassId> pool = spec.class_pool;
    if (pool.empty()) {
        for (std::size_t c = 1; c < table.size(); ++c) {
            if (!bg.contains(static_cast<ClassId>(c))) {
                pool.push_back(static_cast<ClassId>(c));
            }
        }
    }
    for (ClassId c : pool) {
        if (c >= table.size() || bg.contains(c)) {
            throw ContractViolation("class pool must hold non-background classes");
        }
    }

    const int shell = spec.include_room_shell ? 1 : 0;
    const std::array<int, 3> region_lo{0, 0, shell};
    const std::array<int, 3> region_hi{static_cast<int>(meta.nx) - 1 - shell,
                                       static_cast<int>(meta.ny) - 1 - shell,
                                       static_cast<int>(meta.nz) - 1};
    for (int a = 0; a < 3; ++a) {
        if (spec.size_min[a] < 1 || spec.size_max[a] < spec.size_min[a] ||
            spec.size_max[a] > region_hi[a] - region_lo[a] + 1) {
            throw ContractViolation("object size range does not fit the grid");
        }
    }

    const PinholeCamera camera = overview_camera(meta, spec.image_width, spec.image_height);
    const std::uint64_t n = static_cast<std::uint64_t>(spec.object_count);
    const std::uint64_t budget = 10 * n * n;
    std::uint64_t attempts = 0;

    std::vector<Box> boxes;
    std::vector<Footprint> footprints;
    for (std::uint64_t o = 0; o < n; ++o) {
        SplitMix64 rng = SplitMix64::stream(spec.seed, o);
        for (;;) {
            if (attempts == budget) {
                throw PlacementFailure("placement failed: " + std::to_string(boxes.size()) + " of " +
                                       std::to_string(n) + " objects placed after " +
                                       std::to_string(budget) + " attempts");
            }
            ++attempts;
            std::array<int, 3> lo{};
            std::array<int, 3> hi{};
            for (int a = 0; a < 3; ++a) {
                const auto size = static_cast<int>(rng.uniform_int(spec.size_min[a], spec.size_max[a]));
                lo[a] = static_cast<int>(rng.uniform_int(region_lo[a], region_hi[a] - size + 1));
                hi[a] = lo[a] + size - 1;
            }
            const auto cls = pool[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
            const Box box{{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}, cls};
            const auto fp = footprint(box, camera, meta);
            if (!fp) {
                continue;
            }
            bool ok = true;
            for (std::size_t b = 0; ok && b < boxes.size(); ++b) {
                ok = boxes_apart(box, boxes[b]) && footprints_apart(*fp, footprints[b]);
            }
            if (ok) {
                boxes.push_back(box);
                footprints.push_back(*fp);
                break;
            }
        }
    }
    return make_scene(meta, boxes, spec.include_room_shell, camera);
}

RenderedView render_view(const Scene& scene, unsigned threads) {
    const PinholeCamera& cam = scene.camera;
    const GridMeta& meta = scene.sem.meta();
    RenderedView view;
    view.width = cam.width();
    view.height = cam.height();
    const std::size_t pixels = std::size_t(view.width) * std::size_t(view.height);
    view.class_ids.assign(pixels, kEmptyClass);
    view.instance_ids.assign(pixels, 0);
    view.depth.assign(pixels, std::numeric_limits<double>::infinity());
    const double range = max_range_from(cam.position(), meta);

    const auto render_rows = [&](int first, int stride) {
        for (int row = first; row < view.height; row += stride) {
            for (int col = 0; col < view.width; ++col) {
                const Ray ray = pixel_to_ray(cam, col + 0.5, row + 0.5);
                for (const auto& step : traverse_grid_steps(ray, meta, range)) {
                    const ClassId cls = scene.sem.at(step.voxel);
                    if (cls == kEmptyClass) {
                        continue;
                    }
                    const std::size_t px = std::size_t(row) * std::size_t(view.width) + std::size_t(col);
                    view.class_ids[px] = cls;
                    view.instance_ids[px] = scene.gt_instances.at(step.voxel);
                    view.depth[px] = step.entry;
                    break;
                }
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(view.height));
    if (threads <= 1) {
        render_rows(0, 1);
        return view;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back(render_rows, static_cast<int>(t), static_cast<int>(threads));
    }
    workers.clear();
    return view;
}

Mask2D instance_mask(const RenderedView& view, InstanceId id) {
    if (id == 0) {
        throw ContractViolation("instance_mask needs an id >= 1");
    }
    std::vector<std::uint8_t> flags(view.instance_ids.size(), 0);
    for (std::size_t px = 0; px < flags.size(); ++px) {
        flags[px] = view.instance_ids[px] == id ? 1 : 0;
    }
    return Mask2D(view.width, view.height, std::move(flags));
}

}  // namespace og
