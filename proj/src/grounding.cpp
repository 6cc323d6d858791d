#include "og/grounding.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "og/errors.hpp"
#include "og/instances.hpp"

namespace og {

Mask2D::Mask2D(int width, int height)
    : Mask2D(width, height,
             std::vector<std::uint8_t>(
                 width > 0 && height > 0 ? std::size_t(width) * std::size_t(height) : 0, 0)) {}

Mask2D::Mask2D(int width, int height, std::vector<std::uint8_t> flags)
    : width_(width), height_(height), flags_(std::move(flags)) {
    if (width < 1 || height < 1) {
        throw ContractViolation("mask must be at least 1x1");
    }
    if (flags_.size() != std::size_t(width) * std::size_t(height)) {
        throw DimensionError("mask flags do not match width*height");
    }
    for (auto& f : flags_) {
        f = f != 0 ? 1 : 0;
    }
}

std::size_t Mask2D::count() const {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

std::size_t Mask2D::index(int col, int row) const {
    if (col < 0 || row < 0 || col >= width_ || row >= height_) {
        throw ContractViolation("mask pixel out of range");
    }
    return std::size_t(row) * std::size_t(width_) + std::size_t(col);
}

BackgroundList::BackgroundList(const SemanticGrid& grid, std::set<ClassId> ids) : ids_(std::move(ids)) {
    for (ClassId id : ids_) {
        if (id >= grid.class_table().size()) {
            throw ContractViolation("background class id outside class table");
        }
    }
}

BackgroundList BackgroundList::from_names(const SemanticGrid& grid,
                                          const std::vector<std::string>& names) {
    std::set<ClassId> ids;
    for (const auto& name : names) {
        const auto id = grid.find_class(name);
        if (!id) {
            throw ContractViolation("unknown background class \"" + name + "\"");
        }
        ids.insert(*id);
    }
    return BackgroundList(grid, std::move(ids));
}

const std::vector<std::string>& default_background_names() {
    static const std::vector<std::string> names{"ceiling", "floor", "wall"};
    return names;
}

std::vector<Index3> candidate_voxels(const Mask2D& mask, const PinholeCamera& cam,
                                     const GridMeta& meta) {
    if (mask.width() != cam.width() || mask.height() != cam.height()) {
        throw DimensionError("mask size does not match the camera image");
    }
    const double range = max_range_from(cam.position(), meta);
    std::vector<std::uint8_t> seen(meta.cell_count(), 0);
    std::vector<Index3> out;
    for (int row = 0; row < mask.height(); ++row) {
        for (int col = 0; col < mask.width(); ++col) {
            if (!mask.at(col, row)) {
                continue;
            }
            const Ray ray = pixel_to_ray(cam, col + 0.5, row + 0.5);
            for (const auto& step : traverse_grid_steps(ray, meta, range)) {
                auto& flag = seen[meta.flatten(step.voxel)];
                if (flag == 0) {
                    flag = 1;
                    out.push_back(step.voxel);
                }
            }
        }
    }
    return out;
}

std::vector<ForegroundVoxel> filter_foreground(std::span<const Index3> candidates,
                                               const SemanticGrid& sem, const AffinityField& affinity,
                                               const BackgroundList& bg) {
    require_same_meta(sem.meta(), affinity.meta(), "filter_foreground");
    std::vector<ForegroundVoxel> out;
    for (const auto& v : candidates) {
        if (!sem.meta().contains(v)) {
            throw ContractViolation("candidate voxel outside the grid");
        }
        const ClassId label = sem.at(v);
        if (bg.contains(label)) {
            continue;
        }
        out.push_back({v, label, v.as_vec() - affinity.at(v).as_vec()});
    }
    return out;
}

namespace {

// Strict ordering used to pick the selected cluster.
bool nearer(const GroundedCluster& a, const GroundedCluster& b, const GridMeta& meta) {
    if (a.depth != b.depth) {
        return a.depth < b.depth;
    }
    if (a.mean_depth != b.mean_depth) {
        return a.mean_depth < b.mean_depth;
    }
    const auto first_linear = [&](const GroundedCluster& c) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (const auto& v : c.voxels) {
            best = std::min(best, meta.flatten(v));
        }
        return best;
    };
    return first_linear(a) < first_linear(b);
}

}  // namespace

GroundingResult ground_mask(const Mask2D& mask, const PinholeCamera& cam, const SemanticGrid& sem,
                            const AffinityField& affinity, const BackgroundList& bg,
                            const ClusterParams& params) {
    params.validate();
    require_same_meta(sem.meta(), affinity.meta(), "ground_mask");
    const GridMeta& meta = sem.meta();

    GroundingResult result;
    const auto candidates = candidate_voxels(mask, cam, meta);
    if (candidates.empty()) {
        result.status = GroundingStatus::no_candidates;
        return result;
    }
    const auto foreground = filter_foreground(candidates, sem, affinity, bg);
    if (foreground.empty()) {
        result.status = GroundingStatus::no_foreground;
        return result;
    }

    std::vector<Vec3> centers;
    centers.reserve(foreground.size());
    for (const auto& f : foreground) {
        centers.push_back(f.center);
    }
    const ClusterLabels labels = dbscan(centers, params);

    struct Accum {
        Vec3 center_sum;
        std::map<ClassId, std::size_t> votes;
        double depth_sum = 0.0;
    };
    std::vector<GroundedCluster> clusters(labels.cluster_count);
    std::vector<Accum> accum(labels.cluster_count);
    for (auto& c : clusters) {
        c.depth = std::numeric_limits<double>::infinity();
    }
    const Vec3 eye = cam.position();
    for (std::size_t n = 0; n < foreground.size(); ++n) {
        const std::int32_t label = labels.labels[n];
        if (label == kNoise) {
            ++result.noise_count;
            continue;
        }
        auto& c = clusters[label - 1];
        auto& a = accum[label - 1];
        const double depth = norm(voxel_to_world(foreground[n].voxel, meta) - eye);
        c.voxels.push_back(foreground[n].voxel);
        c.depth = std::min(c.depth, depth);
        a.center_sum = a.center_sum + foreground[n].center;
        a.depth_sum += depth;
        ++a.votes[foreground[n].class_id];
    }
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        auto& c = clusters[k];
        const double count = static_cast<double>(c.voxels.size());
        c.center = (1.0 / count) * accum[k].center_sum;
        c.mean_depth = accum[k].depth_sum / count;
        std::size_t best_votes = 0;
        for (const auto& [cls, votes] : accum[k].votes) {  // ascending class id
            if (votes > best_votes) {
                best_votes = votes;
                c.class_id = cls;
            }
        }
    }

    result.clusters = std::move(clusters);
    if (result.clusters.empty()) {
        result.status = GroundingStatus::all_noise;
        return result;
    }
    const auto best = std::min_element(
        result.clusters.begin(), result.clusters.end(),
        [&](const GroundedCluster& a, const GroundedCluster& b) { return nearer(a, b, meta); });
    result.selected = *best;
    result.status = GroundingStatus::selected;
    return result;
}

InstanceMap instance_segment(const SemanticGrid& sem, const AffinityField& affinity,
                             const BackgroundList& bg, const ClusterParams& params) {
    params.validate();
    require_same_meta(sem.meta(), affinity.meta(), "instance_segment");
    const GridMeta& meta = sem.meta();
    const std::size_t cells = meta.cell_count();

    std::map<ClassId, std::vector<std::size_t>> by_class;
    for (std::size_t linear = 0; linear < cells; ++linear) {
        const ClassId label = sem.at(linear);
        if (!bg.contains(label)) {
            by_class[label].push_back(linear);
        }
    }

    // Provisional ids unique across classes, renumbered below.
    std::vector<std::uint32_t> provisional(cells, 0);
    std::uint32_t offset = 0;
    std::vector<Index3> positions;
    for (const auto& [cls, members] : by_class) {
        positions.clear();
        for (std::size_t linear : members) {
            positions.push_back(meta.unflatten(linear));
        }
        const auto labels = dbscan(predicted_centers(positions, affinity), params);
        for (std::size_t n = 0; n < members.size(); ++n) {
            if (labels.labels[n] != kNoise) {
                provisional[members[n]] = offset + static_cast<std::uint32_t>(labels.labels[n]);
            }
        }
        offset += static_cast<std::uint32_t>(labels.cluster_count);
    }

    // Final ids follow each instance's smallest linear index.
    std::vector<InstanceId> remap(std::size_t{offset} + 1, 0);
    std::vector<InstanceId> ids(cells, 0);
    InstanceId next = 1;
    for (std::size_t linear = 0; linear < cells; ++linear) {
        const auto p = provisional[linear];
        if (p == 0) {
            continue;
        }
        if (remap[p] == 0) {
            remap[p] = next++;
        }
        ids[linear] = remap[p];
    }
    return make_instance_map(sem, std::move(ids));
}

}  // namespace og
