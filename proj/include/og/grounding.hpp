#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "og/camera.hpp"
#include "og/clustering.hpp"
#include "og/grid.hpp"

namespace og {

// Row-major per-pixel flags for a 2D instance mask.
class Mask2D {
public:
    Mask2D(int width, int height);
    Mask2D(int width, int height, std::vector<std::uint8_t> flags);

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int col, int row) const { return flags_[index(col, row)] != 0; }
    void set(int col, int row, bool value = true) { flags_[index(col, row)] = value ? 1 : 0; }
    std::span<const std::uint8_t> flags() const { return flags_; }
    std::size_t count() const;

    friend bool operator==(const Mask2D&, const Mask2D&) = default;

private:
    std::size_t index(int col, int row) const;

    int width_;
    int height_;
    std::vector<std::uint8_t> flags_;
};

// Classes never eligible for grounding. Empty (id 0) is always background.
class BackgroundList {
public:
    BackgroundList() = default;
    BackgroundList(const SemanticGrid& grid, std::set<ClassId> ids);

    // Resolves names against the grid's class table; unknown names throw
    // ContractViolation.
    static BackgroundList from_names(const SemanticGrid& grid, const std::vector<std::string>& names);

    bool contains(ClassId id) const { return id == kEmptyClass || ids_.contains(id); }
    const std::set<ClassId>& ids() const { return ids_; }

private:
    std::set<ClassId> ids_;
};

// "ceiling", "floor", "wall"
const std::vector<std::string>& default_background_names();

struct ForegroundVoxel {
    Index3 voxel;
    ClassId class_id = 0;
    Vec3 center;  // predicted instance center, voxel-index units
};

struct GroundedCluster {
    std::vector<Index3> voxels;
    Vec3 center;        // mean predicted center of the members
    ClassId class_id = 0;
    double depth = 0.0;       // nearest member voxel center to the camera, meters
    double mean_depth = 0.0;  // tie-break only
};

enum class GroundingStatus {
    selected,       // a cluster was chosen
    no_candidates,  // the mask rays never touch the grid
    no_foreground,  // every candidate is empty or background
    all_noise,      // foreground exists but DBSCAN found no cluster
};

struct GroundingResult {
    std::optional<GroundedCluster> selected;
    std::vector<GroundedCluster> clusters;
    std::size_t noise_count = 0;
    GroundingStatus status = GroundingStatus::no_candidates;
};

// Union of scan-line voxels over all set pixels (rays through pixel centers),
// first-encounter order: pixels row-major, each scan line near to far.
std::vector<Index3> candidate_voxels(const Mask2D& mask, const PinholeCamera& cam,
                                     const GridMeta& meta);

// Keeps non-empty, non-background candidates in order and attaches their
// predicted centers.
std::vector<ForegroundVoxel> filter_foreground(std::span<const Index3> candidates,
                                               const SemanticGrid& sem, const AffinityField& affinity,
                                               const BackgroundList& bg);

// Mask to 3D instance: candidates, foreground filter, DBSCAN on predicted
// centers, then the cluster nearest the camera.
GroundingResult ground_mask(const Mask2D& mask, const PinholeCamera& cam, const SemanticGrid& sem,
                            const AffinityField& affinity, const BackgroundList& bg,
                            const ClusterParams& params);

// Clusters every non-background voxel of the grid on its predicted center.
// Clustering runs per class so every instance is single-class; noise gets id 0.
InstanceMap instance_segment(const SemanticGrid& sem, const AffinityField& affinity,
                             const BackgroundList& bg, const ClusterParams& params);

}  // namespace og
