#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "og/grid.hpp"
#include "og/types.hpp"

namespace og {

struct ClusterParams {
    double eps = 1.5;          // voxel-index units
    std::size_t min_pts = 4;   // neighborhood size, self included

    void validate() const;
};

inline constexpr std::int32_t kNoise = -1;

// Label per input point: cluster id 1..K or kNoise.
struct ClusterLabels {
    std::vector<std::int32_t> labels;
    std::int32_t cluster_count = 0;
};

// positions[i] - affinity(positions[i]). Throws ContractViolation for
// positions outside the affinity grid.
std::vector<Vec3> predicted_centers(std::span<const Index3> positions, const AffinityField& affinity);

// DBSCAN with Euclidean distance <= eps. Points are visited in input order and
// clusters numbered in discovery order; a border point reachable from several
// clusters stays with the first one that claims it.
ClusterLabels dbscan(std::span<const Vec3> points, const ClusterParams& params);

}  // namespace og
