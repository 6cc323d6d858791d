#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "og/grid.hpp"

namespace og {

// Neighbor stencil for voxel connectivity: faces, faces+edges, or all 26.
enum class Connectivity : int {
    faces = 6,
    edges = 18,
    full = 26,
};

// Parses 6/18/26; absent for anything else.
std::optional<Connectivity> connectivity_from_int(int value);

// Per-class connected components. Ids are assigned 1..N in order of each
// component's smallest linear index.
InstanceMap connected_components(const SemanticGrid& grid, Connectivity conn = Connectivity::full);

// Arithmetic mean of the member indices. Throws ContractViolation when empty.
Vec3 instance_center(std::span<const Index3> members);

// Builds an InstanceMap from per-voxel ids already numbered 1..N; classes are
// taken from the grid and centers recomputed from member positions.
InstanceMap make_instance_map(const SemanticGrid& grid, std::vector<InstanceId> ids);

// Ground-truth affinity (position minus instance center, zero on empty voxels)
// and the loss mask selecting non-empty voxels.
std::pair<AffinityField, LossMask> affinity_gt(const InstanceMap& instances);

struct AffinityEval {
    double mse = 0.0;
    std::size_t masked_voxel_count = 0;
    std::optional<double> total_loss;
};

// Squared error over masked voxels divided by 3 * masked count (0 when nothing
// is masked). Throws DimensionError when the metas differ.
AffinityEval masked_mse(const AffinityField& pred, const AffinityField& gt, const LossMask& mask);

inline constexpr double kDefaultLambda = 1.0;

// l_ori + lambda * l_aff
double total_loss(double l_ori, double l_aff, double lambda = kDefaultLambda);

}  // namespace og
