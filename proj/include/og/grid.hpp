#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "og/types.hpp"

namespace og {

// Placement of a dense grid of uniform cubic voxels in world space (meters).
struct GridMeta {
    std::uint32_t nx = 1;
    std::uint32_t ny = 1;
    std::uint32_t nz = 1;
    float voxel_size = 1.0F;
    std::array<float, 3> origin{0.0F, 0.0F, 0.0F};

    friend bool operator==(const GridMeta&, const GridMeta&) = default;

    // Throws ContractViolation on zero dims or non-finite/non-positive placement,
    // SizeError when the cell count does not fit in memory addressing.
    void validate() const;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::uint32_t dim(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
    bool contains(Index3 idx) const {
        return idx.i >= 0 && idx.j >= 0 && idx.k >= 0 && static_cast<std::uint32_t>(idx.i) < nx &&
               static_cast<std::uint32_t>(idx.j) < ny && static_cast<std::uint32_t>(idx.k) < nz;
    }
    // (k*ny + j)*nx + i
    std::size_t flatten(Index3 idx) const {
        return (static_cast<std::size_t>(idx.k) * ny + static_cast<std::size_t>(idx.j)) * nx +
               static_cast<std::size_t>(idx.i);
    }
    Index3 unflatten(std::size_t linear) const {
        const auto i = static_cast<std::int32_t>(linear % nx);
        const auto rest = linear / nx;
        return {i, static_cast<std::int32_t>(rest % ny), static_cast<std::int32_t>(rest / ny)};
    }
    Vec3 origin_vec() const { return {origin[0], origin[1], origin[2]}; }
    // Euclidean length of the box diagonal in meters.
    double diagonal() const;
};

// Cell containing p, floor semantics; absent outside [0, dim) on any axis.
std::optional<Index3> world_to_voxel(Vec3 p, const GridMeta& meta);

// Center of voxel idx. Throws ContractViolation when idx is out of range.
Vec3 voxel_to_world(Index3 idx, const GridMeta& meta);

using ClassId = std::uint8_t;
inline constexpr ClassId kEmptyClass = 0;

// Default synthetic class table: "empty" plus 12 indoor classes.
const std::vector<std::string>& default_class_table();

class SemanticGrid {
public:
    SemanticGrid(GridMeta meta, std::vector<ClassId> labels, std::vector<std::string> class_table);
    // All-empty grid with the given class table.
    SemanticGrid(GridMeta meta, std::vector<std::string> class_table);

    const GridMeta& meta() const { return meta_; }
    std::span<const ClassId> labels() const { return labels_; }
    const std::vector<std::string>& class_table() const { return class_table_; }

    ClassId at(Index3 idx) const { return labels_[meta_.flatten(idx)]; }
    ClassId at(std::size_t linear) const { return labels_[linear]; }
    // Index of name in the class table, or absent.
    std::optional<ClassId> find_class(std::string_view name) const;

    friend bool operator==(const SemanticGrid&, const SemanticGrid&) = default;

private:
    GridMeta meta_;
    std::vector<ClassId> labels_;
    std::vector<std::string> class_table_;
};

class AffinityField {
public:
    AffinityField(GridMeta meta, std::vector<Vec3f> values);
    explicit AffinityField(GridMeta meta);  // all zero

    const GridMeta& meta() const { return meta_; }
    std::span<const Vec3f> values() const { return values_; }
    Vec3f at(Index3 idx) const { return values_[meta_.flatten(idx)]; }

    friend bool operator==(const AffinityField&, const AffinityField&) = default;

private:
    GridMeta meta_;
    std::vector<Vec3f> values_;
};

class LossMask {
public:
    // One byte per voxel, nonzero = masked in.
    LossMask(GridMeta meta, std::vector<std::uint8_t> flags);

    const GridMeta& meta() const { return meta_; }
    std::span<const std::uint8_t> flags() const { return flags_; }
    bool at(std::size_t linear) const { return flags_[linear] != 0; }

    friend bool operator==(const LossMask&, const LossMask&) = default;

private:
    GridMeta meta_;
    std::vector<std::uint8_t> flags_;
};

using InstanceId = std::uint32_t;

struct InstanceRecord {
    InstanceId id = 0;
    ClassId class_id = 0;
    Vec3f center;  // continuous voxel-index units
    std::uint32_t voxel_count = 0;

    friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

// Per-voxel instance ids plus one record per instance. The constructor checks
// that ids are contiguous 1..N, counts match and each instance is single-class.
class InstanceMap {
public:
    InstanceMap(GridMeta meta, std::vector<InstanceId> ids, std::vector<InstanceRecord> instances);

    const GridMeta& meta() const { return meta_; }
    std::span<const InstanceId> ids() const { return ids_; }
    const std::vector<InstanceRecord>& instances() const { return instances_; }
    InstanceId at(Index3 idx) const { return ids_[meta_.flatten(idx)]; }
    const InstanceRecord& record(InstanceId id) const { return instances_.at(id - 1); }

    // Member voxels of every instance, indexed by id - 1, in linear order.
    std::vector<std::vector<Index3>> members() const;

    friend bool operator==(const InstanceMap&, const InstanceMap&) = default;

private:
    GridMeta meta_;
    std::vector<InstanceId> ids_;
    std::vector<InstanceRecord> instances_;
};

void require_same_meta(const GridMeta& a, const GridMeta& b, const char* what);

}  // namespace og
