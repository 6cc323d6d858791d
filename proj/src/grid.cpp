#include "og/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "og/errors.hpp"

namespace og {

namespace {

// Upper bound on cells per grid; keeps every linear index inside int32-safe
// arithmetic for the per-axis coordinates and bounds allocations.
constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 31;

void check_length(std::size_t got, const GridMeta& meta, const char* what) {
    if (got != meta.cell_count()) {
        throw DimensionError(std::string(what) + ": payload has " + std::to_string(got) +
                             " cells, grid needs " + std::to_string(meta.cell_count()));
    }
}

}  // namespace

void GridMeta::validate() const {
    if (nx == 0 || ny == 0 || nz == 0) {
        throw ContractViolation("grid dims must be >= 1");
    }
    if (!std::isfinite(voxel_size) || voxel_size <= 0.0F) {
        throw ContractViolation("voxel_size must be positive and finite");
    }
    for (float c : origin) {
        if (!std::isfinite(c)) {
            throw ContractViolation("grid origin must be finite");
        }
    }
    const std::uint64_t cells = std::uint64_t{nx} * ny * nz;
    if (nx > kMaxCells || ny > kMaxCells || nz > kMaxCells || cells > kMaxCells) {
        throw SizeError("grid of " + std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                        std::to_string(nz) + " exceeds the cell limit");
    }
}

double GridMeta::diagonal() const {
    const double s = voxel_size;
    return s * std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
}

std::optional<Index3> world_to_voxel(Vec3 p, const GridMeta& meta) {
    std::array<std::int32_t, 3> idx{};
    for (int a = 0; a < 3; ++a) {
        const double f = std::floor((p[a] - double(meta.origin[a])) / double(meta.voxel_size));
        if (!(f >= 0.0) || f >= double(meta.dim(a))) {
            return std::nullopt;
        }
        idx[a] = static_cast<std::int32_t>(f);
    }
    return Index3{idx[0], idx[1], idx[2]};
}

Vec3 voxel_to_world(Index3 idx, const GridMeta& meta) {
    if (!meta.contains(idx)) {
        throw ContractViolation("voxel index out of range");
    }
    const double s = meta.voxel_size;
    return meta.origin_vec() + s * (idx.as_vec() + Vec3{0.5, 0.5, 0.5});
}

const std::vector<std::string>& default_class_table() {
    static const std::vector<std::string> table{
        "empty", "ceiling", "floor", "wall", "window", "chair", "bed",
        "sofa",  "table",   "tvs",   "furniture", "objects", "lamp"};
    return table;
}

SemanticGrid::SemanticGrid(GridMeta meta, std::vector<ClassId> labels,
                           std::vector<std::string> class_table)
    : meta_(meta), labels_(std::move(labels)), class_table_(std::move(class_table)) {
    meta_.validate();
    check_length(labels_.size(), meta_, "semantic grid");
    if (class_table_.empty() || class_table_.front() != "empty") {
        throw ContractViolation("class table must start with \"empty\"");
    }
    if (class_table_.size() > 256) {
        throw ContractViolation("class table exceeds 256 entries");
    }
    std::set<std::string_view> seen;
    for (const auto& name : class_table_) {
        if (!seen.insert(name).second) {
            throw ContractViolation("duplicate class name \"" + name + "\"");
        }
    }
    for (ClassId label : labels_) {
        if (label >= class_table_.size()) {
            throw ContractViolation("label " + std::to_string(label) + " outside class table");
        }
    }
}

SemanticGrid::SemanticGrid(GridMeta meta, std::vector<std::string> class_table)
    : SemanticGrid(meta, std::vector<ClassId>((meta.validate(), meta.cell_count()), kEmptyClass),
                   std::move(class_table)) {}

std::optional<ClassId> SemanticGrid::find_class(std::string_view name) const {
    const auto it = std::find(class_table_.begin(), class_table_.end(), name);
    if (it == class_table_.end()) {
        return std::nullopt;
    }
    return static_cast<ClassId>(it - class_table_.begin());
}

AffinityField::AffinityField(GridMeta meta, std::vector<Vec3f> values)
    : meta_(meta), values_(std::move(values)) {
    meta_.validate();
    check_length(values_.size(), meta_, "affinity field");
    for (const auto& v : values_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw ContractViolation("affinity field contains a non-finite component");
        }
    }
}

AffinityField::AffinityField(GridMeta meta)
    : AffinityField(meta, std::vector<Vec3f>((meta.validate(), meta.cell_count()))) {}

LossMask::LossMask(GridMeta meta, std::vector<std::uint8_t> flags)
    : meta_(meta), flags_(std::move(flags)) {
    meta_.validate();
    check_length(flags_.size(), meta_, "loss mask");
    for (auto& f : flags_) {
        f = f != 0 ? 1 : 0;
    }
}

InstanceMap::InstanceMap(GridMeta meta, std::vector<InstanceId> ids,
                         std::vector<InstanceRecord> instances)
    : meta_(meta), ids_(std::move(ids)), instances_(std::move(instances)) {
    meta_.validate();
    check_length(ids_.size(), meta_, "instance map");

    const std::size_t n = instances_.size();
    for (std::size_t r = 0; r < n; ++r) {
        if (instances_[r].id != r + 1) {
            throw ContractViolation("instance records must carry ids 1..N in order");
        }
    }
    std::vector<std::uint32_t> counts(n, 0);
    std::vector<Vec3> sums(n);
    for (std::size_t linear = 0; linear < ids_.size(); ++linear) {
        const InstanceId id = ids_[linear];
        if (id == 0) {
            continue;
        }
        if (id > n) {
            throw ContractViolation("voxel carries instance id " + std::to_string(id) +
                                    " with no record");
        }
        ++counts[id - 1];
        sums[id - 1] = sums[id - 1] + meta_.unflatten(linear).as_vec();
    }
    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = instances_[r];
        if (rec.voxel_count == 0 || rec.voxel_count != counts[r]) {
            throw ContractViolation("instance " + std::to_string(rec.id) +
                                    " voxel_count does not match its cells");
        }
        const Vec3 mean = (1.0 / counts[r]) * sums[r];
        const Vec3 c = rec.center.as_vec();
        for (int a = 0; a < 3; ++a) {
            const double tol = std::max(1e-5, 4.0 * std::numeric_limits<float>::epsilon() *
                                                  std::abs(mean[a]));
            if (std::abs(c[a] - mean[a]) > tol) {
                throw ContractViolation("instance " + std::to_string(rec.id) +
                                        " center is not the mean of its voxels");
            }
        }
    }
}

std::vector<std::vector<Index3>> InstanceMap::members() const {
    std::vector<std::vector<Index3>> out(instances_.size());
    for (std::size_t r = 0; r < instances_.size(); ++r) {
        out[r].reserve(instances_[r].voxel_count);
    }
    for (std::size_t linear = 0; linear < ids_.size(); ++linear) {
        if (ids_[linear] != 0) {
            out[ids_[linear] - 1].push_back(meta_.unflatten(linear));
        }
    }
    return out;
}

void require_same_meta(const GridMeta& a, const GridMeta& b, const char* what) {
    if (!(a == b)) {
        throw DimensionError(std::string(what) + ": grid metadata mismatch");
    }
}

}  // namespace og
