#include "og/instances.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "og/errors.hpp"

namespace og {

namespace {

// Offsets that precede a voxel in linear order, filtered by stencil. Visiting
// only these during the scan joins every neighbor pair exactly once.
std::vector<std::array<int, 3>> backward_offsets(Connectivity conn) {
    const int max_nonzero = conn == Connectivity::faces ? 1 : (conn == Connectivity::edges ? 2 : 3);
    std::vector<std::array<int, 3>> out;
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
                if (nonzero == 0 || nonzero > max_nonzero) {
                    continue;
                }
                // strictly smaller linear index: (dz, dy, dx) lexicographically negative
                if (dz < 0 || (dz == 0 && (dy < 0 || (dy == 0 && dx < 0)))) {
                    out.push_back({dx, dy, dz});
                }
            }
        }
    }
    return out;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // Keeps the smaller index as root so roots are each set's minimum.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (b < a) {
            std::swap(a, b);
        }
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<Connectivity> connectivity_from_int(int value) {
    switch (value) {
        case 6:
            return Connectivity::faces;
        case 18:
            return Connectivity::edges;
        case 26:
            return Connectivity::full;
        default:
            return std::nullopt;
    }
}

InstanceMap connected_components(const SemanticGrid& grid, Connectivity conn) {
    const GridMeta& meta = grid.meta();
    const std::size_t cells = meta.cell_count();
    const auto offsets = backward_offsets(conn);
    DisjointSets sets(cells);

    for (std::size_t linear = 0; linear < cells; ++linear) {
        const ClassId label = grid.at(linear);
        if (label == kEmptyClass) {
            continue;
        }
        const Index3 p = meta.unflatten(linear);
        for (const auto& d : offsets) {
            const Index3 q{p.i + d[0], p.j + d[1], p.k + d[2]};
            if (meta.contains(q) && grid.at(q) == label) {
                sets.unite(linear, meta.flatten(q));
            }
        }
    }

    // Roots are set minima, so the scan meets each root before its members.
    std::vector<InstanceId> ids(cells, 0);
    InstanceId next = 1;
    for (std::size_t linear = 0; linear < cells; ++linear) {
        if (grid.at(linear) == kEmptyClass) {
            continue;
        }
        const std::size_t root = sets.find(linear);
        ids[linear] = root == linear ? next++ : ids[root];
    }
    return make_instance_map(grid, std::move(ids));
}

Vec3 instance_center(std::span<const Index3> members) {
    if (members.empty()) {
        throw ContractViolation("instance_center of an empty member list");
    }
    Vec3 sum;
    for (const auto& m : members) {
        sum = sum + m.as_vec();
    }
    return (1.0 / static_cast<double>(members.size())) * sum;
}

InstanceMap make_instance_map(const SemanticGrid& grid, std::vector<InstanceId> ids) {
    const GridMeta& meta = grid.meta();
    if (ids.size() != meta.cell_count()) {
        throw DimensionError("instance ids do not match the grid");
    }
    InstanceId max_id = 0;
    for (InstanceId id : ids) {
        max_id = std::max(max_id, id);
    }
    std::vector<std::vector<Index3>> members(max_id);
    std::vector<ClassId> classes(max_id, kEmptyClass);
    for (std::size_t linear = 0; linear < ids.size(); ++linear) {
        const InstanceId id = ids[linear];
        if (id == 0) {
            continue;
        }
        const ClassId label = grid.at(linear);
        if (label == kEmptyClass) {
            throw ContractViolation("instance id on an empty voxel");
        }
        if (members[id - 1].empty()) {
            classes[id - 1] = label;
        } else if (classes[id - 1] != label) {
            throw ContractViolation("instance " + std::to_string(id) + " mixes classes");
        }
        members[id - 1].push_back(meta.unflatten(linear));
    }
    std::vector<InstanceRecord> records;
    records.reserve(max_id);
    for (InstanceId r = 0; r < max_id; ++r) {
        if (members[r].empty()) {
            throw ContractViolation("instance ids are not contiguous");
        }
        records.push_back({r + 1, classes[r], Vec3f::from(instance_center(members[r])),
                           static_cast<std::uint32_t>(members[r].size())});
    }
    return InstanceMap(meta, std::move(ids), std::move(records));
}

std::pair<AffinityField, LossMask> affinity_gt(const InstanceMap& instances) {
    const GridMeta& meta = instances.meta();
    const auto members = instances.members();
    std::vector<Vec3f> values(meta.cell_count());
    std::vector<std::uint8_t> flags(meta.cell_count(), 0);
    for (const auto& group : members) {
        const Vec3 center = instance_center(group);
        // Error-diffused rounding to float: each stored value stays within
        // half an ulp of the largest member offset of its exact value, and the
        // member sum stays within half an ulp of zero.
        for (int axis = 0; axis < 3; ++axis) {
            float Vec3f::*field = axis == 0 ? &Vec3f::x : (axis == 1 ? &Vec3f::y : &Vec3f::z);
            double carry = 0.0;
            for (const auto& p : group) {
                const double target = p.as_vec()[axis] - center[axis] + carry;
                const float stored = static_cast<float>(target);
                carry = target - static_cast<double>(stored);
                values[meta.flatten(p)].*field = stored;
            }
        }
        for (const auto& p : group) {
            flags[meta.flatten(p)] = 1;
        }
    }
    return {AffinityField(meta, std::move(values)), LossMask(meta, std::move(flags))};
}

AffinityEval masked_mse(const AffinityField& pred, const AffinityField& gt, const LossMask& mask) {
    require_same_meta(pred.meta(), gt.meta(), "masked_mse pred/gt");
    require_same_meta(pred.meta(), mask.meta(), "masked_mse pred/mask");
    const auto p = pred.values();
    const auto g = gt.values();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t linear = 0; linear < p.size(); ++linear) {
        if (!mask.at(linear)) {
            continue;
        }
        const Vec3 d = p[linear].as_vec() - g[linear].as_vec();
        sum += dot(d, d);
        ++count;
    }
    AffinityEval eval;
    eval.masked_voxel_count = count;
    eval.mse = count == 0 ? 0.0 : sum / (3.0 * static_cast<double>(count));
    return eval;
}

double total_loss(double l_ori, double l_aff, double lambda) {
    if (!std::isfinite(l_ori) || !std::isfinite(l_aff) || !std::isfinite(lambda) || lambda < 0.0) {
        throw ContractViolation("total_loss needs finite inputs and lambda >= 0");
    }
    return l_ori + lambda * l_aff;
}

}  // namespace og
