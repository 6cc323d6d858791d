#include "og/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "og/errors.hpp"

namespace og {

namespace {

// Uniform bucket index with cell edge eps; a radius query scans the 27 cells
// around the query point.
class BucketIndex {
public:
    BucketIndex(std::span<const Vec3> points, double eps) : points_(points), eps_(eps) {
        for (std::size_t n = 0; n < points.size(); ++n) {
            buckets_[key(cell_of(points[n]))].push_back(n);
        }
    }

    // Neighbor indices within eps (self included), ascending.
    void query(std::size_t n, std::vector<std::size_t>& out) const {
        out.clear();
        const Vec3 p = points_[n];
        const auto c = cell_of(p);
        const double eps_sq = eps_ * eps_;
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dx = -1; dx <= 1; ++dx) {
                    const auto it = buckets_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == buckets_.end()) {
                        continue;
                    }
                    for (std::size_t m : it->second) {
                        const Vec3 d = points_[m] - p;
                        if (dot(d, d) <= eps_sq) {
                            out.push_back(m);
                        }
                    }
                }
            }
        }
        std::sort(out.begin(), out.end());
    }

private:
    using Cell = std::array<std::int64_t, 3>;

    Cell cell_of(Vec3 p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / eps_)),
                static_cast<std::int64_t>(std::floor(p.y / eps_)),
                static_cast<std::int64_t>(std::floor(p.z / eps_))};
    }
    static std::uint64_t key(const Cell& c) {
        // 21 bits per axis; collisions only merge buckets, never lose points.
        const auto mix = [](std::int64_t v) { return static_cast<std::uint64_t>(v) & 0x1FFFFFU; };
        return mix(c[0]) | (mix(c[1]) << 21) | (mix(c[2]) << 42);
    }

    std::span<const Vec3> points_;
    double eps_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace

void ClusterParams::validate() const {
    if (!(std::isfinite(eps) && eps > 0.0)) {
        throw ContractViolation("eps must be positive and finite");
    }
    if (min_pts < 1) {
        throw ContractViolation("min_pts must be >= 1");
    }
}

std::vector<Vec3> predicted_centers(std::span<const Index3> positions, const AffinityField& affinity) {
    std::vector<Vec3> out;
    out.reserve(positions.size());
    for (const auto& p : positions) {
        if (!affinity.meta().contains(p)) {
            throw ContractViolation("predicted_centers: position outside the affinity grid");
        }
        out.push_back(p.as_vec() - affinity.at(p).as_vec());
    }
    return out;
}

ClusterLabels dbscan(std::span<const Vec3> points, const ClusterParams& params) {
    params.validate();
    constexpr std::int32_t kUnvisited = 0;
    ClusterLabels result;
    result.labels.assign(points.size(), kUnvisited);
    if (points.empty()) {
        return result;
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw ContractViolation("dbscan: non-finite point");
        }
    }

    const BucketIndex index(points, params.eps);
    std::vector<std::size_t> neighbors;
    std::vector<std::size_t> frontier;
    auto& labels = result.labels;

    for (std::size_t n = 0; n < points.size(); ++n) {
        if (labels[n] != kUnvisited) {
            continue;
        }
        index.query(n, neighbors);
        if (neighbors.size() < params.min_pts) {
            labels[n] = kNoise;
            continue;
        }
        const std::int32_t cluster = ++result.cluster_count;
        labels[n] = cluster;
        frontier.clear();
        const auto claim = [&](const std::vector<std::size_t>& near) {
            for (std::size_t m : near) {
                if (labels[m] == kUnvisited) {
                    labels[m] = cluster;
                    frontier.push_back(m);
                } else if (labels[m] == kNoise) {
                    labels[m] = cluster;  // border point, already known non-core
                }
            }
        };
        claim(neighbors);
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            index.query(frontier[f], neighbors);
            if (neighbors.size() >= params.min_pts) {
                claim(neighbors);
            }
        }
    }
    return result;
}

}  // namespace og
