#pragma once

// Reference implementations used only by tests. Each one follows a different
// code path from the library routine it checks.

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "og/camera.hpp"
#include "og/grid.hpp"
#include "og/types.hpp"

namespace og::oracle {

// Breadth-first flood fill over explicit neighbor offsets. Labels start at 1
// in the order components are first met during a linear scan.
inline std::vector<std::uint32_t> flood_fill(const std::vector<std::uint8_t>& labels, int nx, int ny,
                                             int nz, int connectivity) {
    std::vector<std::array<int, 3>> offsets;
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0) {
                    continue;
                }
                const bool keep = connectivity == 26 || (connectivity == 18 && manhattan <= 2) ||
                                  (connectivity == 6 && manhattan == 1);
                if (keep) {
                    offsets.push_back({dx, dy, dz});
                }
            }
        }
    }
    const auto at = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * ny + j) * nx + i; };
    std::vector<std::uint32_t> comp(labels.size(), 0);
    std::uint32_t next = 1;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const auto start = at(i, j, k);
                if (labels[start] == 0 || comp[start] != 0) {
                    continue;
                }
                const std::uint32_t id = next++;
                comp[start] = id;
                std::deque<std::array<int, 3>> queue{{i, j, k}};
                while (!queue.empty()) {
                    const auto [ci, cj, ck] = queue.front();
                    queue.pop_front();
                    for (const auto& d : offsets) {
                        const int a = ci + d[0];
                        const int b = cj + d[1];
                        const int c = ck + d[2];
                        if (a < 0 || b < 0 || c < 0 || a >= nx || b >= ny || c >= nz) {
                            continue;
                        }
                        const auto n = at(a, b, c);
                        if (comp[n] == 0 && labels[n] == labels[start]) {
                            comp[n] = id;
                            queue.push_back({a, b, c});
                        }
                    }
                }
            }
        }
    }
    return comp;
}

// Textbook O(n^2) DBSCAN: recursive-style expansion with an explicit seed
// list, brute-force neighborhoods. Noise is -1.
inline std::vector<int> reference_dbscan(const std::vector<Vec3>& pts, double eps, std::size_t min_pts) {
    const std::size_t n = pts.size();
    const auto region = [&](std::size_t p) {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < n; ++q) {
            const double dx = pts[p].x - pts[q].x;
            const double dy = pts[p].y - pts[q].y;
            const double dz = pts[p].z - pts[q].z;
            if (dx * dx + dy * dy + dz * dz <= eps * eps) {
                out.push_back(q);
            }
        }
        return out;
    };
    constexpr int kUndefined = 0;
    constexpr int kNoiseLabel = -1;
    std::vector<int> label(n, kUndefined);
    int c = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (label[p] != kUndefined) {
            continue;
        }
        const auto nbrs = region(p);
        if (nbrs.size() < min_pts) {
            label[p] = kNoiseLabel;
            continue;
        }
        ++c;
        label[p] = c;
        std::vector<std::size_t> seeds(nbrs.begin(), nbrs.end());
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const std::size_t q = seeds[s];
            if (label[q] == kNoiseLabel) {
                label[q] = c;
            }
            if (label[q] != kUndefined) {
                continue;
            }
            label[q] = c;
            const auto qn = region(q);
            if (qn.size() >= min_pts) {
                seeds.insert(seeds.end(), qn.begin(), qn.end());
            }
        }
    }
    return label;
}

// Renumbers labels by first appearance so two labelings of the same partition
// compare equal. Values <= 0 (noise / none) are kept as is.
template <typename T>
std::vector<long> canonical(const std::vector<T>& labels) {
    std::map<long, long> remap;
    std::vector<long> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        const long v = static_cast<long>(l);
        if (v <= 0) {
            out.push_back(v);
            continue;
        }
        const auto it = remap.try_emplace(v, static_cast<long>(remap.size()) + 1).first;
        out.push_back(it->second);
    }
    return out;
}

// Rand index between two labelings of the same items (every label value is
// its own group, including 0).
template <typename A, typename B>
double rand_index(const std::vector<A>& a, const std::vector<B>& b) {
    const std::size_t n = a.size();
    if (n < 2) {
        return 1.0;
    }
    std::map<std::pair<long, long>, double> joint;
    std::map<long, double> ca;
    std::map<long, double> cb;
    for (std::size_t i = 0; i < n; ++i) {
        joint[{static_cast<long>(a[i]), static_cast<long>(b[i])}] += 1;
        ca[static_cast<long>(a[i])] += 1;
        cb[static_cast<long>(b[i])] += 1;
    }
    const auto pairs = [](double m) { return m * (m - 1) / 2; };
    double same_both = 0;
    double same_a = 0;
    double same_b = 0;
    for (const auto& [k, m] : joint) {
        same_both += pairs(m);
    }
    for (const auto& [k, m] : ca) {
        same_a += pairs(m);
    }
    for (const auto& [k, m] : cb) {
        same_b += pairs(m);
    }
    const double total = pairs(static_cast<double>(n));
    const double agree = total - same_a - same_b + 2 * same_both;
    return agree / total;
}

// Fine-sampling traversal oracle: samples every voxel_size/100 along the
// segment (plus both endpoints), floors each sample into the grid and drops
// consecutive repeats.
inline std::vector<Index3> sampled_traversal(const Ray& ray, const GridMeta& meta, double max_range) {
    const double s = meta.voxel_size;
    const double h = s / 100.0;
    const auto cell = [&](double t) -> std::optional<Index3> {
        std::array<long, 3> idx{};
        for (int a = 0; a < 3; ++a) {
            const double p = ray.origin[a] + t * ray.dir[a];
            idx[a] = static_cast<long>(std::floor((p - meta.origin[a]) / s));
            if (idx[a] < 0 || idx[a] >= static_cast<long>(meta.dim(a))) {
                return std::nullopt;
            }
        }
        return Index3{static_cast<std::int32_t>(idx[0]), static_cast<std::int32_t>(idx[1]),
                      static_cast<std::int32_t>(idx[2])};
    };
    std::vector<Index3> out;
    const auto steps = static_cast<long>(std::floor(max_range / h));
    for (long n = 0; n <= steps + 1; ++n) {
        const double t = n <= steps ? n * h : max_range;
        const auto c = cell(t);
        if (c && (out.empty() || out.back() != *c)) {
            out.push_back(*c);
        }
    }
    return out;
}

// True when the ray, inside the grid box, passes within `band` of two boundary
// planes of different axes at once (near an edge or corner), or starts or ends
// within `band` of a plane. Such rays may clip a voxel for less than the
// sampling step.
inline bool grazes_boundary(const Ray& ray, const GridMeta& meta, double max_range) {
    const double s = meta.voxel_size;
    const double h = s / 100.0;
    const double band = 2.0 * h;
    const auto local = [&](double t, int a) {
        return (ray.origin[a] + t * ray.dir[a] - meta.origin[a]) / s;
    };
    const auto inside = [&](double t) {
        for (int a = 0; a < 3; ++a) {
            const double p = local(t, a);
            if (p < -band / s || p > meta.dim(a) + band / s) {
                return false;
            }
        }
        return true;
    };
    const auto plane_dist = [&](double t, int a) {
        const double p = local(t, a);
        return std::abs(p - std::round(p)) * s;
    };
    const auto steps = static_cast<long>(std::floor(max_range / h));
    for (long n = 0; n <= steps + 1; ++n) {
        const double t = n <= steps ? n * h : max_range;
        if (!inside(t)) {
            continue;
        }
        int near = 0;
        for (int a = 0; a < 3; ++a) {
            near += plane_dist(t, a) < band ? 1 : 0;
        }
        if (near >= 2) {
            return true;
        }
    }
    for (double t : {0.0, max_range}) {
        if (!inside(t)) {
            continue;
        }
        for (int a = 0; a < 3; ++a) {
            if (plane_dist(t, a) < band) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace og::oracle
