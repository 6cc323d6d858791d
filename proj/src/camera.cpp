#include "og/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "og/errors.hpp"

namespace og {

Vec3 operator*(const Mat3& m, Vec3 v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Mat3 transpose(const Mat3& m) {
    Mat3 t{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            t[r][c] = m[c][r];
        }
    }
    return t;
}

PinholeCamera::PinholeCamera(double fx, double fy, double cx, double cy, int width, int height,
                             Pose pose)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height), pose_(pose) {
    if (!(std::isfinite(fx) && fx > 0.0) || !(std::isfinite(fy) && fy > 0.0)) {
        throw ContractViolation("focal lengths must be positive and finite");
    }
    if (!std::isfinite(cx) || !std::isfinite(cy)) {
        throw ContractViolation("principal point must be finite");
    }
    if (width < 1 || height < 1) {
        throw ContractViolation("image size must be at least 1x1");
    }
    const Mat3& r = pose.rotation;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            double rtr = 0.0;
            for (int k = 0; k < 3; ++k) {
                rtr += r[k][a] * r[k][b];
            }
            if (std::abs(rtr - (a == b ? 1.0 : 0.0)) > 1e-6) {
                throw ContractViolation("camera rotation is not orthonormal");
            }
        }
    }
    const Vec3 c0{r[0][0], r[1][0], r[2][0]};
    const Vec3 c1{r[0][1], r[1][1], r[2][1]};
    const Vec3 c2{r[0][2], r[1][2], r[2][2]};
    if (dot(cross(c0, c1), c2) < 0.0) {
        throw ContractViolation("camera rotation has determinant -1");
    }
    const Vec3 t = pose.translation;
    if (!std::isfinite(t.x) || !std::isfinite(t.y) || !std::isfinite(t.z)) {
        throw ContractViolation("camera translation must be finite");
    }
}

Ray pixel_to_ray(const PinholeCamera& cam, double u, double v) {
    if (!(u >= 0.0 && u < cam.width() && v >= 0.0 && v < cam.height())) {
        throw ContractViolation("pixel outside the image");
    }
    const Vec3 d_cam = normalized({(u - cam.cx()) / cam.fx(), (v - cam.cy()) / cam.fy(), 1.0});
    return {cam.position(), normalized(cam.pose().rotation * d_cam)};
}

std::optional<Projection> project_point(const PinholeCamera& cam, Vec3 p) {
    const Vec3 pc = transpose(cam.pose().rotation) * (p - cam.position());
    if (pc.z <= 1e-9) {
        return std::nullopt;
    }
    const double u = cam.fx() * pc.x / pc.z + cam.cx();
    const double v = cam.fy() * pc.y / pc.z + cam.cy();
    if (!(u >= 0.0 && u < cam.width() && v >= 0.0 && v < cam.height())) {
        return std::nullopt;
    }
    return Projection{u, v, pc.z};
}

Pose look_at(Vec3 eye, Vec3 target, Vec3 up) {
    const Vec3 z = normalized(target - eye);
    const Vec3 side = cross(z, up);
    if (norm(side) < 1e-12) {
        throw ContractViolation("look_at: up vector parallel to viewing direction");
    }
    const Vec3 x = normalized(side);
    const Vec3 y = cross(z, x);
    Pose pose;
    pose.rotation = {{{x.x, y.x, z.x}, {x.y, y.y, z.y}, {x.z, y.z, z.z}}};
    pose.translation = eye;
    return pose;
}

std::vector<TraversalStep> traverse_grid_steps(const Ray& ray, const GridMeta& meta,
                                               double max_range) {
    if (!(max_range > 0.0)) {
        throw ContractViolation("traverse_grid: max_range must be positive");
    }
    if (std::abs(norm(ray.dir) - 1.0) > 1e-6) {
        throw ContractViolation("traverse_grid: ray direction must be unit length");
    }
    constexpr double kTol = 1e-9;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double size = meta.voxel_size;
    const Vec3 lo = meta.origin_vec();

    // Clip the segment against the grid box.
    double t_enter = 0.0;
    double t_exit = max_range;
    for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.dir[a];
        const double box_lo = lo[a];
        const double box_hi = lo[a] + size * meta.dim(a);
        if (d == 0.0) {
            if (o < box_lo || o >= box_hi) {
                return {};
            }
            continue;
        }
        double ta = (box_lo - o) / d;
        double tb = (box_hi - o) / d;
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t_enter = std::max(t_enter, ta);
        t_exit = std::min(t_exit, tb);
    }
    if (t_exit - t_enter <= kTol) {
        return {};
    }

    std::array<std::int64_t, 3> idx{};
    std::array<int, 3> step{};
    std::array<double, 3> t_next{};
    const auto boundary_t = [&](int a, std::int64_t plane) {
        return (lo[a] + size * static_cast<double>(plane) - ray.origin[a]) / ray.dir[a];
    };
    for (int a = 0; a < 3; ++a) {
        const double p = ray.origin[a] + t_enter * ray.dir[a];
        const auto n = static_cast<std::int64_t>(meta.dim(a));
        idx[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((p - lo[a]) / size)),
                                          0, n - 1);
        if (ray.dir[a] > 0.0) {
            step[a] = 1;
            t_next[a] = boundary_t(a, idx[a] + 1);
        } else if (ray.dir[a] < 0.0) {
            step[a] = -1;
            t_next[a] = boundary_t(a, idx[a]);
        } else {
            step[a] = 0;
            t_next[a] = kInf;
        }
    }

    std::vector<TraversalStep> out;
    double t_cur = t_enter;
    const std::size_t max_steps = std::size_t{meta.nx} + meta.ny + meta.nz + 3;
    for (std::size_t guard = 0; guard <= max_steps; ++guard) {
        int axis = 0;
        if (t_next[1] < t_next[axis]) {
            axis = 1;
        }
        if (t_next[2] < t_next[axis]) {
            axis = 2;
        }
        const double leave = std::min(t_next[axis], t_exit);
        if (leave - t_cur > kTol) {
            out.push_back({Index3{static_cast<std::int32_t>(idx[0]), static_cast<std::int32_t>(idx[1]),
                                  static_cast<std::int32_t>(idx[2])},
                           t_cur});
        }
        if (t_next[axis] >= t_exit) {
            break;
        }
        t_cur = std::max(t_cur, t_next[axis]);
        idx[axis] += step[axis];
        if (idx[axis] < 0 || idx[axis] >= static_cast<std::int64_t>(meta.dim(axis))) {
            break;
        }
        t_next[axis] = boundary_t(axis, step[axis] > 0 ? idx[axis] + 1 : idx[axis]);
    }
    return out;
}

std::vector<Index3> traverse_grid(const Ray& ray, const GridMeta& meta, double max_range) {
    const auto steps = traverse_grid_steps(ray, meta, max_range);
    std::vector<Index3> out;
    out.reserve(steps.size());
    for (const auto& s : steps) {
        out.push_back(s.voxel);
    }
    return out;
}

double max_range_from(Vec3 p, const GridMeta& meta) {
    const Vec3 lo = meta.origin_vec();
    double sq = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double hi = lo[a] + double(meta.voxel_size) * meta.dim(a);
        const double far = std::max(std::abs(p[a] - lo[a]), std::abs(p[a] - hi));
        sq += far * far;
    }
    return std::sqrt(sq);
}

}  // namespace og
