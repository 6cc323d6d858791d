#pragma once

#include <array>
#include <optional>
#include <vector>

#include "og/grid.hpp"
#include "og/types.hpp"

namespace og {

// Row-major 3x3 rotation.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Mat3 kIdentity3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

Vec3 operator*(const Mat3& m, Vec3 v);
Mat3 transpose(const Mat3& m);

// Camera-to-world rigid transform: world = rotation * cam + translation.
struct Pose {
    Mat3 rotation = kIdentity3;
    Vec3 translation;

    friend bool operator==(const Pose&, const Pose&) = default;
};

// Pinhole camera, +z forward, +x right, +y down. Pixel (u, v) is continuous;
// the center of integer pixel (c, r) sits at (c + 0.5, r + 0.5).
class PinholeCamera {
public:
    PinholeCamera(double fx, double fy, double cx, double cy, int width, int height, Pose pose);

    double fx() const { return fx_; }
    double fy() const { return fy_; }
    double cx() const { return cx_; }
    double cy() const { return cy_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const Pose& pose() const { return pose_; }
    Vec3 position() const { return pose_.translation; }

    friend bool operator==(const PinholeCamera&, const PinholeCamera&) = default;

private:
    double fx_;
    double fy_;
    double cx_;
    double cy_;
    int width_;
    int height_;
    Pose pose_;
};

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit length
};

struct Projection {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

// Throws ContractViolation when (u, v) lies outside [0,width) x [0,height).
Ray pixel_to_ray(const PinholeCamera& cam, double u, double v);

// Absent when p is behind the camera (z <= 1e-9) or projects out of frame.
std::optional<Projection> project_point(const PinholeCamera& cam, Vec3 p);

// Camera at eye looking at target; world up chooses the image's -y direction.
Pose look_at(Vec3 eye, Vec3 target, Vec3 up);

// Voxel hit by a ray together with the ray distance at which it is entered.
struct TraversalStep {
    Index3 voxel;
    double entry = 0.0;
};

// Voxels cut with positive length (> 1e-9) by the segment
// [origin, origin + max_range * dir], nearest first, each once.
std::vector<TraversalStep> traverse_grid_steps(const Ray& ray, const GridMeta& meta,
                                               double max_range);
std::vector<Index3> traverse_grid(const Ray& ray, const GridMeta& meta, double max_range);

// Distance from p to the farthest corner of the grid box; a range that
// reaches every voxel from p.
double max_range_from(Vec3 p, const GridMeta& meta);

}  // namespace og
