#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace og {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }

// Integer voxel coordinates (i along x, j along y, k along z).
struct Index3 {
    std::int32_t i = 0;
    std::int32_t j = 0;
    std::int32_t k = 0;

    friend constexpr auto operator<=>(const Index3&, const Index3&) = default;

    constexpr Vec3 as_vec() const {
        return {static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
    }
};

// Single-precision 3-vector; the on-disk representation of affinities and centers.
struct Vec3f {
    float x = 0.0F;
    float y = 0.0F;
    float z = 0.0F;

    friend constexpr bool operator==(Vec3f, Vec3f) = default;

    constexpr Vec3 as_vec() const {
        return {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
    }
    static constexpr Vec3f from(Vec3 v) {
        return {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
    }
};

}  // namespace og
