#include "doctest.h"

#include <cmath>
#include <random>

#include "og/camera.hpp"
#include "og/errors.hpp"
#include "og/scene.hpp"
#include "oracles.hpp"

using namespace og;

namespace {

PinholeCamera unit_camera(Vec3 t = {}) {
    Pose pose;
    pose.translation = t;
    return PinholeCamera(1.0, 1.0, 0.0, 0.0, 2, 2, pose);
}

const GridMeta kMeta4{4, 4, 4, 1.0F, {0.0F, 0.0F, 0.0F}};

Vec3 random_unit(std::mt19937& rng) {
    std::normal_distribution<double> g;
    return normalized({g(rng), g(rng), g(rng)});
}

bool face_neighbors(Index3 a, Index3 b) {
    return std::abs(a.i - b.i) + std::abs(a.j - b.j) + std::abs(a.k - b.k) == 1;
}

}  // namespace

TEST_CASE("pixel_to_ray") {
    const auto ray = pixel_to_ray(unit_camera(), 0.0, 0.0);
    CHECK(ray.origin == Vec3{0, 0, 0});
    CHECK(ray.dir == Vec3{0, 0, 1});

    const auto side = pixel_to_ray(unit_camera(), 1.0, 0.0);
    CHECK(side.dir.x == doctest::Approx(std::sqrt(0.5)));
    CHECK(side.dir.y == doctest::Approx(0.0));
    CHECK(side.dir.z == doctest::Approx(std::sqrt(0.5)));

    const auto moved = pixel_to_ray(unit_camera({0, 0, -2}), 0.0, 0.0);
    CHECK(moved.origin == Vec3{0, 0, -2});
    CHECK(moved.dir == Vec3{0, 0, 1});

    CHECK_THROWS_AS(pixel_to_ray(unit_camera(), 2.0, 0.0), ContractViolation);
    CHECK_THROWS_AS(pixel_to_ray(unit_camera(), 0.0, -0.1), ContractViolation);
}

TEST_CASE("project_point") {
    const PinholeCamera cam(1.0, 1.0, 0.0, 0.0, 4, 4, Pose{});
    const auto p = project_point(cam, {0, 0, 5});
    REQUIRE(p.has_value());
    CHECK(p->u == 0.0);
    CHECK(p->v == 0.0);
    CHECK(p->depth == 5.0);
    CHECK_FALSE(project_point(cam, {0, 0, -1}).has_value());
    CHECK_FALSE(project_point(cam, {-1, 0, 5}).has_value());  // left of the frame
}

TEST_CASE("camera validation") {
    Pose skew;
    skew.rotation = {{{1, 0.1, 0}, {0, 1, 0}, {0, 0, 1}}};
    CHECK_THROWS_AS(PinholeCamera(1, 1, 0, 0, 1, 1, skew), ContractViolation);
    Pose mirror;
    mirror.rotation = {{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    CHECK_THROWS_AS(PinholeCamera(1, 1, 0, 0, 1, 1, mirror), ContractViolation);
    CHECK_THROWS_AS(PinholeCamera(0, 1, 0, 0, 1, 1, Pose{}), ContractViolation);
    CHECK_THROWS_AS(PinholeCamera(1, 1, 0, 0, 0, 1, Pose{}), ContractViolation);
}

TEST_CASE("pixel_to_ray and project_point are inverse") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 eye{uni(rng) * 4 - 2, uni(rng) * 4 - 2, uni(rng) * 4 - 2};
        const Pose pose = look_at(eye, eye + random_unit(rng), random_unit(rng));
        const PinholeCamera cam(50 + 400 * uni(rng), 50 + 400 * uni(rng), 80 * uni(rng), 60 * uni(rng),
                                160, 120, pose);
        const double u = uni(rng) * 160;
        const double v = uni(rng) * 120;
        const auto ray = pixel_to_ray(cam, u, v);
        CHECK(norm(ray.dir) == doctest::Approx(1.0).epsilon(1e-12));
        const double s = 0.1 + 20 * uni(rng);
        const auto back = project_point(cam, ray.origin + s * ray.dir);
        REQUIRE(back.has_value());
        CHECK(std::abs(back->u - u) < 1e-6);
        CHECK(std::abs(back->v - v) < 1e-6);
    }
}

TEST_CASE("look_at keeps +y down") {
    const Pose pose = look_at({0, 0, 10}, {0, 0, 0}, {0, 1, 0});
    const PinholeCamera cam(100, 100, 50, 50, 100, 100, pose);
    const auto up_in_world = project_point(cam, {0, 1, 0});
    REQUIRE(up_in_world.has_value());
    CHECK(up_in_world->v < 50.0);  // world +y appears toward the top of the image
    const auto right = project_point(cam, {1, 0, 0});
    REQUIRE(right.has_value());
    CHECK(right->u > 50.0);
}

TEST_CASE("traverse_grid examples") {
    const Ray axis{{-1, 0.5, 0.5}, {1, 0, 0}};
    CHECK(traverse_grid(axis, kMeta4, 10.0) ==
          std::vector<Index3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});

    const Ray outside{{-1, 5.5, 0.5}, {1, 0, 0}};
    CHECK(traverse_grid(outside, kMeta4, 10.0).empty());

    // range cut: origin inside, stops partway
    const Ray inside{{0.5, 0.5, 0.5}, {1, 0, 0}};
    CHECK(traverse_grid(inside, kMeta4, 1.2) == std::vector<Index3>{{0, 0, 0}, {1, 0, 0}});

    // negative direction enters through the max face
    const Ray back{{5, 2.5, 3.5}, {-1, 0, 0}};
    CHECK(traverse_grid(back, kMeta4, 10.0) ==
          std::vector<Index3>{{3, 2, 3}, {2, 2, 3}, {1, 2, 3}, {0, 2, 3}});

    // ray pointing away from the grid
    const Ray away{{-1, 0.5, 0.5}, {-1, 0, 0}};
    CHECK(traverse_grid(away, kMeta4, 10.0).empty());

    CHECK_THROWS_AS(traverse_grid(axis, kMeta4, 0.0), ContractViolation);
}

TEST_CASE("traversal entry distances") {
    const Ray axis{{-1, 0.5, 0.5}, {1, 0, 0}};
    const auto steps = traverse_grid_steps(axis, kMeta4, 10.0);
    REQUIRE(steps.size() == 4);
    for (std::size_t n = 0; n < steps.size(); ++n) {
        CHECK(steps[n].entry == doctest::Approx(1.0 + n));
    }
}

TEST_CASE("traversal matches the sampling oracle on random rays") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int checked = 0;
    while (checked < 300) {
        const GridMeta meta{static_cast<std::uint32_t>(1 + rng() % 8), static_cast<std::uint32_t>(1 + rng() % 8),
                            static_cast<std::uint32_t>(1 + rng() % 8), static_cast<float>(0.2 + uni(rng)),
                            {static_cast<float>(uni(rng) - 0.5), static_cast<float>(uni(rng) - 0.5),
                             static_cast<float>(uni(rng) - 0.5)}};
        const Vec3 origin{uni(rng) * 14 - 4, uni(rng) * 14 - 4, uni(rng) * 14 - 4};
        const Ray ray{origin, random_unit(rng)};
        const double range = 0.5 + uni(rng) * 15;
        if (oracle::grazes_boundary(ray, meta, range)) {
            continue;
        }
        const auto got = traverse_grid(ray, meta, range);
        REQUIRE(got == oracle::sampled_traversal(ray, meta, range));
        for (std::size_t n = 1; n < got.size(); ++n) {
            REQUIRE(face_neighbors(got[n - 1], got[n]));
        }
        const auto steps = traverse_grid_steps(ray, meta, range);
        for (std::size_t n = 1; n < steps.size(); ++n) {
            REQUIRE(steps[n].entry > steps[n - 1].entry);
        }
        ++checked;
    }
}

TEST_CASE("traversed voxel centers project near the generating pixel") {
    const GridMeta meta{64, 64, 32, 0.08F, {0.0F, 0.0F, 0.0F}};
    const auto cam = overview_camera(meta, 160, 120);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uu(0.0, 160.0);
    std::uniform_real_distribution<double> vv(0.0, 120.0);
    const double f = std::max(cam.fx(), cam.fy());
    for (int trial = 0; trial < 300; ++trial) {
        const double u = uu(rng);
        const double v = vv(rng);
        const auto ray = pixel_to_ray(cam, u, v);
        for (const auto& idx : traverse_grid(ray, meta, max_range_from(ray.origin, meta))) {
            const auto proj = project_point(cam, voxel_to_world(idx, meta));
            if (!proj) {
                continue;  // center just outside the frame
            }
            const double bound = 0.71 * meta.voxel_size * f / proj->depth + 0.5;
            REQUIRE(std::hypot(proj->u - u, proj->v - v) <= bound);
        }
    }
}

TEST_CASE("max_range_from reaches the far corner") {
    CHECK(max_range_from({-1, 0, 0}, kMeta4) == doctest::Approx(std::sqrt(25.0 + 16 + 16)));
    CHECK(max_range_from({2, 2, 2}, kMeta4) == doctest::Approx(std::sqrt(12.0)));
}
