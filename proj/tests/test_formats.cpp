#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "og/bundle.hpp"
#include "og/errors.hpp"
#include "og/formats.hpp"
#include "og/grid_io.hpp"
#include "support.hpp"

using namespace og;
using og::testing::TempDir;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

PinholeCamera sample_camera() {
    return PinholeCamera(123.456, 120.5, 80.0, 60.0, 160, 120,
                         look_at({1.1, -2.3, 4.7}, {0.3, 0.9, 0.1}, {0.0, 0.0, 1.0}));
}

}  // namespace

TEST_CASE("camera JSON layout and round trip") {
    const PinholeCamera cam = sample_camera();
    const json j = camera_to_json(cam);
    std::vector<std::string> keys;
    for (const auto& [key, value] : j.items()) {
        keys.push_back(key);
    }
    CHECK(keys == std::vector<std::string>{"fx", "fy", "cx", "cy", "width", "height", "cam_to_world"});
    const auto m = j.at("cam_to_world").get<std::vector<double>>();
    REQUIRE(m.size() == 16);
    CHECK(m[3] == cam.pose().translation.x);
    CHECK(m[7] == cam.pose().translation.y);
    CHECK(m[11] == cam.pose().translation.z);
    CHECK(std::vector<double>(m.begin() + 12, m.end()) == std::vector<double>{0, 0, 0, 1});

    CHECK(camera_from_json(json::parse(dump(j))) == cam);

    TempDir dir{"og_formats"};
    save_camera(cam, dir.path / "cam.json");
    CHECK(load_camera(dir.path / "cam.json") == cam);
}

TEST_CASE("malformed camera files are format errors") {
    json j = camera_to_json(sample_camera());
    json bottom = j;
    bottom["cam_to_world"][15] = 2.0;
    CHECK_THROWS_AS(camera_from_json(bottom), FormatError);
    json short_matrix = j;
    short_matrix["cam_to_world"].erase(0);
    CHECK_THROWS_AS(camera_from_json(short_matrix), FormatError);
    json missing = j;
    missing.erase("fx");
    CHECK_THROWS_AS(camera_from_json(missing), FormatError);
    json skewed = j;
    skewed["cam_to_world"][0] = 2.0;
    CHECK_THROWS_AS(camera_from_json(skewed), FormatError);
    json negative = j;
    negative["fy"] = -1.0;
    CHECK_THROWS_AS(camera_from_json(negative), FormatError);

    TempDir dir{"og_formats"};
    std::ofstream(dir.path / "bad.json") << "{not json";
    CHECK_THROWS_AS(load_camera(dir.path / "bad.json"), FormatError);
}

TEST_CASE("PGM encoding") {
    Mask2D mask(3, 2);
    mask.set(0, 0);
    mask.set(2, 1);
    const std::string bytes = encode_pgm(mask);
    CHECK(bytes == std::string("P5\n3 2\n255\n\xff\x00\x00\x00\x00\xff", 17));
    CHECK(decode_pgm(bytes) == mask);

    // Comments, other whitespace and any nonzero sample are accepted.
    const std::string loose("P5 # mask\n3\t2 255\n\x01\x00\x00\x00\x00\x80", 24);
    CHECK(decode_pgm(loose) == mask);

    TempDir dir{"og_formats"};
    save_pgm(mask, dir.path / "m.pgm");
    CHECK(read_file(dir.path / "m.pgm") == bytes);
    CHECK(load_pgm(dir.path / "m.pgm") == mask);
}

TEST_CASE("random masks round trip through PGM") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> side(1, 40);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        Mask2D mask(side(rng), side(rng));
        for (int r = 0; r < mask.height(); ++r) {
            for (int c = 0; c < mask.width(); ++c) {
                mask.set(c, r, coin(rng));
            }
        }
        const std::string bytes = encode_pgm(mask);
        CHECK(decode_pgm(bytes) == mask);
        CHECK(encode_pgm(decode_pgm(bytes)) == bytes);
    }
}

TEST_CASE("malformed PGM files are format errors") {
    CHECK_THROWS_AS(decode_pgm("P2\n1 1\n255\n0"), FormatError);
    CHECK_THROWS_AS(decode_pgm("P5\n2 2\n255\n\xff"), FormatError);
    CHECK_THROWS_AS(decode_pgm("P5\n2\n"), FormatError);
    CHECK_THROWS_AS(decode_pgm(std::string("P5\n0 1\n255\n", 11)), FormatError);
    CHECK_THROWS_AS(decode_pgm(std::string("P5\n1 1\n65535\n\x00\x00", 16)), FormatError);
    CHECK_THROWS_AS(decode_pgm(std::string("P5\n1 1\n255\n\x00\x00", 13)), FormatError);
}

TEST_CASE("view JSON round trip keeps misses as null") {
    RenderedView view;
    view.width = 2;
    view.height = 2;
    view.class_ids = {0, 5, 3, 0};
    view.instance_ids = {0, 1, 0, 0};
    view.depth = {std::numeric_limits<double>::infinity(), 1.25, 0.1 + 0.2,
                  std::numeric_limits<double>::infinity()};
    const json j = view_to_json(view);
    CHECK(j.at("depth")[0].is_null());
    CHECK(j.at("depth")[1] == 1.25);
    CHECK(view_from_json(json::parse(dump(j))) == view);

    json broken = j;
    broken["class"].erase(0);
    CHECK_THROWS_AS(view_from_json(broken), FormatError);
    json wrong_type = j;
    wrong_type["instance"] = "none";
    CHECK_THROWS_AS(view_from_json(wrong_type), FormatError);
}

TEST_CASE("grounding result JSON") {
    const GridMeta meta{4, 4, 4, 1.0F, {}};
    const SemanticGrid sem(meta, default_class_table());
    GroundingResult result;
    GroundedCluster c;
    c.voxels = {{1, 2, 3}, {1, 2, 2}};
    c.center = {1.0, 2.0, 2.5};
    c.class_id = 7;
    c.depth = 3.5;
    result.clusters = {c};
    result.selected = c;
    result.noise_count = 4;
    const json j = grounding_to_json(result, sem, ClusterParams{2.0, 5});
    CHECK(j.at("selected").at("voxels") == json::parse("[[1,2,3],[1,2,2]]"));
    CHECK(j.at("selected").at("class") == "sofa");
    CHECK(j.at("selected").at("depth") == 3.5);
    CHECK(j.at("selected").at("center") == json::parse("[1.0,2.0,2.5]"));
    CHECK(j.at("clusters").size() == 1);
    CHECK(j.at("noise_count") == 4);
    CHECK(j.at("params") == json::parse(R"({"eps":2.0,"min_pts":5})"));

    const json none = grounding_to_json(GroundingResult{}, sem, ClusterParams{});
    CHECK(none.at("selected").is_null());
    CHECK(none.at("clusters").empty());
    CHECK(dump(none).back() == '\n');
}

TEST_CASE("eval JSON") {
    AffinityEval eval;
    eval.mse = 3.0;
    eval.masked_voxel_count = 1;
    CHECK(eval_to_json(eval) == json::parse(R"({"mse":3.0,"masked_voxels":1})"));
    eval.total_loss = 0.75;
    CHECK(eval_to_json(eval).at("total_loss") == 0.75);
}

TEST_CASE("scene bundles round trip") {
    SceneSpec spec;
    spec.seed = 5;
    spec.object_count = 3;
    const Scene scene = generate_scene(spec);
    const RenderedView view = render_view(scene);
    TempDir dir{"og_formats"};
    OutputBatch batch;
    stage_bundle(batch, dir.path, spec, scene, view);
    batch.commit();
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        CHECK(entry.path().extension() != ".partial");
        CHECK(entry.path().extension() != ".tmp");
    }
    CHECK(fs::exists(dir.path / "spec.json"));
    for (InstanceId id = 1; id <= 3; ++id) {
        const auto mask = load_pgm(dir.path / ("mask_" + std::to_string(id) + ".pgm"));
        CHECK(mask == instance_mask(view, id));
    }
    const SceneBundle bundle = load_bundle(dir.path);
    CHECK(bundle.sem == scene.sem);
    CHECK(bundle.instances == scene.gt_instances);
    CHECK(bundle.camera == scene.camera);
    CHECK(bundle.view == view);

    fs::remove(dir.path / "view.json");
    CHECK_THROWS(load_bundle(dir.path));
}

TEST_CASE("a failed batch leaves nothing behind") {
    TempDir dir{"og_formats"};
    OutputBatch batch;
    batch.add(dir.path / "a.txt", "a");
    batch.add(dir.path / "missing" / "b.txt", "b");
    CHECK_THROWS(batch.commit());
    CHECK(fs::is_empty(dir.path));
}
