#include "og/formats.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "og/errors.hpp"
#include "og/grid_io.hpp"

namespace og {

using json = nlohmann::ordered_json;

namespace {

template <typename Fn>
auto as_format_error(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    } catch (const ContractViolation& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

json cluster_json(const GroundedCluster& c, const SemanticGrid& sem) {
    json voxels = json::array();
    for (const auto& v : c.voxels) {
        voxels.push_back(json::array({v.i, v.j, v.k}));
    }
    json out;
    out["voxels"] = std::move(voxels);
    out["center"] = vec_json(c.center);
    out["class"] = sem.class_table().at(c.class_id);
    out["depth"] = c.depth;
    return out;
}

}  // namespace

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json camera_to_json(const PinholeCamera& cam) {
    const auto& r = cam.pose().rotation;
    const Vec3 t = cam.pose().translation;
    json m = json::array({r[0][0], r[0][1], r[0][2], t.x, r[1][0], r[1][1], r[1][2], t.y, r[2][0],
                          r[2][1], r[2][2], t.z, 0.0, 0.0, 0.0, 1.0});
    json out;
    out["fx"] = cam.fx();
    out["fy"] = cam.fy();
    out["cx"] = cam.cx();
    out["cy"] = cam.cy();
    out["width"] = cam.width();
    out["height"] = cam.height();
    out["cam_to_world"] = std::move(m);
    return out;
}

PinholeCamera camera_from_json(const json& j) {
    return as_format_error("camera", [&] {
        const auto m = j.at("cam_to_world").get<std::vector<double>>();
        if (m.size() != 16) {
            throw FormatError("camera: cam_to_world must hold 16 numbers");
        }
        if (m[12] != 0.0 || m[13] != 0.0 || m[14] != 0.0 || m[15] != 1.0) {
            throw FormatError("camera: cam_to_world bottom row must be 0,0,0,1");
        }
        Pose pose;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                pose.rotation[r][c] = m[r * 4 + c];
            }
        }
        pose.translation = {m[3], m[7], m[11]};
        return PinholeCamera(j.at("fx").get<double>(), j.at("fy").get<double>(),
                             j.at("cx").get<double>(), j.at("cy").get<double>(),
                             j.at("width").get<int>(), j.at("height").get<int>(), pose);
    });
}

PinholeCamera load_camera(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const json j = as_format_error("camera", [&] { return json::parse(text); });
    return camera_from_json(j);
}

void save_camera(const PinholeCamera& cam, const std::filesystem::path& path) {
    write_file_atomic(path, dump(camera_to_json(cam)));
}

json grounding_to_json(const GroundingResult& result, const SemanticGrid& sem,
                       const ClusterParams& params) {
    json out;
    out["selected"] = result.selected ? cluster_json(*result.selected, sem) : json(nullptr);
    json clusters = json::array();
    for (const auto& c : result.clusters) {
        clusters.push_back(cluster_json(c, sem));
    }
    out["clusters"] = std::move(clusters);
    out["noise_count"] = result.noise_count;
    out["params"] = {{"eps", params.eps}, {"min_pts", params.min_pts}};
    return out;
}

json view_to_json(const RenderedView& view) {
    json depth = json::array();
    for (double d : view.depth) {
        depth.push_back(std::isfinite(d) ? json(d) : json(nullptr));
    }
    json out;
    out["width"] = view.width;
    out["height"] = view.height;
    out["class"] = view.class_ids;
    out["instance"] = view.instance_ids;
    out["depth"] = std::move(depth);
    return out;
}

RenderedView view_from_json(const json& j) {
    return as_format_error("view", [&] {
        RenderedView view;
        view.width = j.at("width").get<int>();
        view.height = j.at("height").get<int>();
        view.class_ids = j.at("class").get<std::vector<ClassId>>();
        view.instance_ids = j.at("instance").get<std::vector<InstanceId>>();
        for (const auto& d : j.at("depth")) {
            view.depth.push_back(d.is_null() ? std::numeric_limits<double>::infinity()
                                             : d.get<double>());
        }
        const std::size_t pixels = std::size_t(std::max(view.width, 0)) * std::size_t(std::max(view.height, 0));
        if (view.class_ids.size() != pixels || view.instance_ids.size() != pixels ||
            view.depth.size() != pixels) {
            throw FormatError("view: buffer length does not match width*height");
        }
        return view;
    });
}

json spec_to_json(const SceneSpec& spec) {
    json pool = json::array();
    for (ClassId c : spec.class_pool) {
        pool.push_back(default_class_table().at(c));
    }
    json out;
    out["seed"] = spec.seed;
    out["dims"] = {spec.meta.nx, spec.meta.ny, spec.meta.nz};
    out["voxel_size"] = spec.meta.voxel_size;
    out["origin"] = spec.meta.origin;
    out["object_count"] = spec.object_count;
    out["class_pool"] = std::move(pool);
    out["size_min"] = spec.size_min;
    out["size_max"] = spec.size_max;
    out["include_room_shell"] = spec.include_room_shell;
    out["image"] = {spec.image_width, spec.image_height};
    return out;
}

json eval_to_json(const AffinityEval& eval) {
    json out;
    out["mse"] = eval.mse;
    out["masked_voxels"] = eval.masked_voxel_count;
    if (eval.total_loss) {
        out["total_loss"] = *eval.total_loss;
    }
    return out;
}

std::string encode_pgm(const Mask2D& mask) {
    std::string out = "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) +
                      "\n255\n";
    out.reserve(out.size() + mask.flags().size());
    for (std::uint8_t f : mask.flags()) {
        out.push_back(static_cast<char>(f != 0 ? 255 : 0));
    }
    return out;
}

Mask2D decode_pgm(std::string_view bytes) {
    std::size_t pos = 0;
    const auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos])) != 0) {
                ++pos;
            } else {
                break;
            }
        }
    };
    const auto read_int = [&](const char* field) {
        skip_space();
        long value = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos])) != 0) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > 1'000'000) {
                throw FormatError(std::string("pgm: ") + field + " too large");
            }
            ++pos;
            ++digits;
        }
        if (digits == 0) {
            throw FormatError(std::string("pgm: missing ") + field);
        }
        return static_cast<int>(value);
    };
    if (bytes.substr(0, 2) != "P5") {
        throw FormatError("pgm: bad magic (expected P5)");
    }
    pos = 2;
    const int width = read_int("width");
    const int height = read_int("height");
    const int maxval = read_int("maxval");
    if (width < 1 || height < 1) {
        throw FormatError("pgm: image must be at least 1x1");
    }
    if (maxval < 1 || maxval > 255) {
        throw FormatError("pgm: only 8-bit maxval is supported");
    }
    if (pos >= bytes.size() || std::isspace(static_cast<unsigned char>(bytes[pos])) == 0) {
        throw FormatError("pgm: missing separator before raster");
    }
    ++pos;
    const std::size_t pixels = std::size_t(width) * std::size_t(height);
    if (bytes.size() - pos != pixels) {
        throw FormatError("pgm: raster has " + std::to_string(bytes.size() - pos) +
                          " bytes, header promises " + std::to_string(pixels));
    }
    std::vector<std::uint8_t> flags(pixels);
    for (std::size_t px = 0; px < pixels; ++px) {
        flags[px] = bytes[pos + px] != 0 ? 1 : 0;
    }
    return Mask2D(width, height, std::move(flags));
}

Mask2D load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void save_pgm(const Mask2D& mask, const std::filesystem::path& path) {
    write_file_atomic(path, encode_pgm(mask));
}

}  // namespace og
