#include "og/service.hpp"

#include <cmath>
#include <limits>

#include "httplib.h"
#include "og/errors.hpp"
#include "og/formats.hpp"
#include "og/instances.hpp"

namespace og {

using json = nlohmann::ordered_json;

struct GroundingService::Http {
    httplib::Server server;
};

namespace {

ServiceResponse error_response(int status, const std::string& message) {
    json body;
    body["error"] = message;
    return {status, dump(body)};
}

bool localhost_origin(const std::string& origin) {
    for (const char* prefix : {"http://localhost", "http://127.0.0.1", "https://localhost",
                               "https://127.0.0.1", "http://[::1]"}) {
        const std::string p(prefix);
        if (origin.rfind(p, 0) == 0 && (origin.size() == p.size() || origin[p.size()] == ':')) {
            return true;
        }
    }
    return false;
}

AffinityField resolve_affinity(const SceneBundle& bundle, std::optional<AffinityField> affinity) {
    if (affinity) {
        require_same_meta(bundle.sem.meta(), affinity->meta(), "service affinity");
        return std::move(*affinity);
    }
    return affinity_gt(bundle.instances).first;
}

}  // namespace

GroundingService::GroundingService(SceneBundle bundle, std::optional<AffinityField> affinity)
    : bundle_(std::move(bundle)),
      affinity_(resolve_affinity(bundle_, std::move(affinity))),
      http_(std::make_unique<Http>()) {
    auto& server = http_->server;
    // httplib's default adds SO_REUSEPORT, which would let a second server
    // share a busy port.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    const auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server.Get("/api/scene", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, scene());
    });
    server.Get("/api/render", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, render());
    });
    server.Get("/api/instances", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, instances());
    });
    server.Post("/api/ground", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, ground(req.body));
    });
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
    });
    server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
        const auto origin = req.get_header_value("Origin");
        if (!origin.empty() && localhost_origin(origin)) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Vary", "Origin");
        }
    });
}

GroundingService::~GroundingService() { stop(); }

ServiceResponse GroundingService::scene() const {
    const GridMeta& meta = bundle_.sem.meta();
    json voxels = json::array();
    for (std::size_t linear = 0; linear < meta.cell_count(); ++linear) {
        const ClassId cls = bundle_.sem.at(linear);
        if (cls == kEmptyClass) {
            continue;
        }
        const Index3 p = meta.unflatten(linear);
        voxels.push_back(json::array({p.i, p.j, p.k, cls, bundle_.instances.ids()[linear]}));
    }
    json out;
    out["meta"] = {{"dims", {meta.nx, meta.ny, meta.nz}},
                   {"voxel_size", meta.voxel_size},
                   {"origin", meta.origin}};
    out["classes"] = bundle_.sem.class_table();
    json background = json::array();
    for (const auto& name : default_background_names()) {
        if (bundle_.sem.find_class(name)) {
            background.push_back(name);
        }
    }
    out["background"] = std::move(background);
    out["voxels"] = std::move(voxels);
    return {200, dump(out)};
}

ServiceResponse GroundingService::render() const { return {200, dump(view_to_json(bundle_.view))}; }

ServiceResponse GroundingService::instances() const {
    const auto members = bundle_.instances.members();
    const Vec3 eye = bundle_.camera.position();
    json out = json::array();
    for (const auto& rec : bundle_.instances.instances()) {
        double depth = std::numeric_limits<double>::infinity();
        for (const auto& v : members[rec.id - 1]) {
            depth = std::min(depth, norm(voxel_to_world(v, bundle_.sem.meta()) - eye));
        }
        json item;
        item["id"] = rec.id;
        item["class"] = bundle_.sem.class_table().at(rec.class_id);
        item["center"] = {rec.center.x, rec.center.y, rec.center.z};
        item["voxel_count"] = rec.voxel_count;
        item["depth"] = depth;
        out.push_back(std::move(item));
    }
    return {200, dump(out)};
}

ServiceResponse GroundingService::ground(const std::string& request_body) const {
    json req;
    try {
        req = json::parse(request_body);
    } catch (const json::exception& e) {
        return error_response(400, std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object() || !req.contains("pixels") || !req["pixels"].is_array()) {
        return error_response(400, "request needs a \"pixels\" array");
    }
    const PinholeCamera& cam = bundle_.camera;
    Mask2D mask(cam.width(), cam.height());
    ClusterParams params;
    std::vector<std::string> background = default_background_names();
    try {
        for (const auto& px : req["pixels"]) {
            if (!px.is_array() || px.size() != 2 || !px[0].is_number_integer() ||
                !px[1].is_number_integer()) {
                return error_response(400, "each pixel must be an integer pair [u, v]");
            }
            const auto u = px[0].get<std::int64_t>();
            const auto v = px[1].get<std::int64_t>();
            if (u < 0 || v < 0 || u >= cam.width() || v >= cam.height()) {
                return error_response(400, "pixel outside the image");
            }
            mask.set(static_cast<int>(u), static_cast<int>(v));
        }
        if (req.contains("eps")) {
            params.eps = req["eps"].get<double>();
        }
        if (req.contains("min_pts")) {
            const auto m = req["min_pts"].get<std::int64_t>();
            if (m < 1) {
                return error_response(400, "min_pts must be >= 1");
            }
            params.min_pts = static_cast<std::size_t>(m);
        }
        if (req.contains("background")) {
            background = req["background"].get<std::vector<std::string>>();
        }
        params.validate();
        const auto bg = BackgroundList::from_names(bundle_.sem, background);
        const auto result = ground_mask(mask, cam, bundle_.sem, affinity_, bg, params);
        return {200, dump(grounding_to_json(result, bundle_.sem, params))};
    } catch (const json::exception& e) {
        return error_response(400, std::string("bad request field: ") + e.what());
    } catch (const ContractViolation& e) {
        return error_response(400, e.what());
    }
}

bool GroundingService::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = http_->server.bind_to_any_port(host);
    } else {
        port_ = http_->server.bind_to_port(host, port) ? port : -1;
    }
    return port_ > 0;
}

int GroundingService::port() const { return port_; }

void GroundingService::listen() { http_->server.listen_after_bind(); }

void GroundingService::stop() {
    if (http_) {
        http_->server.stop();
    }
}

}  // namespace og
