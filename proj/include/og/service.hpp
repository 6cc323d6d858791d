#pragma once

#include <memory>
#include <optional>
#include <string>

#include "og/bundle.hpp"
#include "og/grid.hpp"

namespace og {

struct ServiceResponse {
    int status = 200;
    std::string body;
};

// Read-only grounding API over one immutable scene. Handlers are pure
// functions of the scene and the request, so concurrent calls are safe.
class GroundingService {
public:
    // Without an explicit affinity the ground-truth field of the bundle's
    // instances is served.
    explicit GroundingService(SceneBundle bundle, std::optional<AffinityField> affinity = std::nullopt);
    ~GroundingService();
    GroundingService(const GroundingService&) = delete;
    GroundingService& operator=(const GroundingService&) = delete;

    ServiceResponse scene() const;      // GET /api/scene
    ServiceResponse render() const;     // GET /api/render
    ServiceResponse instances() const;  // GET /api/instances
    ServiceResponse ground(const std::string& request_body) const;  // POST /api/ground

    // Binds host:port (port 0 picks a free one). Returns false when the port
    // cannot be bound.
    bool bind(const std::string& host, int port);
    int port() const;
    // Blocks serving requests until stop() is called.
    void listen();
    void stop();

private:
    SceneBundle bundle_;
    AffinityField affinity_;
    struct Http;
    std::unique_ptr<Http> http_;
    int port_ = -1;
};

}  // namespace og
