#include "og/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <system_error>
#include <thread>

#include "CLI11.hpp"
#include "og/bundle.hpp"
#include "og/errors.hpp"
#include "og/formats.hpp"
#include "og/grid_io.hpp"
#include "og/instances.hpp"
#include "og/scene.hpp"
#include "og/service.hpp"

namespace og {

namespace {

namespace fs = std::filesystem;

// Thrown for bad flag combinations discovered after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signals a completed command whose result is empty (exit 3).
class EmptyResult : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClusterFlags {
    double eps = ClusterParams{}.eps;
    std::size_t min_pts = ClusterParams{}.min_pts;
    std::vector<std::string> background = default_background_names();

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps", eps, "DBSCAN radius in voxel units")->capture_default_str();
        cmd->add_option("--min-pts", min_pts, "DBSCAN core neighborhood size")->capture_default_str();
        cmd->add_option("--background", background, "Background class names")
            ->delimiter(',')
            ->capture_default_str();
    }
    ClusterParams params() const {
        const ClusterParams p{eps, min_pts};
        try {
            p.validate();
        } catch (const ContractViolation& e) {
            throw UsageError(e.what());
        }
        return p;
    }
    BackgroundList resolve(const SemanticGrid& sem) const {
        try {
            return BackgroundList::from_names(sem, background);
        } catch (const ContractViolation& e) {
            throw UsageError(e.what());
        }
    }
};

struct SynthArgs {
    std::uint64_t seed = 0;
    int objects = 4;
    std::vector<std::uint32_t> dims{64, 64, 32};
    float voxel_size = 0.08F;
    unsigned threads = 0;
    bool no_shell = false;
    std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& err) {
    if (a.dims.size() != 3) {
        throw UsageError("--dims needs three values X,Y,Z");
    }
    SceneSpec spec;
    spec.seed = a.seed;
    spec.object_count = a.objects;
    spec.meta = GridMeta{a.dims[0], a.dims[1], a.dims[2], a.voxel_size, {0.0F, 0.0F, 0.0F}};
    spec.include_room_shell = !a.no_shell;
    try {
        spec.meta.validate();
    } catch (const ContractViolation& e) {
        throw UsageError(e.what());
    }

    Scene scene = [&] {
        try {
            return generate_scene(spec);
        } catch (const ContractViolation& e) {
            throw UsageError(e.what());
        }
    }();
    const RenderedView view = render_view(scene, a.threads);

    const fs::path dir(a.out);
    const bool created = !fs::exists(dir);
    fs::create_directories(dir);
    try {
        OutputBatch batch;
        stage_bundle(batch, dir, spec, scene, view);
        batch.commit();
    } catch (...) {
        if (created) {
            std::error_code ignored;
            fs::remove_all(dir, ignored);
        }
        throw;
    }
    err << "wrote scene bundle to " << dir.string() << " (" << scene.gt_instances.instances().size()
        << " instances)\n";
    return kExitOk;
}

struct GtArgs {
    std::string grid;
    int connectivity = 26;
    std::string out_instances;
    std::string out_affinity;
    std::string out_mask;
};

int cmd_gt(const GtArgs& a, std::ostream& err) {
    const auto conn = connectivity_from_int(a.connectivity);
    if (!conn) {
        throw UsageError("--connectivity must be 6, 18 or 26");
    }
    const auto sem = load_grid(a.grid);
    const auto instances = connected_components(sem, *conn);
    const auto [affinity, mask] = affinity_gt(instances);
    OutputBatch batch;
    batch.add(a.out_instances, encode(instances));
    batch.add(a.out_affinity, encode(affinity));
    batch.add(a.out_mask, encode(mask));
    batch.commit();
    err << instances.instances().size() << " instances\n";
    return kExitOk;
}

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string mask;
    std::optional<double> l_ori;
    double lambda = kDefaultLambda;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    if (a.lambda < 0.0 || !std::isfinite(a.lambda)) {
        throw UsageError("--lambda must be finite and >= 0");
    }
    const auto pred = load_affinity(a.pred);
    const auto gt = load_affinity(a.gt);
    const auto mask = load_mask(a.mask);
    AffinityEval eval = masked_mse(pred, gt, mask);
    if (a.l_ori) {
        if (!std::isfinite(*a.l_ori)) {
            throw UsageError("--l-ori must be finite");
        }
        eval.total_loss = total_loss(*a.l_ori, eval.mse, a.lambda);
    }
    out << dump(eval_to_json(eval));
    return kExitOk;
}

struct GroundArgs {
    std::string grid;
    std::string affinity;
    std::string mask;
    std::string camera;
    std::string out;
    ClusterFlags cluster;
};

int cmd_ground(const GroundArgs& a, std::ostream& err) {
    const auto params = a.cluster.params();
    const auto sem = load_grid(a.grid);
    const auto affinity = load_affinity(a.affinity);
    const auto mask = load_pgm(a.mask);
    const auto cam = load_camera(a.camera);
    const auto bg = a.cluster.resolve(sem);
    if (mask.width() != cam.width() || mask.height() != cam.height()) {
        throw UsageError("mask is " + std::to_string(mask.width()) + "x" +
                         std::to_string(mask.height()) + " but the camera image is " +
                         std::to_string(cam.width()) + "x" + std::to_string(cam.height()));
    }
    const auto result = ground_mask(mask, cam, sem, affinity, bg, params);
    write_file_atomic(a.out, dump(grounding_to_json(result, sem, params)));
    switch (result.status) {
        case GroundingStatus::selected:
            err << "selected " << sem.class_table().at(result.selected->class_id) << " with "
                << result.selected->voxels.size() << " voxels at depth " << result.selected->depth
                << " m\n";
            return kExitOk;
        case GroundingStatus::no_foreground:
            throw EmptyResult("no foreground: every candidate voxel is empty or background");
        case GroundingStatus::no_candidates:
            throw EmptyResult("no candidates: the mask rays miss the grid");
        case GroundingStatus::all_noise:
            throw EmptyResult("no cluster: every foreground voxel is noise");
    }
    return kExitOk;
}

struct SegmentArgs {
    std::string grid;
    std::string affinity;
    std::string out;
    ClusterFlags cluster;
};

int cmd_segment(const SegmentArgs& a, std::ostream& err) {
    const auto params = a.cluster.params();
    const auto sem = load_grid(a.grid);
    const auto affinity = load_affinity(a.affinity);
    const auto bg = a.cluster.resolve(sem);
    const auto instances = instance_segment(sem, affinity, bg, params);
    save_instances(instances, a.out);
    err << instances.instances().size() << " instances\n";
    return kExitOk;
}

struct ServeArgs {
    std::string scene;
    std::string affinity;
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

int cmd_serve(const ServeArgs& a, std::ostream& err) {
    auto bundle = load_bundle(a.scene);
    std::optional<AffinityField> affinity;
    if (!a.affinity.empty()) {
        affinity = load_affinity(a.affinity);
    }
    GroundingService service(std::move(bundle), std::move(affinity));
    if (!service.bind(a.host, a.port)) {
        err << "cannot bind " << a.host << ":" << a.port << "\n";
        return kExitIo;
    }
    err << "serving " << a.scene << " on http://" << a.host << ":" << service.port() << "\n";
    g_interrupted.store(false);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::jthread watcher([&service](std::stop_token token) {
        while (!token.stop_requested() && !g_interrupted.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        service.stop();
    });
    service.listen();
    watcher.request_stop();
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Occupancy instance segmentation and mask-to-voxel grounding", "og"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene bundle");
    synth_cmd->add_option("--seed", synth.seed, "PRNG seed")->required();
    synth_cmd->add_option("--objects", synth.objects, "Number of boxes")->capture_default_str();
    synth_cmd->add_option("--dims", synth.dims, "Grid dims X,Y,Z")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    synth_cmd->add_option("--voxel-size", synth.voxel_size, "Voxel edge in meters")
        ->capture_default_str();
    synth_cmd->add_option("--threads", synth.threads, "Render threads (0 = all cores)");
    synth_cmd->add_flag("--no-shell", synth.no_shell, "Omit floor and wall slabs");
    synth_cmd->add_option("--out", synth.out, "Bundle directory")->required();

    GtArgs gt;
    auto* gt_cmd = app.add_subcommand("gt", "Instance, affinity and mask ground truth");
    gt_cmd->add_option("--grid", gt.grid, "Semantic grid (.ogrd)")->required();
    gt_cmd->add_option("--connectivity", gt.connectivity, "6, 18 or 26")->capture_default_str();
    gt_cmd->add_option("--out-instances", gt.out_instances)->required();
    gt_cmd->add_option("--out-affinity", gt.out_affinity)->required();
    gt_cmd->add_option("--out-mask", gt.out_mask)->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Masked affinity MSE and total loss");
    eval_cmd->add_option("--pred", eval.pred)->required();
    eval_cmd->add_option("--gt", eval.gt)->required();
    eval_cmd->add_option("--mask", eval.mask)->required();
    eval_cmd->add_option("--l-ori", eval.l_ori, "Occupancy loss term");
    eval_cmd->add_option("--lambda", eval.lambda, "Affinity loss weight")->capture_default_str();

    GroundArgs ground;
    auto* ground_cmd = app.add_subcommand("ground", "Ground a 2D mask to a 3D instance");
    ground_cmd->add_option("--grid", ground.grid)->required();
    ground_cmd->add_option("--affinity", ground.affinity)->required();
    ground_cmd->add_option("--mask", ground.mask, "Binary PGM mask")->required();
    ground_cmd->add_option("--camera", ground.camera, "Camera JSON")->required();
    ground_cmd->add_option("--out", ground.out, "Result JSON")->required();
    ground.cluster.attach(ground_cmd);

    SegmentArgs segment;
    auto* segment_cmd = app.add_subcommand("segment", "Full-grid instance segmentation");
    segment_cmd->add_option("--grid", segment.grid)->required();
    segment_cmd->add_option("--affinity", segment.affinity)->required();
    segment_cmd->add_option("--out", segment.out)->required();
    segment.cluster.attach(segment_cmd);

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the grounding API for a scene bundle");
    serve_cmd->add_option("--scene", serve.scene, "Scene bundle directory")->required();
    serve_cmd->add_option("--port", serve.port)->capture_default_str();
    serve_cmd->add_option("--host", serve.host)->capture_default_str();
    serve_cmd->add_option("--affinity", serve.affinity, "Affinity field (default: ground truth)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) {
            return cmd_synth(synth, err);
        }
        if (*gt_cmd) {
            return cmd_gt(gt, err);
        }
        if (*eval_cmd) {
            return cmd_eval(eval, out);
        }
        if (*ground_cmd) {
            return cmd_ground(ground, err);
        }
        if (*segment_cmd) {
            return cmd_segment(segment, err);
        }
        if (*serve_cmd) {
            return cmd_serve(serve, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const EmptyResult& e) {
        err << e.what() << "\n";
        return kExitEmpty;
    } catch (const PlacementFailure& e) {
        err << e.what() << "\n";
        return kExitEmpty;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return kExitIo;
    } catch (const SizeError& e) {
        err << "size error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::system_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ContractViolation& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace og
