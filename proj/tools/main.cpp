// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0
//
// Batch entry point: rendering, ray diagnostics, dataset validation, and
// metric evaluation, each as a subcommand.

#include "birdseye/annotation.hpp"
#include "birdseye/camera.hpp"
#include "birdseye/camera_io.hpp"
#include "birdseye/pipeline.hpp"
#include "birdseye/voxel_grid.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

int cmd_render(const std::string& config_path, const std::optional<std::string>& out,
               int workers, std::int64_t seed, int supersample, bool keep_going) {
    birdseye::PipelineConfig config = birdseye::load_pipeline_config(config_path);
    if (out) config.output_root = *out;
    if (workers >= 0) config.workers = workers;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (supersample >= 1) config.render.supersample = supersample;

    const birdseye::RenderRunSummary summary =
        birdseye::run_render(config, keep_going, std::cout);
    return summary.errors.empty() ? 0 : 1;
}

int cmd_inspect_rays(const std::string& camera_path, int side) {
    const birdseye::Camera cam = birdseye::read_camera_file(camera_path);
    const auto points = birdseye::ray_crossing_diagnostic(cam, side);
    std::cout << "# grid_x grid_y u v theta q_x q_y flag\n";
    for (const birdseye::RayCrossPoint& pt : points) {
        std::cout << pt.grid_x << ' ' << pt.grid_y << ' ' << birdseye::format_double(pt.u)
                  << ' ' << birdseye::format_double(pt.v) << ' '
                  << birdseye::format_double(pt.theta) << ' '
                  << birdseye::format_double(pt.q_x) << ' ' << birdseye::format_double(pt.q_y)
                  << ' ' << (pt.plottable ? "valid" : "invalid") << '\n';
    }
    return 0;
}

int cmd_validate(const std::string& root) {
    const birdseye::ValidationReport report = birdseye::validate_dataset(root);
    std::cout << report.to_json().dump(2) << "\n";
    if (!report.ok()) {
        std::cerr << report.issues.size() << " violation(s) found\n";
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& pred, const std::string& gt_root, const std::string& mode,
             const std::optional<std::string>& out) {
    const birdseye::Json report = mode == "2d"
                                      ? birdseye::run_eval_2d(pred, gt_root, std::cout)
                                      : birdseye::run_eval_3d(pred, gt_root, std::cout);
    if (out) {
        std::ofstream f(*out, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error(*out + ": cannot open for writing");
        f << report.dump(2) << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return 0;
}

int cmd_voxel_info(const std::string& path) {
    const birdseye::VoxelGrid grid = birdseye::load_voxel_grid(path);
    float sigma_min = 0.0f, sigma_max = 0.0f;
    double sigma_sum = 0.0;
    const std::size_t n = grid.voxel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const float s = grid.data[4 * i + 3];
        if (i == 0) sigma_min = sigma_max = s;
        sigma_min = std::min(sigma_min, s);
        sigma_max = std::max(sigma_max, s);
        sigma_sum += s;
    }
    std::cout << "dims: " << grid.dims[0] << " x " << grid.dims[1] << " x " << grid.dims[2]
              << " (" << n << " voxels)\n"
              << "bounds: [" << birdseye::format_double(grid.bounds.min.x()) << ", "
              << birdseye::format_double(grid.bounds.min.y()) << ", "
              << birdseye::format_double(grid.bounds.min.z()) << "] .. ["
              << birdseye::format_double(grid.bounds.max.x()) << ", "
              << birdseye::format_double(grid.bounds.max.y()) << ", "
              << birdseye::format_double(grid.bounds.max.z()) << "]\n"
              << "sigma: min " << sigma_min << "  max " << sigma_max << "  mean "
              << (n ? sigma_sum / static_cast<double>(n) : 0.0) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fisheye top-view rendering and dataset toolkit"};
    app.require_subcommand(1);

    auto* render = app.add_subcommand("render", "render a dataset from a pipeline config");
    std::string config_path;
    render->add_option("--config", config_path, "pipeline config file")->required();
    std::string render_out;
    auto* render_out_opt = render->add_option("--out", render_out, "override output root");
    int workers = -1;
    render->add_option("--workers", workers, "worker threads (0 = auto)");
    std::int64_t seed = -1;
    render->add_option("--seed", seed, "stratified-sampling seed override");
    int supersample = 0;
    render->add_option("--supersample", supersample, "rays per pixel axis (k x k)");
    bool keep_going = false;
    render->add_flag("--keep-going", keep_going, "collect per-set errors instead of aborting");

    auto* inspect = app.add_subcommand("inspect-rays",
                                       "emit the backward-ray crossing grid of a camera");
    std::string camera_path;
    inspect->add_option("camera_file", camera_path, "camera parameter file")->required();
    int side = 50;
    inspect->add_option("--side", side, "grid resolution per axis");

    auto* validate = app.add_subcommand("validate", "re-check a generated dataset");
    std::string dataset_root;
    validate->add_option("root", dataset_root, "dataset root directory")->required();

    auto* eval = app.add_subcommand("eval", "evaluate predictions against a dataset");
    std::string pred_path, gt_root, mode;
    eval->add_option("--pred", pred_path, "prediction file")->required();
    eval->add_option("--gt", gt_root, "dataset root with groundtruth")->required();
    eval->add_option("--mode", mode, "2d (AP/AR) or 3d (MPJPE)")
        ->required()
        ->check(CLI::IsMember({"2d", "3d"}));
    std::string eval_out;
    auto* eval_out_opt = eval->add_option("--out", eval_out, "write the report here");

    auto* voxel = app.add_subcommand("voxel-info", "print voxel grid header and stats");
    std::string voxel_path;
    voxel->add_option("file", voxel_path, "voxel grid file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed())
            return cmd_render(config_path,
                              render_out_opt->count() ? std::optional(render_out) : std::nullopt,
                              workers, seed, supersample, keep_going);
        if (inspect->parsed()) return cmd_inspect_rays(camera_path, side);
        if (validate->parsed()) return cmd_validate(dataset_root);
        if (eval->parsed())
            return cmd_eval(pred_path, gt_root, mode,
                            eval_out_opt->count() ? std::optional(eval_out) : std::nullopt);
        if (voxel->parsed()) return cmd_voxel_info(voxel_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
