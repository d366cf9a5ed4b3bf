// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/annotation.hpp"
#include "birdseye/json_util.hpp"
#include "birdseye/renderer.hpp"
#include "birdseye/rig.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace birdseye {

/// Everything a batch render run needs, loaded from one config document.
struct PipelineConfig {
    std::string actor;
    /// Scene spec (see make_field), or {"type": "per_frame", "frames": {...}}
    /// with one spec per frame id.
    Json scene;
    std::filesystem::path ground_truth;
    std::vector<RigPass> passes;
    Intrinsics intrinsics;
    /// n_samples, bounds, background, mask threshold, supersample; the
    /// jitter seed and worker count below are folded in per run.
    RenderOptions render;
    std::filesystem::path output_root;
    int frame_stride = 1;
    /// Fixed rig center in the horizontal plane; unset = follow the pelvis
    /// joint of each frame.
    std::optional<Vec2> fixed_pelvis;
    int workers = 0;  // 0 = hardware concurrency
    std::optional<std::uint64_t> seed;
    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir;
};

/// Parses and cross-checks a config document: unknown keys, missing files,
/// and malformed values all fail here with field context, before any
/// rendering starts.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// What a render run produced (also written to {output_root}/manifest.json,
/// which carries a timestamp and is therefore excluded from determinism
/// comparisons).
struct RenderRunSummary {
    int frames = 0;
    int sets = 0;
    int images = 0;
    std::vector<std::string> errors;  // non-empty only with keep_going
    std::filesystem::path manifest_path;
};

/// Renders every (frame, pass) set: builds the rig from the pelvis, renders
/// 9 views, projects and occlusion-tests keypoints, derives bboxes, and
/// packages everything through write_render_set. Progress and per-image
/// timing go to `log`. A per-set failure aborts the run unless keep_going,
/// in which case it is collected into the summary (and the manifest).
RenderRunSummary run_render(const PipelineConfig& config, bool keep_going, std::ostream& log);

/// COCO-style 2D keypoint evaluation of a prediction file against a
/// generated dataset root; returns the report document (AP/AR + per
/// threshold breakdown) and logs a one-line summary.
Json run_eval_2d(const std::filesystem::path& pred_path,
                 const std::filesystem::path& dataset_root, std::ostream& log);

/// 3D joint-error evaluation (MPJPE / PA-MPJPE, millimeters) of per-frame
/// estimates against the records under dataset_root.
Json run_eval_3d(const std::filesystem::path& pred_path,
                 const std::filesystem::path& dataset_root, std::ostream& log);

}  // namespace birdseye
