// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/camera.hpp"
#include "birdseye/json_util.hpp"
#include "birdseye/renderer.hpp"
#include "birdseye/rig.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace birdseye {

inline constexpr int kNumJoints = 24;

/// Joint names in skeleton order (pelvis first); emitted verbatim in the
/// dataset index so consumers need no out-of-band convention.
extern const std::array<const char*, kNumJoints> kJointNames;

/// Parent/child joint pairs (0-based indices into kJointNames).
extern const std::array<std::array<int, 2>, kNumJoints - 1> kSkeletonEdges;

/// One subject frame: world-space joints plus body-model parameters carried
/// through unchanged.
struct FrameGroundTruth {
    int frame_id = 0;
    std::array<Vec3, kNumJoints> joints{};
    std::array<double, 10> betas{};
    /// Per-joint axis-angle rotations, radians.
    std::array<Vec3, kNumJoints> pose{};
};

/// Throws std::invalid_argument on non-finite coordinates.
void validate(const FrameGroundTruth& gt);

/// Loads `{"frames": [{frame_id, joints_3d, betas, pose}, ...]}`.
/// Frames keep file order; duplicate frame_ids are rejected.
std::vector<FrameGroundTruth> load_ground_truth(const std::filesystem::path& path);

/// Projected joint with COCO-style visibility:
/// 0 = unlabeled (outside image or field of view), 1 = occluded, 2 = visible.
struct Keypoint2D {
    double u = 0.0;
    double v = 0.0;
    int vis = 0;
};

/// Axis-aligned pixel box, x/y = top-left corner.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
};

/// Decides whether a validly projecting joint is seen or hidden: estimates
/// transmittance from the camera center to 1 cm short of the joint (the
/// margin keeps a joint on a dense surface from occluding itself) and
/// returns 2 when T >= 0.5, else 1.
int occlusion_visibility(const Vec3& joint, const Camera& cam, const RadianceField& field,
                         const RenderOptions& opts);

/// Projects all joints into one camera. vis=0 for joints outside the image
/// or image circle (their u,v still carry the raw projection when defined);
/// otherwise vis=2, refined to 1/2 through `field` when one is supplied.
std::array<Keypoint2D, kNumJoints> project_keypoints(const FrameGroundTruth& gt,
                                                     const Camera& cam,
                                                     const RadianceField* field = nullptr,
                                                     const RenderOptions* opts = nullptr);

/// Tight box around nonzero mask pixels; empty mask → nullopt.
std::optional<BBox> bbox_from_mask(const std::vector<std::uint8_t>& mask, int width,
                                   int height);

/// Everything recorded for one (frame, rig) render set.
struct RenderSetRecord {
    int frame_id = 0;
    double rig_height = 0.0;
    double rig_circle_radius = 0.0;
    Vec2 pelvis_xy = Vec2::Zero();
    std::vector<Camera> cameras;                            // 9, rig order
    std::array<Vec3, kNumJoints> joints_3d{};
    std::array<double, 10> betas{};
    std::array<Vec3, kNumJoints> pose{};
    std::vector<std::array<Keypoint2D, kNumJoints>> keypoints;  // per camera
    std::vector<std::optional<BBox>> bboxes;                    // per camera
    std::vector<std::string> image_files;                       // basenames, filled on write
    std::vector<std::string> mask_files;
};

Json camera_to_json(const Camera& cam);
Camera camera_from_json(const Json& j);

Json record_to_json(const RenderSetRecord& record);
RenderSetRecord record_from_json(const Json& j);

/// Paths produced by write_render_set.
struct SetManifest {
    std::filesystem::path set_dir;
    std::vector<std::filesystem::path> image_paths;
    std::vector<std::filesystem::path> mask_paths;
    std::filesystem::path record_path;
    std::filesystem::path index_path;
};

/// Writes one render set under `{root}/{actor}/{h}_{R}/{frame:06}/`:
/// 9 RGB images + 9 masks named `{frame:06}_{cam:02}.png` /
/// `..._mask.png`, one record document, and an update of the dataset-level
/// COCO-style keypoint index at `{root}/index.json`. Fills
/// `record.image_files` / `record.mask_files`. On failure the partially
/// written set directory is removed before the error propagates. Index
/// updates assume a single writer.
SetManifest write_render_set(const std::filesystem::path& root, const std::string& actor,
                             RenderSetRecord& record,
                             const std::vector<RenderOutput>& outputs);

/// One dataset rule violation, anchored to a file.
struct ValidationIssue {
    std::string path;
    std::string message;
};

struct ValidationReport {
    int sets = 0;
    int images = 0;
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    Json to_json() const;
};

/// Re-checks a generated dataset: record schemas, referenced files, camera
/// counts, visibility/bounds consistency, bbox sanity against masks,
/// keypoint reprojection, and index bookkeeping. Violations become report
/// entries; only unreadable roots throw.
ValidationReport validate_dataset(const std::filesystem::path& root);

}  // namespace birdseye
