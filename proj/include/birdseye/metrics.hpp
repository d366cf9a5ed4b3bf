// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/annotation.hpp"
#include "birdseye/camera.hpp"

#include <array>
#include <string>
#include <vector>

namespace birdseye {

/// One 3D pose hypothesis, millimeters, same joint order as the groundtruth.
struct PoseEstimate3D {
    int frame_id = 0;
    std::array<Vec3, kNumJoints> joints{};
};

/// Mean Euclidean joint error in the shared frame, millimeters.
/// Throws std::invalid_argument on non-finite input.
double mpjpe(const std::array<Vec3, kNumJoints>& pred, const std::array<Vec3, kNumJoints>& gt);

/// MPJPE after the optimal similarity alignment (rotation + translation +
/// uniform scale unless with_scaling is false) of pred onto gt, reflection
/// excluded. Throws std::invalid_argument when gt has zero variance (the
/// alignment is undefined) or input is non-finite.
double pa_mpjpe(const std::array<Vec3, kNumJoints>& pred,
                const std::array<Vec3, kNumJoints>& gt, bool with_scaling = true);

/// One 2D keypoint detection for one image.
struct Detection2D {
    std::string image;  // file_name key into the groundtruth index
    double score = 1.0;
    std::array<Vec2, kNumJoints> keypoints{};
    std::array<double, kNumJoints> confidences{};
};

/// Groundtruth side of 2D evaluation.
struct GtPose2D {
    std::string image;
    std::array<Keypoint2D, kNumJoints> keypoints{};
    double area = 0.0;  // bbox area, px²
};

/// Per-joint OKS falloff; every joint defaults to 0.079 (configurable
/// because the usual 17-joint table does not cover this skeleton).
std::array<double, kNumJoints> default_sigmas();

/// Object keypoint similarity: mean over gt joints with vis>0 of
/// exp(−d² / (2·area·(2σ)²)). Requires area > 0 and all sigmas > 0; throws
/// std::invalid_argument when no gt joint is labeled (vis all zero).
double oks(const Detection2D& det, const std::array<Keypoint2D, kNumJoints>& gt, double area,
           const std::array<double, kNumJoints>& sigmas);

/// Thresholded keypoint evaluation summary.
struct ApArResult {
    double ap = 0.0;
    double ar = 0.0;
    std::vector<double> thresholds;    // 0.50, 0.55, ..., 0.95
    std::vector<double> ap_per_threshold;
    std::vector<double> ar_per_threshold;
};

/// Greedy score-ordered OKS matching per image (top 20 detections), pooled
/// 101-point interpolated AP and mean max-recall AR over the threshold
/// sweep. Throws std::invalid_argument when gts is empty.
ApArResult ap_ar(const std::vector<Detection2D>& dets, const std::vector<GtPose2D>& gts,
                 const std::array<double, kNumJoints>& sigmas = default_sigmas());

}  // namespace birdseye
