// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/metrics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace birdseye {

namespace {

void require_finite(const std::array<Vec3, kNumJoints>& joints, const char* label) {
    for (const Vec3& j : joints)
        if (!j.allFinite())
            throw std::invalid_argument(std::string(label) + " joints must be finite");
}

}  // namespace

double mpjpe(const std::array<Vec3, kNumJoints>& pred,
             const std::array<Vec3, kNumJoints>& gt) {
    require_finite(pred, "pred");
    require_finite(gt, "gt");
    double sum = 0.0;
    for (int i = 0; i < kNumJoints; ++i)
        sum += (pred[static_cast<std::size_t>(i)] - gt[static_cast<std::size_t>(i)]).norm();
    return sum / kNumJoints;
}

double pa_mpjpe(const std::array<Vec3, kNumJoints>& pred,
                const std::array<Vec3, kNumJoints>& gt, bool with_scaling) {
    require_finite(pred, "pred");
    require_finite(gt, "gt");

    Vec3 mu_p = Vec3::Zero(), mu_g = Vec3::Zero();
    for (int i = 0; i < kNumJoints; ++i) {
        mu_p += pred[static_cast<std::size_t>(i)];
        mu_g += gt[static_cast<std::size_t>(i)];
    }
    mu_p /= kNumJoints;
    mu_g /= kNumJoints;

    // Cross-covariance of gt against pred plus the pred variance; the
    // closed-form similarity fit (SVD with determinant correction, so no
    // reflections) follows from these moments.
    double var_p = 0.0, var_g = 0.0;
    Mat3 cov = Mat3::Zero();
    for (int i = 0; i < kNumJoints; ++i) {
        const Vec3 p = pred[static_cast<std::size_t>(i)] - mu_p;
        const Vec3 g = gt[static_cast<std::size_t>(i)] - mu_g;
        var_p += p.squaredNorm();
        var_g += g.squaredNorm();
        cov += g * p.transpose();
    }
    var_p /= kNumJoints;
    var_g /= kNumJoints;
    cov /= kNumJoints;
    if (var_g <= 0.0) throw std::invalid_argument("gt joints are all coincident");
    if (var_p <= 0.0) throw std::invalid_argument("pred joints are all coincident");

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    const Vec3 d = svd.singularValues();
    Vec3 signs = Vec3::Ones();
    if (u.determinant() * v.determinant() < 0.0) signs.z() = -1.0;
    const Mat3 rot = u * signs.asDiagonal() * v.transpose();
    const double scale = with_scaling ? d.dot(signs) / var_p : 1.0;
    const Vec3 t = mu_g - scale * (rot * mu_p);

    double sum = 0.0;
    for (int i = 0; i < kNumJoints; ++i)
        sum += (scale * (rot * pred[static_cast<std::size_t>(i)]) + t -
                gt[static_cast<std::size_t>(i)])
                   .norm();
    return sum / kNumJoints;
}

std::array<double, kNumJoints> default_sigmas() {
    std::array<double, kNumJoints> s{};
    s.fill(0.079);
    return s;
}

double oks(const Detection2D& det, const std::array<Keypoint2D, kNumJoints>& gt, double area,
           const std::array<double, kNumJoints>& sigmas) {
    if (!(area > 0.0)) throw std::invalid_argument("oks requires a positive area");
    for (double s : sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("oks sigmas must be positive");

    double sum = 0.0;
    int labeled = 0;
    for (int i = 0; i < kNumJoints; ++i) {
        const Keypoint2D& g = gt[static_cast<std::size_t>(i)];
        if (g.vis <= 0) continue;
        const Vec2 diff =
            det.keypoints[static_cast<std::size_t>(i)] - Vec2(g.u, g.v);
        const double k = 2.0 * sigmas[static_cast<std::size_t>(i)];
        sum += std::exp(-diff.squaredNorm() / (2.0 * area * k * k));
        ++labeled;
    }
    if (labeled == 0)
        throw std::invalid_argument("oks undefined: groundtruth has no labeled joints");
    return sum / labeled;
}

ApArResult ap_ar(const std::vector<Detection2D>& dets, const std::vector<GtPose2D>& gts,
                 const std::array<double, kNumJoints>& sigmas) {
    if (gts.empty()) throw std::invalid_argument("ap_ar requires at least one groundtruth");

    std::map<std::string, std::vector<std::size_t>> gt_by_image;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        const GtPose2D& g = gts[i];
        if (!(g.area > 0.0))
            throw std::invalid_argument("groundtruth '" + g.image + "' has no positive area");
        bool labeled = false;
        for (const Keypoint2D& kp : g.keypoints) labeled = labeled || kp.vis > 0;
        if (!labeled)
            throw std::invalid_argument("groundtruth '" + g.image + "' has no labeled joints");
        gt_by_image[g.image].push_back(i);
    }
    std::map<std::string, std::vector<std::size_t>> det_by_image;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (gt_by_image.find(dets[i].image) == gt_by_image.end())
            throw std::invalid_argument("detection references unknown image '" +
                                        dets[i].image + "'");
        det_by_image[dets[i].image].push_back(i);
    }

    constexpr int kMaxDetsPerImage = 20;
    constexpr int kRecallPoints = 101;
    ApArResult result;
    for (int t = 0; t < 10; ++t) result.thresholds.push_back(0.50 + 0.05 * t);

    // Score-sorted detections per image, capped, with the OKS row against
    // that image's gts computed once and reused for every threshold.
    struct ScoredDet {
        double score;
        std::vector<double> oks_row;
    };
    std::map<std::string, std::vector<ScoredDet>> prepared;
    for (auto& [image, indices] : det_by_image) {
        std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return dets[a].score > dets[b].score;
        });
        if (indices.size() > static_cast<std::size_t>(kMaxDetsPerImage))
            indices.resize(kMaxDetsPerImage);
        auto& list = prepared[image];
        for (std::size_t di : indices) {
            ScoredDet sd;
            sd.score = dets[di].score;
            for (std::size_t gi : gt_by_image[image])
                sd.oks_row.push_back(oks(dets[di], gts[gi].keypoints, gts[gi].area, sigmas));
            list.push_back(std::move(sd));
        }
    }

    const double n_gt = static_cast<double>(gts.size());
    for (double tau : result.thresholds) {
        // Greedy per-image matching, then a pooled PR curve over all images.
        struct PooledDet {
            double score;
            bool matched;
        };
        std::vector<PooledDet> pooled;
        for (const auto& [image, list] : prepared) {
            std::vector<bool> gt_taken(gt_by_image[image].size(), false);
            for (const ScoredDet& sd : list) {
                int best = -1;
                double best_oks = tau;  // must clear the threshold to match
                for (std::size_t g = 0; g < sd.oks_row.size(); ++g) {
                    if (gt_taken[g]) continue;
                    if (sd.oks_row[g] >= best_oks) {
                        best_oks = sd.oks_row[g];
                        best = static_cast<int>(g);
                    }
                }
                if (best >= 0) gt_taken[static_cast<std::size_t>(best)] = true;
                pooled.push_back({sd.score, best >= 0});
            }
        }
        std::stable_sort(pooled.begin(), pooled.end(),
                         [](const PooledDet& a, const PooledDet& b) { return a.score > b.score; });

        std::vector<double> recall, precision;
        double tp = 0.0, fp = 0.0;
        for (const PooledDet& pd : pooled) {
            (pd.matched ? tp : fp) += 1.0;
            recall.push_back(tp / n_gt);
            precision.push_back(tp / (tp + fp));
        }
        // Precision envelope, then 101-point interpolation.
        for (std::size_t i = precision.size(); i-- > 1;)
            precision[i - 1] = std::max(precision[i - 1], precision[i]);
        double ap_sum = 0.0;
        for (int r = 0; r < kRecallPoints; ++r) {
            const double want = static_cast<double>(r) / (kRecallPoints - 1);
            const auto it = std::lower_bound(recall.begin(), recall.end(), want);
            if (it != recall.end())
                ap_sum += precision[static_cast<std::size_t>(it - recall.begin())];
        }
        result.ap_per_threshold.push_back(ap_sum / kRecallPoints);
        result.ar_per_threshold.push_back(recall.empty() ? 0.0 : recall.back());
    }

    for (double v : result.ap_per_threshold) result.ap += v;
    for (double v : result.ar_per_threshold) result.ar += v;
    result.ap /= static_cast<double>(result.ap_per_threshold.size());
    result.ar /= static_cast<double>(result.ar_per_threshold.size());
    return result;
}

}  // namespace birdseye
