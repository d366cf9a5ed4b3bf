// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/pipeline.hpp"

#include "birdseye/camera_io.hpp"
#include "birdseye/metrics.hpp"
#include "birdseye/scene.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace birdseye {

namespace fs = std::filesystem;

namespace {

Json parse_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

fs::path resolve(const fs::path& p, const fs::path& base) {
    return p.is_relative() ? base / p : p;
}

/// Every path a scene spec references must resolve before rendering starts.
void check_scene_paths(const Json& spec, const fs::path& base_dir, const std::string& where) {
    if (!spec.is_object()) throw SchemaError(where, "scene spec must be an object");
    const std::string type = require_string(spec, "type", where);
    if (type == "nvox") {
        const fs::path p = resolve(require_string(spec, "path", where), base_dir);
        if (!fs::exists(p))
            throw SchemaError(where, "nvox file not found: " + p.string());
    } else if (type == "union") {
        const Json& members = require(spec, "members", where);
        if (members.is_array())
            for (const Json& m : members) check_scene_paths(m, base_dir, where);
    } else if (type == "per_frame") {
        check_keys(spec, {"type", "frames"}, where);
        const Json& frames = require(spec, "frames", where);
        if (!frames.is_object() || frames.empty())
            throw SchemaError(where, "'frames' must map frame ids to scene specs");
        for (const auto& item : frames.items())
            check_scene_paths(item.value(), base_dir, where + ".frames." + item.key());
    }
}

/// Scene spec for one frame: either the shared spec or the per-frame entry.
Json scene_for_frame(const Json& scene, int frame_id, const std::string& where) {
    if (scene.value("type", "") != "per_frame") return scene;
    const Json& frames = scene.at("frames");
    const std::string key = std::to_string(frame_id);
    const auto it = frames.find(key);
    if (it == frames.end())
        throw SchemaError(where, "per_frame scene has no entry for frame " + key);
    return *it;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    const Json doc = parse_json_file(path);
    const std::string where = path.string();
    check_keys(doc,
               {"actor", "scene", "ground_truth", "passes", "intrinsics", "render",
                "output_root", "frame_stride", "pelvis", "workers", "seed"},
               where);

    PipelineConfig c;
    c.base_dir = path.parent_path();

    c.actor = require_string(doc, "actor", where);
    if (c.actor.empty() || c.actor.find('/') != std::string::npos)
        throw SchemaError(where, "'actor' must be a non-empty path segment");

    c.scene = require(doc, "scene", where);
    check_scene_paths(c.scene, c.base_dir, where + ".scene");

    c.ground_truth = resolve(require_string(doc, "ground_truth", where), c.base_dir);
    if (!fs::exists(c.ground_truth))
        throw SchemaError(where, "ground_truth file not found: " + c.ground_truth.string());

    const Json& passes = require(doc, "passes", where);
    if (!passes.is_array() || passes.empty())
        throw SchemaError(where, "'passes' must be a non-empty array");
    for (const Json& p : passes) {
        check_keys(p, {"height", "circle_radius"}, where + ".passes");
        c.passes.push_back(RigPass{require_number(p, "height", where + ".passes"),
                                   require_number(p, "circle_radius", where + ".passes")});
    }

    const Json& intr = require(doc, "intrinsics", where);
    check_keys(intr, {"focal", "cx", "cy", "width", "height", "theta_max"},
               where + ".intrinsics");
    c.intrinsics.focal = require_number(intr, "focal", where + ".intrinsics");
    c.intrinsics.cx = require_number(intr, "cx", where + ".intrinsics");
    c.intrinsics.cy = require_number(intr, "cy", where + ".intrinsics");
    c.intrinsics.width = require_int(intr, "width", where + ".intrinsics");
    c.intrinsics.height = require_int(intr, "height", where + ".intrinsics");
    if (intr.contains("theta_max"))
        c.intrinsics.theta_max = require_number(intr, "theta_max", where + ".intrinsics");
    validate(c.intrinsics);

    if (doc.contains("render")) {
        const Json& r = doc.at("render");
        check_keys(r,
                   {"n_samples", "t_near", "t_far", "background", "mask_threshold",
                    "supersample"},
                   where + ".render");
        if (r.contains("n_samples"))
            c.render.n_samples = require_int(r, "n_samples", where + ".render");
        if (r.contains("t_near") && !r.at("t_near").is_null())
            c.render.t_near = require_number(r, "t_near", where + ".render");
        if (r.contains("t_far") && !r.at("t_far").is_null())
            c.render.t_far = require_number(r, "t_far", where + ".render");
        if (r.contains("background")) {
            double bg[3];
            require_numbers(r, "background", 3, bg, where + ".render");
            c.render.background = Vec3(bg[0], bg[1], bg[2]);
        }
        if (r.contains("mask_threshold"))
            c.render.mask_threshold = require_number(r, "mask_threshold", where + ".render");
        if (r.contains("supersample"))
            c.render.supersample = require_int(r, "supersample", where + ".render");
    }
    validate(c.render);

    c.output_root = resolve(require_string(doc, "output_root", where), c.base_dir);

    if (doc.contains("frame_stride")) {
        c.frame_stride = require_int(doc, "frame_stride", where);
        if (c.frame_stride < 1) throw SchemaError(where, "'frame_stride' must be >= 1");
    }
    if (doc.contains("pelvis")) {
        const Json& p = doc.at("pelvis");
        if (p.is_string()) {
            if (p.get<std::string>() != "per_frame")
                throw SchemaError(where, "'pelvis' must be \"per_frame\" or [x, y]");
        } else {
            double xy[2];
            require_numbers(doc, "pelvis", 2, xy, where);
            c.fixed_pelvis = Vec2(xy[0], xy[1]);
        }
    }
    if (doc.contains("workers")) {
        c.workers = require_int(doc, "workers", where);
        if (c.workers < 0) throw SchemaError(where, "'workers' must be >= 0");
    }
    if (doc.contains("seed")) {
        const Json& s = doc.at("seed");
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
            throw SchemaError(where, "'seed' must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    return c;
}

RenderRunSummary run_render(const PipelineConfig& config, bool keep_going, std::ostream& log) {
    std::vector<FrameGroundTruth> frames = load_ground_truth(config.ground_truth);
    std::vector<FrameGroundTruth> selected;
    for (std::size_t i = 0; i < frames.size(); i += static_cast<std::size_t>(config.frame_stride))
        selected.push_back(frames[i]);
    if (selected.empty()) throw std::runtime_error("no frames selected to render");

    const bool shared_scene = config.scene.value("type", "") != "per_frame";
    std::shared_ptr<const RadianceField> shared_field;
    if (shared_scene) shared_field = make_field(config.scene, config.base_dir);

    RenderRunSummary summary;
    fs::create_directories(config.output_root);

    for (std::size_t frame_idx = 0; frame_idx < selected.size(); ++frame_idx) {
        const FrameGroundTruth& gt = selected[frame_idx];
        std::shared_ptr<const RadianceField> field = shared_field;
        try {
            if (!shared_scene)
                field = make_field(scene_for_frame(config.scene, gt.frame_id, "scene"),
                                   config.base_dir);
        } catch (const std::exception& e) {
            if (!keep_going) throw;
            summary.errors.push_back("frame " + std::to_string(gt.frame_id) + ": " + e.what());
            continue;
        }

        const Vec2 pelvis = config.fixed_pelvis
                                ? *config.fixed_pelvis
                                : Vec2(gt.joints[0].x(), gt.joints[0].y());
        const std::vector<RenderRig> rigs =
            make_multi_rig(config.passes, pelvis, config.intrinsics);

        bool frame_rendered = false;
        for (std::size_t pass_idx = 0; pass_idx < rigs.size(); ++pass_idx) {
            const RenderRig& rig = rigs[pass_idx];
            // One jitter stream per (frame, pass) set, stable across reruns.
            const std::uint64_t set_counter = frame_idx * rigs.size() + pass_idx;
            const std::string set_label =
                "frame " + std::to_string(gt.frame_id) + " pass " +
                format_double(rig.config.height) + "_" +
                format_double(rig.config.circle_radius);
            try {
                RenderOptions opts = config.render;
                opts.workers = config.workers;
                if (config.seed)
                    opts.jitter_seed = derive_stream_seed(*config.seed, set_counter);

                const std::vector<RenderOutput> outputs = render_set(*field, rig, opts);

                RenderSetRecord record;
                record.frame_id = gt.frame_id;
                record.rig_height = rig.config.height;
                record.rig_circle_radius = rig.config.circle_radius;
                record.pelvis_xy = rig.config.pelvis_xy;
                record.cameras = rig.cameras;
                record.joints_3d = gt.joints;
                record.betas = gt.betas;
                record.pose = gt.pose;
                for (std::size_t cam = 0; cam < outputs.size(); ++cam) {
                    record.keypoints.push_back(
                        project_keypoints(gt, rig.cameras[cam], field.get(), &opts));
                    record.bboxes.push_back(bbox_from_mask(
                        outputs[cam].mask, outputs[cam].width, outputs[cam].height));
                }
                write_render_set(config.output_root, config.actor, record, outputs);

                for (std::size_t cam = 0; cam < outputs.size(); ++cam) {
                    char line[160];
                    std::snprintf(line, sizeof(line), "%s cam %02zu  %6.2fs",
                                  set_label.c_str(), cam, outputs[cam].seconds);
                    log << line << "\n";
                }
                ++summary.sets;
                summary.images += static_cast<int>(outputs.size());
                frame_rendered = true;
            } catch (const std::exception& e) {
                if (!keep_going)
                    throw std::runtime_error(set_label + ": " + e.what());
                summary.errors.push_back(set_label + ": " + e.what());
            }
        }
        if (frame_rendered) ++summary.frames;
    }

    Json manifest;
    manifest["actor"] = config.actor;
    manifest["frames"] = summary.frames;
    manifest["sets"] = summary.sets;
    manifest["images"] = summary.images;
    manifest["errors"] = summary.errors;
    manifest["generated_at"] = utc_timestamp();  // excluded from determinism comparisons
    summary.manifest_path = config.output_root / "manifest.json";
    write_text_file(summary.manifest_path, manifest.dump(2) + "\n");

    log << "rendered " << summary.images << " images in " << summary.sets << " sets across "
        << summary.frames << " frames\n";
    if (!summary.errors.empty()) {
        log << summary.errors.size() << " set(s) failed:\n";
        for (const std::string& e : summary.errors) log << "  " << e << "\n";
    }
    return summary;
}

Json run_eval_2d(const fs::path& pred_path, const fs::path& dataset_root, std::ostream& log) {
    const fs::path index_path = dataset_root / "index.json";
    const Json index = parse_json_file(index_path);
    if (!index.contains("images") || !index.contains("annotations"))
        throw std::runtime_error(index_path.string() + ": not a dataset index");

    std::map<int, std::string> file_by_id;
    for (const Json& im : index.at("images"))
        file_by_id[im.at("id").get<int>()] = im.at("file_name").get<std::string>();

    std::vector<GtPose2D> gts;
    for (const Json& ann : index.at("annotations")) {
        GtPose2D gt;
        const auto it = file_by_id.find(ann.at("image_id").get<int>());
        if (it == file_by_id.end())
            throw std::runtime_error(index_path.string() +
                                     ": annotation references unknown image id");
        gt.image = it->second;
        const Json& kp = ann.at("keypoints");
        if (!kp.is_array() || kp.size() != 3 * kNumJoints)
            throw std::runtime_error(index_path.string() + ": malformed keypoints in index");
        for (int j = 0; j < kNumJoints; ++j)
            gt.keypoints[static_cast<std::size_t>(j)] = {kp[3 * j].get<double>(),
                                                         kp[3 * j + 1].get<double>(),
                                                         kp[3 * j + 2].get<int>()};
        gt.area = ann.value("area", 0.0);
        gts.push_back(std::move(gt));
    }

    const Json preds = parse_json_file(pred_path);
    const std::string where = pred_path.string();
    check_keys(preds, {"detections"}, where);
    const Json& dets_json = require(preds, "detections", where);
    if (!dets_json.is_array()) throw SchemaError(where, "'detections' must be an array");

    std::vector<Detection2D> dets;
    for (const Json& d : dets_json) {
        check_keys(d, {"image", "score", "keypoints"}, where);
        Detection2D det;
        det.image = require_string(d, "image", where);
        det.score = require_number(d, "score", where);
        if (det.score < 0.0 || det.score > 1.0)
            throw SchemaError(where, "detection score must be in [0, 1]");
        const Json& kp = require(d, "keypoints", where);
        if (!kp.is_array() || kp.size() != 3 * kNumJoints)
            throw SchemaError(where, "detection keypoints must hold 24 (u, v, conf) triples");
        for (int j = 0; j < kNumJoints; ++j) {
            if (!kp[3 * j].is_number() || !kp[3 * j + 1].is_number() ||
                !kp[3 * j + 2].is_number())
                throw SchemaError(where, "detection keypoints must be numeric");
            det.keypoints[static_cast<std::size_t>(j)] =
                Vec2(kp[3 * j].get<double>(), kp[3 * j + 1].get<double>());
            det.confidences[static_cast<std::size_t>(j)] = kp[3 * j + 2].get<double>();
        }
        dets.push_back(std::move(det));
    }

    const ApArResult res = ap_ar(dets, gts);
    Json report;
    report["mode"] = "2d";
    report["detections"] = dets.size();
    report["groundtruths"] = gts.size();
    report["ap"] = res.ap;
    report["ar"] = res.ar;
    report["thresholds"] = res.thresholds;
    report["ap_per_threshold"] = res.ap_per_threshold;
    report["ar_per_threshold"] = res.ar_per_threshold;

    char line[96];
    std::snprintf(line, sizeof(line), "AP %.4f  AR %.4f  (%zu detections, %zu groundtruths)",
                  res.ap, res.ar, dets.size(), gts.size());
    log << line << "\n";
    return report;
}

Json run_eval_3d(const fs::path& pred_path, const fs::path& dataset_root, std::ostream& log) {
    // Collect per-frame joints from the records; passes repeat the same
    // frame, which is fine as long as the values agree.
    std::map<int, std::array<Vec3, kNumJoints>> gt_by_frame;
    std::vector<fs::path> records;
    for (const auto& entry : fs::recursive_directory_iterator(dataset_root))
        if (entry.is_regular_file() && entry.path().filename() == "record.json")
            records.push_back(entry.path());
    std::sort(records.begin(), records.end());
    for (const fs::path& rp : records) {
        const RenderSetRecord rec = record_from_json(parse_json_file(rp));
        const auto it = gt_by_frame.find(rec.frame_id);
        if (it == gt_by_frame.end()) {
            gt_by_frame[rec.frame_id] = rec.joints_3d;
            continue;
        }
        for (int j = 0; j < kNumJoints; ++j)
            if ((it->second[static_cast<std::size_t>(j)] -
                 rec.joints_3d[static_cast<std::size_t>(j)])
                    .norm() > 1e-12)
                throw std::runtime_error(rp.string() + ": conflicting joints for frame " +
                                         std::to_string(rec.frame_id));
    }
    if (gt_by_frame.empty())
        throw std::runtime_error(dataset_root.string() + ": no records found");

    const Json preds = parse_json_file(pred_path);
    const std::string where = pred_path.string();
    check_keys(preds, {"estimates"}, where);
    const Json& est_json = require(preds, "estimates", where);
    if (!est_json.is_array() || est_json.empty())
        throw SchemaError(where, "'estimates' must be a non-empty array");

    double mpjpe_sum = 0.0, pa_sum = 0.0;
    Json per_frame = Json::array();
    std::set<int> seen;
    for (const Json& e : est_json) {
        check_keys(e, {"frame_id", "joints_mm"}, where);
        const int frame_id = require_int(e, "frame_id", where);
        if (!seen.insert(frame_id).second)
            throw SchemaError(where, "duplicate estimate for frame " + std::to_string(frame_id));
        const auto it = gt_by_frame.find(frame_id);
        if (it == gt_by_frame.end())
            throw SchemaError(where, "no groundtruth for frame " + std::to_string(frame_id));

        const Json& joints = require(e, "joints_mm", where);
        if (!joints.is_array() || joints.size() != kNumJoints)
            throw SchemaError(where, "'joints_mm' must list 24 joints");
        std::array<Vec3, kNumJoints> pred{};
        for (int j = 0; j < kNumJoints; ++j) {
            const Json& row = joints[j];
            if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
                !row[1].is_number() || !row[2].is_number())
                throw SchemaError(where, "'joints_mm' rows must be [x, y, z]");
            pred[static_cast<std::size_t>(j)] =
                Vec3(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
        }
        std::array<Vec3, kNumJoints> gt_mm{};
        for (int j = 0; j < kNumJoints; ++j)
            gt_mm[static_cast<std::size_t>(j)] = it->second[static_cast<std::size_t>(j)] * 1000.0;

        const double m = mpjpe(pred, gt_mm);
        const double pa = pa_mpjpe(pred, gt_mm);
        mpjpe_sum += m;
        pa_sum += pa;
        per_frame.push_back({{"frame_id", frame_id}, {"mpjpe_mm", m}, {"pa_mpjpe_mm", pa}});
    }

    const double n = static_cast<double>(per_frame.size());
    Json report;
    report["mode"] = "3d";
    report["frames"] = per_frame.size();
    report["mpjpe_mm"] = mpjpe_sum / n;
    report["pa_mpjpe_mm"] = pa_sum / n;
    report["per_frame"] = std::move(per_frame);

    char line[96];
    std::snprintf(line, sizeof(line), "MPJPE %.3f mm  PA-MPJPE %.3f mm  (%d frames)",
                  mpjpe_sum / n, pa_sum / n, static_cast<int>(n));
    log << line << "\n";
    return report;
}

}  // namespace birdseye
