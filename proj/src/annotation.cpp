// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/annotation.hpp"

#include "birdseye/camera_io.hpp"
#include "birdseye/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace birdseye {

namespace fs = std::filesystem;

const std::array<const char*, kNumJoints> kJointNames = {
    "pelvis",        "left_hip",      "right_hip",    "spine1",        "left_knee",
    "right_knee",    "spine2",        "left_ankle",   "right_ankle",   "spine3",
    "left_foot",     "right_foot",    "neck",         "left_collar",   "right_collar",
    "head",          "left_shoulder", "right_shoulder", "left_elbow",  "right_elbow",
    "left_wrist",    "right_wrist",   "left_hand",    "right_hand"};

const std::array<std::array<int, 2>, kNumJoints - 1> kSkeletonEdges = {{
    {0, 1},   {0, 2},   {0, 3},   {1, 4},   {2, 5},   {3, 6},   {4, 7},   {5, 8},
    {6, 9},   {7, 10},  {8, 11},  {9, 12},  {9, 13},  {9, 14},  {12, 15}, {13, 16},
    {14, 17}, {16, 18}, {17, 19}, {18, 20}, {19, 21}, {20, 22}, {21, 23}}};

void validate(const FrameGroundTruth& gt) {
    for (const Vec3& j : gt.joints)
        if (!j.allFinite()) throw std::invalid_argument("joint coordinates must be finite");
    for (double b : gt.betas)
        if (!std::isfinite(b)) throw std::invalid_argument("betas must be finite");
    for (const Vec3& p : gt.pose)
        if (!p.allFinite()) throw std::invalid_argument("pose must be finite");
}

namespace {

Json parse_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Vec3 vec3_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw SchemaError(where, "expected [x, y, z]");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::string two_digits(int n) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", n);
    return buf;
}

std::string six_digits(int n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", n);
    return buf;
}

}  // namespace

std::vector<FrameGroundTruth> load_ground_truth(const fs::path& path) {
    const Json doc = parse_json_file(path);
    const std::string where = path.string();
    check_keys(doc, {"frames"}, where);
    const Json& frames = require(doc, "frames", where);
    if (!frames.is_array() || frames.empty())
        throw SchemaError(where, "'frames' must be a non-empty array");

    std::vector<FrameGroundTruth> out;
    out.reserve(frames.size());
    std::set<int> seen;
    for (const Json& f : frames) {
        check_keys(f, {"frame_id", "joints_3d", "betas", "pose"}, where);
        FrameGroundTruth gt;
        gt.frame_id = require_int(f, "frame_id", where);
        if (!seen.insert(gt.frame_id).second)
            throw SchemaError(where, "duplicate frame_id " + std::to_string(gt.frame_id));

        const Json& joints = require(f, "joints_3d", where);
        if (!joints.is_array() || joints.size() != kNumJoints)
            throw SchemaError(where, "'joints_3d' must list 24 joints");
        for (int j = 0; j < kNumJoints; ++j)
            gt.joints[static_cast<std::size_t>(j)] = vec3_from_json(joints[j], where);

        double betas[10];
        require_numbers(f, "betas", 10, betas, where);
        std::copy(std::begin(betas), std::end(betas), gt.betas.begin());

        const Json& pose = require(f, "pose", where);
        if (!pose.is_array() || pose.size() != kNumJoints)
            throw SchemaError(where, "'pose' must be a 24x3 matrix");
        for (int j = 0; j < kNumJoints; ++j)
            gt.pose[static_cast<std::size_t>(j)] = vec3_from_json(pose[j], where);

        validate(gt);
        out.push_back(std::move(gt));
    }
    return out;
}

int occlusion_visibility(const Vec3& joint, const Camera& cam, const RadianceField& field,
                         const RenderOptions& opts) {
    constexpr double kSurfaceMargin = 0.01;  // meters; excludes the joint's own density
    const Vec3 center = camera_center(cam.extrinsics);
    const Vec3 offset = joint - center;
    const double dist = offset.norm();
    if (dist <= kSurfaceMargin) return 2;
    const double trans = transmittance(field, Ray{center, offset / dist}, 0.0,
                                       dist - kSurfaceMargin, opts.n_samples);
    return trans >= 0.5 ? 2 : 1;
}

std::array<Keypoint2D, kNumJoints> project_keypoints(const FrameGroundTruth& gt,
                                                     const Camera& cam,
                                                     const RadianceField* field,
                                                     const RenderOptions* opts) {
    std::array<Keypoint2D, kNumJoints> out{};
    for (int j = 0; j < kNumJoints; ++j) {
        Keypoint2D& kp = out[static_cast<std::size_t>(j)];
        PixelProjection p;
        try {
            p = project(gt.joints[static_cast<std::size_t>(j)], cam);
        } catch (const std::domain_error&) {
            kp = Keypoint2D{0.0, 0.0, 0};  // joint sits on the camera center
            continue;
        }
        kp.u = p.u;
        kp.v = p.v;
        kp.vis = p.valid ? 2 : 0;
        if (kp.vis == 2 && field && opts)
            kp.vis = occlusion_visibility(gt.joints[static_cast<std::size_t>(j)], cam, *field,
                                          *opts);
    }
    return out;
}

std::optional<BBox> bbox_from_mask(const std::vector<std::uint8_t>& mask, int width,
                                   int height) {
    if (width < 0 || height < 0 ||
        mask.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("mask size does not match dimensions");
    int min_x = width, min_y = height, max_x = -1, max_y = -1;
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = mask.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            if (!row[x]) continue;
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0) return std::nullopt;
    return BBox{static_cast<double>(min_x), static_cast<double>(min_y),
                static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
}

Json camera_to_json(const Camera& cam) {
    Json j;
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(cam.extrinsics.rotation(r, c));
    j["rotation"] = std::move(rot);
    j["translation"] = {cam.extrinsics.translation.x(), cam.extrinsics.translation.y(),
                        cam.extrinsics.translation.z()};
    j["focal"] = cam.intrinsics.focal;
    j["cx"] = cam.intrinsics.cx;
    j["cy"] = cam.intrinsics.cy;
    j["width"] = cam.intrinsics.width;
    j["height"] = cam.intrinsics.height;
    j["theta_max"] = cam.intrinsics.theta_max;
    return j;
}

Camera camera_from_json(const Json& j) {
    const std::string where = "camera";
    check_keys(j, {"rotation", "translation", "focal", "cx", "cy", "width", "height",
                   "theta_max"},
               where);
    Camera cam;
    double rot[9];
    require_numbers(j, "rotation", 9, rot, where);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cam.extrinsics.rotation(r, c) = rot[3 * r + c];
    if (!is_rotation(cam.extrinsics.rotation, 1e-9))
        throw SchemaError(where, "'rotation' is not a rotation matrix");
    double t[3];
    require_numbers(j, "translation", 3, t, where);
    cam.extrinsics.translation = Vec3(t[0], t[1], t[2]);
    cam.intrinsics.focal = require_number(j, "focal", where);
    cam.intrinsics.cx = require_number(j, "cx", where);
    cam.intrinsics.cy = require_number(j, "cy", where);
    cam.intrinsics.width = require_int(j, "width", where);
    cam.intrinsics.height = require_int(j, "height", where);
    cam.intrinsics.theta_max = require_number(j, "theta_max", where);
    validate(cam.intrinsics);
    return cam;
}

Json record_to_json(const RenderSetRecord& record) {
    Json j;
    j["frame_id"] = record.frame_id;
    j["rig"] = {{"height", record.rig_height},
                {"circle_radius", record.rig_circle_radius},
                {"pelvis_xy", {record.pelvis_xy.x(), record.pelvis_xy.y()}}};
    Json cams = Json::array();
    for (const Camera& c : record.cameras) cams.push_back(camera_to_json(c));
    j["cameras"] = std::move(cams);

    Json joints = Json::array();
    for (const Vec3& p : record.joints_3d) joints.push_back({p.x(), p.y(), p.z()});
    j["joints_3d"] = std::move(joints);
    j["betas"] = record.betas;
    Json pose = Json::array();
    for (const Vec3& p : record.pose) pose.push_back({p.x(), p.y(), p.z()});
    j["pose"] = std::move(pose);

    Json kps = Json::array();
    for (const auto& per_cam : record.keypoints) {
        Json flat = Json::array();
        for (const Keypoint2D& kp : per_cam) {
            flat.push_back(kp.u);
            flat.push_back(kp.v);
            flat.push_back(kp.vis);
        }
        kps.push_back(std::move(flat));
    }
    j["keypoints"] = std::move(kps);

    Json boxes = Json::array();
    for (const auto& b : record.bboxes) {
        if (b)
            boxes.push_back({b->x, b->y, b->w, b->h});
        else
            boxes.push_back(nullptr);
    }
    j["bboxes"] = std::move(boxes);
    j["images"] = record.image_files;
    j["masks"] = record.mask_files;
    return j;
}

RenderSetRecord record_from_json(const Json& j) {
    const std::string where = "record";
    check_keys(j,
               {"frame_id", "rig", "cameras", "joints_3d", "betas", "pose", "keypoints",
                "bboxes", "images", "masks"},
               where);
    RenderSetRecord rec;
    rec.frame_id = require_int(j, "frame_id", where);

    const Json& rig = require(j, "rig", where);
    check_keys(rig, {"height", "circle_radius", "pelvis_xy"}, where + ".rig");
    rec.rig_height = require_number(rig, "height", where + ".rig");
    rec.rig_circle_radius = require_number(rig, "circle_radius", where + ".rig");
    double pxy[2];
    require_numbers(rig, "pelvis_xy", 2, pxy, where + ".rig");
    rec.pelvis_xy = Vec2(pxy[0], pxy[1]);

    const Json& cams = require(j, "cameras", where);
    if (!cams.is_array() || cams.size() != 9)
        throw SchemaError(where, "'cameras' must list exactly 9 cameras");
    for (const Json& c : cams) rec.cameras.push_back(camera_from_json(c));

    const Json& joints = require(j, "joints_3d", where);
    if (!joints.is_array() || joints.size() != kNumJoints)
        throw SchemaError(where, "'joints_3d' must list 24 joints");
    for (int i = 0; i < kNumJoints; ++i)
        rec.joints_3d[static_cast<std::size_t>(i)] = vec3_from_json(joints[i], where);

    double betas[10];
    require_numbers(j, "betas", 10, betas, where);
    std::copy(std::begin(betas), std::end(betas), rec.betas.begin());

    const Json& pose = require(j, "pose", where);
    if (!pose.is_array() || pose.size() != kNumJoints)
        throw SchemaError(where, "'pose' must be a 24x3 matrix");
    for (int i = 0; i < kNumJoints; ++i)
        rec.pose[static_cast<std::size_t>(i)] = vec3_from_json(pose[i], where);

    const Json& kps = require(j, "keypoints", where);
    if (!kps.is_array() || kps.size() != 9)
        throw SchemaError(where, "'keypoints' must hold one list per camera");
    for (const Json& per_cam : kps) {
        if (!per_cam.is_array() || per_cam.size() != 3 * kNumJoints)
            throw SchemaError(where, "each keypoint list must hold 24 (u, v, vis) triples");
        std::array<Keypoint2D, kNumJoints> arr{};
        for (int i = 0; i < kNumJoints; ++i) {
            const Json& ju = per_cam[3 * i];
            const Json& jv = per_cam[3 * i + 1];
            const Json& jvis = per_cam[3 * i + 2];
            if (!ju.is_number() || !jv.is_number() || !jvis.is_number_integer())
                throw SchemaError(where, "keypoints must be numeric (u, v, vis) triples");
            arr[static_cast<std::size_t>(i)] = {ju.get<double>(), jv.get<double>(),
                                                jvis.get<int>()};
            const int vis = arr[static_cast<std::size_t>(i)].vis;
            if (vis < 0 || vis > 2)
                throw SchemaError(where, "vis flag must be 0, 1, or 2, got " +
                                             std::to_string(vis));
        }
        rec.keypoints.push_back(arr);
    }

    const Json& boxes = require(j, "bboxes", where);
    if (!boxes.is_array() || boxes.size() != 9)
        throw SchemaError(where, "'bboxes' must hold one entry per camera");
    for (const Json& b : boxes) {
        if (b.is_null()) {
            rec.bboxes.emplace_back(std::nullopt);
            continue;
        }
        if (!b.is_array() || b.size() != 4)
            throw SchemaError(where, "bbox must be [x, y, w, h] or null");
        rec.bboxes.emplace_back(BBox{b[0].get<double>(), b[1].get<double>(),
                                     b[2].get<double>(), b[3].get<double>()});
    }

    const Json& images = require(j, "images", where);
    const Json& masks = require(j, "masks", where);
    if (!images.is_array() || images.size() != 9 || !masks.is_array() || masks.size() != 9)
        throw SchemaError(where, "'images' and 'masks' must list 9 file names");
    for (const Json& s : images) {
        if (!s.is_string()) throw SchemaError(where, "image names must be strings");
        rec.image_files.push_back(s.get<std::string>());
    }
    for (const Json& s : masks) {
        if (!s.is_string()) throw SchemaError(where, "mask names must be strings");
        rec.mask_files.push_back(s.get<std::string>());
    }
    return rec;
}

namespace {

Json make_category() {
    Json cat;
    cat["id"] = 1;
    cat["name"] = "person";
    cat["supercategory"] = "person";
    Json names = Json::array();
    for (const char* n : kJointNames) names.push_back(n);
    cat["keypoints"] = std::move(names);
    Json skel = Json::array();
    for (const auto& e : kSkeletonEdges) skel.push_back({e[0] + 1, e[1] + 1});
    cat["skeleton"] = std::move(skel);
    return cat;
}

Json load_or_create_index(const fs::path& index_path) {
    if (fs::exists(index_path)) return parse_json_file(index_path);
    Json idx;
    idx["images"] = Json::array();
    idx["annotations"] = Json::array();
    idx["categories"] = Json::array({make_category()});
    return idx;
}

/// Inserts or replaces (keyed by file_name) one image + annotation pair.
void upsert_index_entry(Json& index, const std::string& file_name, int width, int height,
                        const std::array<Keypoint2D, kNumJoints>& kps,
                        const std::optional<BBox>& bbox) {
    Json& images = index["images"];
    Json& annotations = index["annotations"];

    int id = -1;
    for (Json& im : images)
        if (im.value("file_name", "") == file_name) {
            id = im["id"].get<int>();
            break;
        }
    if (id < 0) {
        int max_id = 0;
        for (const Json& im : images) max_id = std::max(max_id, im.value("id", 0));
        id = max_id + 1;
        images.push_back({{"id", id}, {"file_name", file_name}, {"width", width},
                          {"height", height}});
    } else {
        for (Json& im : images)
            if (im.value("id", -1) == id) {
                im["width"] = width;
                im["height"] = height;
            }
    }

    Json ann;
    ann["id"] = id;
    ann["image_id"] = id;
    ann["category_id"] = 1;
    Json flat = Json::array();
    int labeled = 0;
    for (const Keypoint2D& kp : kps) {
        flat.push_back(kp.u);
        flat.push_back(kp.v);
        flat.push_back(kp.vis);
        if (kp.vis > 0) ++labeled;
    }
    ann["keypoints"] = std::move(flat);
    ann["num_keypoints"] = labeled;
    if (bbox) {
        ann["bbox"] = {bbox->x, bbox->y, bbox->w, bbox->h};
        ann["area"] = bbox->w * bbox->h;
    } else {
        ann["bbox"] = {0.0, 0.0, 0.0, 0.0};
        ann["area"] = 0.0;
    }
    ann["iscrowd"] = 0;

    for (Json& existing : annotations)
        if (existing.value("image_id", -1) == id) {
            existing = std::move(ann);
            return;
        }
    annotations.push_back(std::move(ann));
}

}  // namespace

SetManifest write_render_set(const fs::path& root, const std::string& actor,
                             RenderSetRecord& record,
                             const std::vector<RenderOutput>& outputs) {
    if (outputs.size() != 9) throw std::invalid_argument("a render set holds 9 outputs");
    if (record.cameras.size() != 9 || record.keypoints.size() != 9 ||
        record.bboxes.size() != 9)
        throw std::invalid_argument("record must carry 9 cameras, keypoint lists, and bboxes");
    if (actor.empty() || actor.find('/') != std::string::npos)
        throw std::invalid_argument("actor must be a non-empty path segment");

    const std::string pass_dir =
        format_double(record.rig_height) + "_" + format_double(record.rig_circle_radius);
    const std::string frame_dir = six_digits(record.frame_id);

    SetManifest manifest;
    manifest.set_dir = root / actor / pass_dir / frame_dir;
    manifest.index_path = root / "index.json";
    fs::create_directories(manifest.set_dir);

    record.image_files.assign(9, "");
    record.mask_files.assign(9, "");

    try {
        std::vector<std::uint8_t> rgb8;
        for (int cam = 0; cam < 9; ++cam) {
            const RenderOutput& out = outputs[static_cast<std::size_t>(cam)];
            const std::string stem = frame_dir + "_" + two_digits(cam);
            record.image_files[static_cast<std::size_t>(cam)] = stem + ".png";
            record.mask_files[static_cast<std::size_t>(cam)] = stem + "_mask.png";

            const std::size_t pixels =
                static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
            rgb8.resize(pixels * 3);
            for (std::size_t i = 0; i < pixels * 3; ++i) rgb8[i] = quantize8(out.rgb[i]);
            const fs::path image_path = manifest.set_dir / record.image_files[cam];
            write_png_rgb8(image_path, out.width, out.height, rgb8.data());
            manifest.image_paths.push_back(image_path);

            std::vector<std::uint8_t> mask8(pixels);
            for (std::size_t i = 0; i < pixels; ++i) mask8[i] = out.mask[i] ? 255 : 0;
            const fs::path mask_path = manifest.set_dir / record.mask_files[cam];
            write_png_gray8(mask_path, out.width, out.height, mask8.data());
            manifest.mask_paths.push_back(mask_path);
        }

        manifest.record_path = manifest.set_dir / "record.json";
        write_text_file(manifest.record_path, record_to_json(record).dump(2) + "\n");

        // Index rewrite is committed by an atomic rename so a failure cannot
        // leave a half-written index behind.
        Json index = load_or_create_index(manifest.index_path);
        const std::string rel_dir = actor + "/" + pass_dir + "/" + frame_dir + "/";
        for (int cam = 0; cam < 9; ++cam)
            upsert_index_entry(index, rel_dir + record.image_files[cam],
                               outputs[static_cast<std::size_t>(cam)].width,
                               outputs[static_cast<std::size_t>(cam)].height,
                               record.keypoints[static_cast<std::size_t>(cam)],
                               record.bboxes[static_cast<std::size_t>(cam)]);
        const fs::path tmp = manifest.index_path.string() + ".tmp";
        write_text_file(tmp, index.dump(2) + "\n");
        fs::rename(tmp, manifest.index_path);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(manifest.set_dir, ec);  // drop the partial set, keep the error
        throw;
    }
    return manifest;
}

Json ValidationReport::to_json() const {
    Json j;
    j["sets"] = sets;
    j["images"] = images;
    j["ok"] = ok();
    Json list = Json::array();
    for (const ValidationIssue& issue : issues)
        list.push_back({{"path", issue.path}, {"message", issue.message}});
    j["issues"] = std::move(list);
    return j;
}

namespace {

/// Per-record checks; appends issues rather than throwing so one bad set
/// cannot hide the rest.
void validate_record(const fs::path& record_path, ValidationReport& report) {
    RenderSetRecord rec;
    try {
        rec = record_from_json(parse_json_file(record_path));
    } catch (const std::exception& e) {
        report.issues.push_back({record_path.string(), e.what()});
        return;
    }
    ++report.sets;
    const fs::path set_dir = record_path.parent_path();

    FrameGroundTruth gt;
    gt.frame_id = rec.frame_id;
    gt.joints = rec.joints_3d;

    for (int cam = 0; cam < 9; ++cam) {
        const Camera& camera = rec.cameras[static_cast<std::size_t>(cam)];
        const auto& stored = rec.keypoints[static_cast<std::size_t>(cam)];
        const fs::path image_path = set_dir / rec.image_files[static_cast<std::size_t>(cam)];
        const fs::path mask_path = set_dir / rec.mask_files[static_cast<std::size_t>(cam)];

        if (!fs::exists(image_path))
            report.issues.push_back({image_path.string(), "missing image file"});
        else
            ++report.images;
        if (!fs::exists(mask_path))
            report.issues.push_back({mask_path.string(), "missing mask file"});

        // The record is self-verifying: stored keypoints must reproduce from
        // stored joints and cameras.
        const auto recomputed = project_keypoints(gt, camera);
        for (int j = 0; j < kNumJoints; ++j) {
            const Keypoint2D& s = stored[static_cast<std::size_t>(j)];
            const Keypoint2D& r = recomputed[static_cast<std::size_t>(j)];
            const std::string tag =
                record_path.string() + " cam " + std::to_string(cam) + " joint " +
                std::to_string(j);
            if ((s.vis == 0) != (r.vis == 0)) {
                report.issues.push_back({tag, "stored visibility disagrees with projection"});
                continue;
            }
            if (std::abs(s.u - r.u) > 1e-6 || std::abs(s.v - r.v) > 1e-6)
                report.issues.push_back({tag, "stored keypoint does not reproject"});
            if (s.vis == 1 || s.vis == 2) {
                const Intrinsics& intr = camera.intrinsics;
                const bool in_bounds = s.u >= 0.0 && s.u < intr.width && s.v >= 0.0 &&
                                       s.v < intr.height &&
                                       pixel_field_angle(s.u, s.v, intr) <=
                                           intr.theta_max + 1e-12;
                if (!in_bounds)
                    report.issues.push_back(
                        {tag, "labeled keypoint outside image bounds or circle"});
            }
        }

        // Mask/bbox consistency.
        if (!fs::exists(mask_path)) continue;
        ImageU8 mask_img;
        try {
            mask_img = read_png8(mask_path);
        } catch (const std::exception& e) {
            report.issues.push_back({mask_path.string(), e.what()});
            continue;
        }
        if (mask_img.channels != 1) {
            report.issues.push_back({mask_path.string(), "mask must be grayscale"});
            continue;
        }
        std::vector<std::uint8_t> mask(mask_img.pixels.size());
        bool binary = true;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask_img.pixels[i] != 0 && mask_img.pixels[i] != 255) binary = false;
            mask[i] = mask_img.pixels[i] ? 1 : 0;
        }
        if (!binary)
            report.issues.push_back({mask_path.string(), "mask values must be 0 or 255"});

        const auto tight = bbox_from_mask(mask, mask_img.width, mask_img.height);
        const auto& stored_box = rec.bboxes[static_cast<std::size_t>(cam)];
        if (tight.has_value() != stored_box.has_value()) {
            report.issues.push_back(
                {mask_path.string(), "bbox presence disagrees with mask content"});
        } else if (tight && stored_box) {
            if (tight->x != stored_box->x || tight->y != stored_box->y ||
                tight->w != stored_box->w || tight->h != stored_box->h)
                report.issues.push_back(
                    {mask_path.string(), "stored bbox is not the tight mask box"});
            if (stored_box->w <= 0 || stored_box->h <= 0 || stored_box->x < 0 ||
                stored_box->y < 0 ||
                stored_box->x + stored_box->w > camera.intrinsics.width ||
                stored_box->y + stored_box->h > camera.intrinsics.height)
                report.issues.push_back({mask_path.string(), "bbox outside image bounds"});
        }
    }
}

}  // namespace

ValidationReport validate_dataset(const fs::path& root) {
    if (!fs::is_directory(root))
        throw std::runtime_error(root.string() + ": dataset root is not a directory");

    ValidationReport report;
    std::vector<fs::path> records;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == "record.json")
            records.push_back(entry.path());
    std::sort(records.begin(), records.end());
    for (const fs::path& r : records) validate_record(r, report);

    const fs::path index_path = root / "index.json";
    if (!fs::exists(index_path)) {
        report.issues.push_back({index_path.string(), "missing dataset index"});
        return report;
    }
    Json index;
    try {
        index = parse_json_file(index_path);
    } catch (const std::exception& e) {
        report.issues.push_back({index_path.string(), e.what()});
        return report;
    }
    if (!index.is_object() || !index.contains("images") || !index.contains("annotations") ||
        !index.contains("categories")) {
        report.issues.push_back(
            {index_path.string(), "index must hold images, annotations, categories"});
        return report;
    }
    const Json& images = index["images"];
    const Json& annotations = index["annotations"];
    if (!images.is_array() || !annotations.is_array()) {
        report.issues.push_back({index_path.string(), "images/annotations must be arrays"});
        return report;
    }
    if (static_cast<int>(images.size()) != 9 * report.sets)
        report.issues.push_back({index_path.string(),
                                 "index lists " + std::to_string(images.size()) +
                                     " images, expected " + std::to_string(9 * report.sets)});
    if (annotations.size() != images.size())
        report.issues.push_back(
            {index_path.string(), "annotation count does not match image count"});

    std::set<int> image_ids;
    for (const Json& im : images) {
        if (!im.is_object() || !im.contains("id") || !im["id"].is_number_integer() ||
            !im.contains("file_name") || !im["file_name"].is_string()) {
            report.issues.push_back({index_path.string(), "image entry missing id/file_name"});
            continue;
        }
        if (!image_ids.insert(im["id"].get<int>()).second)
            report.issues.push_back({index_path.string(), "duplicate image id"});
        const fs::path file = root / im["file_name"].get<std::string>();
        if (!fs::exists(file))
            report.issues.push_back({file.string(), "indexed image missing on disk"});
    }
    for (const Json& ann : annotations) {
        if (!ann.is_object() || !ann.contains("image_id") ||
            !ann["image_id"].is_number_integer() ||
            image_ids.count(ann["image_id"].get<int>()) == 0)
            report.issues.push_back(
                {index_path.string(), "annotation references unknown image id"});
        if (!ann.contains("keypoints") || !ann["keypoints"].is_array() ||
            ann["keypoints"].size() != 3 * kNumJoints)
            report.issues.push_back(
                {index_path.string(), "annotation keypoints must hold 24 triples"});
    }
    const Json& categories = index["categories"];
    if (!categories.is_array() || categories.size() != 1 ||
        !categories[0].contains("keypoints") ||
        categories[0]["keypoints"].size() != kNumJoints)
        report.issues.push_back(
            {index_path.string(), "categories must define the 24-joint skeleton"});
    return report;
}

}  // namespace birdseye
