// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/renderer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace birdseye {

namespace {

// Residual transmittance below which further samples cannot move any output
// past double precision; lets opaque interiors terminate early.
constexpr double kOpaqueCutoff = 1e-14;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based [0,1) stream; a pure function of its seed, so per-pixel
/// seeding keeps renders independent of thread scheduling.
class UnitSequence {
  public:
    explicit UnitSequence(std::uint64_t seed) : state_(seed) {}

    double next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

Vec3 unit_direction(const Ray& ray) {
    if (!ray.origin.allFinite() || !ray.direction.allFinite())
        throw std::invalid_argument("ray has non-finite components");
    const double norm = ray.direction.norm();
    if (norm <= 0.0) throw std::invalid_argument("ray direction must be nonzero");
    return ray.direction / norm;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index));
}

void validate(const RenderOptions& opts) {
    if (opts.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (opts.t_near && opts.t_far && !(*opts.t_near < *opts.t_far))
        throw std::invalid_argument("t_near must be < t_far");
    if (!(opts.mask_threshold > 0.0 && opts.mask_threshold < 1.0))
        throw std::invalid_argument("mask_threshold must be in (0, 1)");
    if (!opts.background.allFinite() || (opts.background.array() < 0.0).any() ||
        (opts.background.array() > 1.0).any())
        throw std::invalid_argument("background channels must be in [0, 1]");
    if (opts.supersample < 1) throw std::invalid_argument("supersample must be >= 1");
    if (opts.workers < 0) throw std::invalid_argument("workers must be >= 0 (0 = auto)");
}

RaySegment intersect_bounds(const FieldBounds& bounds, const Ray& ray) {
    const Vec3 d = unit_direction(ray);
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        const double o = ray.origin[axis];
        if (d[axis] == 0.0) {
            // Parallel to this slab: inside it or never.
            if (o < bounds.min[axis] || o > bounds.max[axis]) return {};
            continue;
        }
        double lo = (bounds.min[axis] - o) / d[axis];
        double hi = (bounds.max[axis] - o) / d[axis];
        if (lo > hi) std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
        if (t0 > t1) return {};
    }
    return {t0, t1, true};
}

double transmittance(const RadianceField& field, const Ray& ray, double t_a, double t_b,
                     int n) {
    if (!(t_a < t_b)) throw std::invalid_argument("transmittance requires t_a < t_b");
    if (n < 1) throw std::invalid_argument("transmittance requires n >= 1");
    const Vec3 d = unit_direction(ray);
    const double delta = (t_b - t_a) / n;
    double optical_depth = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t_a + (static_cast<double>(i) + 0.5) * delta;
        optical_depth += field.sample(ray.origin + t * d, d).sigma;
    }
    return std::exp(-optical_depth * delta);
}

RayRadiance render_ray(const RadianceField& field, const Ray& ray, const RenderOptions& opts) {
    validate(opts);
    const Vec3 d = unit_direction(ray);

    // Resolve integration bounds: explicit values win, the rest comes from
    // the ray/bounds overlap, truncated to the forward half-line.
    double t0, t1;
    if (opts.t_near && opts.t_far) {
        t0 = *opts.t_near;
        t1 = *opts.t_far;
    } else {
        const RaySegment seg = intersect_bounds(field.bounds(), Ray{ray.origin, d});
        if (!seg.hit) return {opts.background, 0.0};
        t0 = opts.t_near.value_or(seg.t_near);
        t1 = opts.t_far.value_or(seg.t_far);
    }
    t0 = std::max(t0, 0.0);
    if (!(t0 < t1)) return {opts.background, 0.0};

    const int n = opts.n_samples;
    const double delta = (t1 - t0) / n;
    std::optional<UnitSequence> rng;
    if (opts.jitter_seed) rng.emplace(*opts.jitter_seed);

    double trans = 1.0;
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        if (trans < kOpaqueCutoff) break;
        const double offset = rng ? rng->next() : 0.5;
        const double t = t0 + (static_cast<double>(i) + offset) * delta;
        const RadianceSample s = field.sample(ray.origin + t * d, d);
        if (s.sigma <= 0.0) continue;
        const double a = 1.0 - std::exp(-s.sigma * delta);
        acc += (trans * a) * s.color;
        trans *= 1.0 - a;
    }
    return {acc + trans * opts.background, 1.0 - trans};
}

RenderOutput render_image(const RadianceField& field, const Camera& cam,
                          const RenderOptions& opts) {
    validate(opts);
    validate(cam.intrinsics);
    const int width = cam.intrinsics.width;
    const int height = cam.intrinsics.height;
    const int k = opts.supersample;
    const double inv_rays = 1.0 / (static_cast<double>(k) * k);

    RenderOutput out;
    out.width = width;
    out.height = height;
    out.rgb.assign(static_cast<std::size_t>(width) * height * 3, 0.0);
    out.alpha.assign(static_cast<std::size_t>(width) * height, 0.0);
    out.mask.assign(static_cast<std::size_t>(width) * height, 0);

    const auto start = std::chrono::steady_clock::now();

    auto render_rows = [&](int y_begin, int y_end) {
        RenderOptions ray_opts = opts;  // per-band copy; only jitter_seed varies per ray
        for (int y = y_begin; y < y_end; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::size_t idx =
                    static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + x;
                if (pixel_field_angle(x + 0.5, y + 0.5, cam.intrinsics) >
                    cam.intrinsics.theta_max) {
                    out.rgb[3 * idx + 0] = opts.background.x();
                    out.rgb[3 * idx + 1] = opts.background.y();
                    out.rgb[3 * idx + 2] = opts.background.z();
                    continue;  // alpha 0, mask 0 already
                }
                Vec3 rgb_acc = Vec3::Zero();
                double alpha_acc = 0.0;
                for (int sy = 0; sy < k; ++sy) {
                    for (int sx = 0; sx < k; ++sx) {
                        const double u = x + (sx + 0.5) / k;
                        const double v = y + (sy + 0.5) / k;
                        // Sub-rays can leave the circle even when the center
                        // is inside; those see plain background.
                        if (pixel_field_angle(u, v, cam.intrinsics) > cam.intrinsics.theta_max) {
                            rgb_acc += opts.background;
                            continue;
                        }
                        if (opts.jitter_seed)
                            ray_opts.jitter_seed = derive_stream_seed(
                                *opts.jitter_seed,
                                (idx * static_cast<std::size_t>(k) + sy) * k + sx);
                        const RayRadiance rr =
                            render_ray(field, ray_for_pixel(u, v, cam), ray_opts);
                        rgb_acc += rr.rgb;
                        alpha_acc += rr.alpha;
                    }
                }
                rgb_acc *= inv_rays;
                alpha_acc *= inv_rays;
                out.rgb[3 * idx + 0] = rgb_acc.x();
                out.rgb[3 * idx + 1] = rgb_acc.y();
                out.rgb[3 * idx + 2] = rgb_acc.z();
                out.alpha[idx] = alpha_acc;
                out.mask[idx] = alpha_acc >= opts.mask_threshold ? 1 : 0;
            }
        }
    };

    const int workers = std::min(resolve_workers(opts.workers), std::max(height, 1));
    if (workers <= 1) {
        render_rows(0, height);
    } else {
        // Disjoint row bands; every pixel's result depends only on (options,
        // pixel index), so the partition cannot affect the output.
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            const int y_begin = static_cast<int>(static_cast<std::int64_t>(height) * w / workers);
            const int y_end =
                static_cast<int>(static_cast<std::int64_t>(height) * (w + 1) / workers);
            pool.emplace_back(render_rows, y_begin, y_end);
        }
        for (std::thread& t : pool) t.join();
    }

    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<RenderOutput> render_set(const RadianceField& field, const RenderRig& rig,
                                     const RenderOptions& opts) {
    std::vector<RenderOutput> outputs;
    outputs.reserve(rig.cameras.size());
    for (const Camera& cam : rig.cameras) outputs.push_back(render_image(field, cam, opts));
    return outputs;
}

}  // namespace birdseye
