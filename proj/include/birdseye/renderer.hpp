// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/camera.hpp"
#include "birdseye/field.hpp"
#include "birdseye/rig.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace birdseye {

/// Quadrature and compositing controls for one render.
struct RenderOptions {
    /// Uniform bins per ray.
    int n_samples = 128;
    /// Integration bounds in meters; unset means auto (ray ∩ field bounds).
    std::optional<double> t_near;
    std::optional<double> t_far;
    /// Composited behind residual transmittance; channels in [0,1].
    Vec3 background = Vec3::Zero();
    /// Pixels with opacity ≥ threshold belong to the subject mask.
    double mask_threshold = 0.5;
    /// When set, samples are stratified-uniform within bins instead of bin
    /// midpoints; the sequence is a pure function of (seed, pixel), so output
    /// is reproducible for any worker count.
    std::optional<std::uint64_t> jitter_seed;
    /// k×k rays per pixel, averaged (anti-aliasing aid; 1 = center ray only).
    int supersample = 1;
    /// Worker threads for whole-image renders; 0 = hardware concurrency.
    int workers = 1;
};

/// Throws std::invalid_argument when options are malformed.
void validate(const RenderOptions& opts);

/// Derives an independent jitter stream from a base seed and a stream index
/// (the same mixing render_image applies per pixel; callers use it to give
/// each image its own stream).
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index);

/// One rendered fisheye view.
struct RenderOutput {
    int width = 0;
    int height = 0;
    /// Row-major interleaved RGB in [0,1]; 3 * width * height values.
    std::vector<double> rgb;
    /// Accumulated opacity (1 − residual transmittance) per pixel.
    std::vector<double> alpha;
    /// 1 where alpha ≥ mask_threshold, else 0.
    std::vector<std::uint8_t> mask;
    /// Wall-clock render duration.
    double seconds = 0.0;
};

/// Parametric interval where a ray overlaps an axis-aligned box (slab test).
struct RaySegment {
    double t_near = 0.0;
    double t_far = 0.0;
    bool hit = false;
};
RaySegment intersect_bounds(const FieldBounds& bounds, const Ray& ray);

/// Midpoint-rule estimate of exp(−∫σ ds) over [t_a, t_b] with n bins.
/// Requires t_a < t_b and n ≥ 1.
double transmittance(const RadianceField& field, const Ray& ray, double t_a, double t_b, int n);

/// Color and opacity carried by a single ray.
struct RayRadiance {
    Vec3 rgb = Vec3::Zero();
    double alpha = 0.0;
};

/// Integrates the field along one ray: the interval [t_n, t_f] (explicit or
/// auto from the field bounds, truncated to t ≥ 0) is split into n uniform
/// bins sampled at midpoints (or stratified when jitter_seed is set), with
/// alpha_i = 1 − exp(−σ_i δ) compositing front to back and the residual
/// transmittance falling through to the background color.
RayRadiance render_ray(const RadianceField& field, const Ray& ray, const RenderOptions& opts);

/// Renders every pixel whose center lies inside the image circle
/// (field angle ≤ theta_max); pixels outside get background color, alpha 0.
/// Output is bit-identical for fixed options regardless of worker count.
RenderOutput render_image(const RadianceField& field, const Camera& cam,
                          const RenderOptions& opts);

/// Renders all 9 rig cameras in rig order (center first, then surround 0..7).
std::vector<RenderOutput> render_set(const RadianceField& field, const RenderRig& rig,
                                     const RenderOptions& opts);

}  // namespace birdseye
