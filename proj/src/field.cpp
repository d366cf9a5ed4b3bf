// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/field.hpp"

#include <cmath>
#include <stdexcept>

namespace birdseye {

namespace {

void check_color(const Vec3& color, const char* what) {
    if (!color.allFinite() || (color.array() < 0.0).any() || (color.array() > 1.0).any())
        throw std::invalid_argument(std::string(what) +
                                    ": color channels must be in [0, 1]");
}

}  // namespace

RadianceSample RadianceField::sample(const Vec3& x, const Vec3& d) const {
    if (!x.allFinite()) throw std::invalid_argument("field sample: non-finite position");
    return sample_impl(x, d);
}

UniformSphereField::UniformSphereField(const Vec3& center, double radius, double sigma,
                                       const Vec3& color)
    : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("sphere field: radius must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("sphere field: sigma must be >= 0");
    check_color(color, "sphere field");
    value_.sigma = sigma;
    value_.color = color;
}

FieldBounds UniformSphereField::bounds() const {
    return {center_.array() - radius_, center_.array() + radius_};
}

RadianceSample UniformSphereField::sample_impl(const Vec3& x, const Vec3&) const {
    if ((x - center_).squaredNorm() <= radius_ * radius_) return value_;
    return {};
}

BoxField::BoxField(const FieldBounds& box, double sigma, const Vec3& color) : box_(box) {
    if (!((box.min.array() < box.max.array()).all()))
        throw std::invalid_argument("box field: min must be < max componentwise");
    if (sigma < 0.0) throw std::invalid_argument("box field: sigma must be >= 0");
    check_color(color, "box field");
    value_.sigma = sigma;
    value_.color = color;
}

FieldBounds BoxField::bounds() const { return box_; }

RadianceSample BoxField::sample_impl(const Vec3& x, const Vec3&) const {
    if (box_.contains(x)) return value_;
    return {};
}

GaussianBlobField::GaussianBlobField(const Vec3& center, double stddev, double sigma0,
                                     const Vec3& color)
    : center_(center), stddev_(stddev), sigma0_(sigma0), color_(color) {
    if (!(stddev > 0.0)) throw std::invalid_argument("gaussian field: stddev must be > 0");
    if (sigma0 < 0.0) throw std::invalid_argument("gaussian field: sigma0 must be >= 0");
    check_color(color, "gaussian field");
}

FieldBounds GaussianBlobField::bounds() const {
    const double cut = 5.0 * stddev_;
    return {center_.array() - cut, center_.array() + cut};
}

RadianceSample GaussianBlobField::sample_impl(const Vec3& x, const Vec3&) const {
    const double d2 = (x - center_).squaredNorm();
    const double cut = 5.0 * stddev_;
    if (d2 > cut * cut) return {};
    RadianceSample s;
    s.sigma = sigma0_ * std::exp(-d2 / (2.0 * stddev_ * stddev_));
    s.color = color_;
    return s;
}

UnionField::UnionField(std::vector<std::shared_ptr<const RadianceField>> members)
    : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("union field: needs at least one member");
    for (const auto& m : members_)
        if (!m) throw std::invalid_argument("union field: null member");
    bounds_ = members_.front()->bounds();
    for (const auto& m : members_) {
        const FieldBounds b = m->bounds();
        bounds_.min = bounds_.min.cwiseMin(b.min);
        bounds_.max = bounds_.max.cwiseMax(b.max);
    }
}

FieldBounds UnionField::bounds() const { return bounds_; }

RadianceSample UnionField::sample_impl(const Vec3& x, const Vec3& d) const {
    RadianceSample out;
    Vec3 weighted = Vec3::Zero();
    for (const auto& m : members_) {
        const RadianceSample s = m->sample(x, d);
        out.sigma += s.sigma;
        weighted += s.sigma * s.color;
    }
    if (out.sigma > 0.0) out.color = weighted / out.sigma;
    return out;
}

}  // namespace birdseye
