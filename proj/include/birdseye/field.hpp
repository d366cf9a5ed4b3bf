// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/camera.hpp"

#include <memory>
#include <vector>

namespace birdseye {

/// Emitted color and volumetric density at one point.
struct RadianceSample {
    Vec3 color = Vec3::Zero();  // RGB, each channel in [0, 1]
    double sigma = 0.0;         // density, 1/meter, >= 0
};

/// Axis-aligned bounding box, min < max componentwise.
struct FieldBounds {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    Vec3 extent() const { return max - min; }
};

/// Queryable radiance field F: (position, direction) -> (color, density).
/// Density is zero everywhere outside bounds(). Implementations are
/// immutable after construction and safe to sample concurrently.
class RadianceField {
  public:
    virtual ~RadianceField() = default;

    /// Throws std::invalid_argument on non-finite positions.
    RadianceSample sample(const Vec3& x, const Vec3& d) const;

    virtual FieldBounds bounds() const = 0;

  protected:
    /// Position is finite; must return sigma = 0 outside the field's support.
    virtual RadianceSample sample_impl(const Vec3& x, const Vec3& d) const = 0;
};

/// Constant density and color inside a sphere.
class UniformSphereField final : public RadianceField {
  public:
    UniformSphereField(const Vec3& center, double radius, double sigma, const Vec3& color);
    FieldBounds bounds() const override;

  protected:
    RadianceSample sample_impl(const Vec3& x, const Vec3& d) const override;

  private:
    Vec3 center_;
    double radius_;
    RadianceSample value_;
};

/// Constant density and color inside an axis-aligned box.
class BoxField final : public RadianceField {
  public:
    BoxField(const FieldBounds& box, double sigma, const Vec3& color);
    FieldBounds bounds() const override;

  protected:
    RadianceSample sample_impl(const Vec3& x, const Vec3& d) const override;

  private:
    FieldBounds box_;
    RadianceSample value_;
};

/// Isotropic Gaussian density sigma0 * exp(-|x - mu|^2 / (2 s^2)), truncated
/// to zero beyond 5 standard deviations so the bounds stay conservative.
class GaussianBlobField final : public RadianceField {
  public:
    GaussianBlobField(const Vec3& center, double stddev, double sigma0, const Vec3& color);
    FieldBounds bounds() const override;

  protected:
    RadianceSample sample_impl(const Vec3& x, const Vec3& d) const override;

  private:
    Vec3 center_;
    double stddev_;
    double sigma0_;
    Vec3 color_;
};

/// Superposition of member fields: densities add, colors are mixed with
/// density weights. Bounds are the componentwise min/max of member boxes.
class UnionField final : public RadianceField {
  public:
    explicit UnionField(std::vector<std::shared_ptr<const RadianceField>> members);
    FieldBounds bounds() const override;

  protected:
    RadianceSample sample_impl(const Vec3& x, const Vec3& d) const override;

  private:
    std::vector<std::shared_ptr<const RadianceField>> members_;
    FieldBounds bounds_;
};

}  // namespace birdseye
