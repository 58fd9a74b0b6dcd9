// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lens/color.hpp"
#include "lens/geometry.hpp"
#include "lens/rng.hpp"

namespace lens {

// Per-image appearance code. An empty vector means "no appearance" and is
// accepted by every field as the identity; otherwise the length must equal
// the field's appearance_dim(). The first six coefficients drive a
// per-channel affine colour transform (gain = 1 + a[0..2], bias = a[3..5]);
// missing or extra coefficients act as zero / are ignored.
using AppearanceVector = std::vector<double>;

// Throws DomainError unless `a` is empty or has exactly `dim` finite entries.
void check_appearance(const AppearanceVector& a, int dim);

// Applies the affine appearance model to a base colour, clamped to [0, 1].
Rgb apply_appearance(const Rgb& base, const AppearanceVector& a);

// Density and emitted colour at one point.
struct FieldSample {
  double sigma = 0.0;  // non-negative
  Rgb color;           // channels in [0, 1]
};

// A queryable volumetric scene. Implementations must be pure: equal inputs
// give equal outputs, with no hidden state, so threaded rendering stays
// deterministic.
class SceneField {
 public:
  virtual ~SceneField() = default;

  // Full sample for shading. `direction` need not be normalized by the
  // caller's convention; analytic fields here are view-independent but the
  // parameter keeps the interface general.
  virtual FieldSample query(const Vec3& position, const Vec3& direction,
                            const AppearanceVector& appearance) const = 0;

  // Density-only fast path; must equal query(...).sigma everywhere.
  virtual double density_only(const Vec3& position) const = 0;

  // Region outside which density is guaranteed zero, when known.
  virtual std::optional<Aabb> bounds_hint() const { return std::nullopt; }

  virtual int appearance_dim() const = 0;

  // Colour emitted by empty space (also the natural compositing background).
  virtual Rgb background() const = 0;
};

// ---------------------------------------------------------------------------
// Analytic scenes: constant-density primitives combined by max sigma.

struct Primitive {
  enum class Shape { kBox, kSphere, kSlab };

  Shape shape = Shape::kBox;
  Vec3 center;                // box / sphere centre; slab: centre along `axis`
  Vec3 size;                  // box full edge lengths
  double radius = 0.0;        // sphere
  int axis = 2;               // slab normal axis: 0 = x, 1 = y, 2 = z
  double thickness = 0.0;     // slab extent along `axis`
  double sigma = 0.0;
  Rgb color;

  // Inclusive membership test (boundary points belong to the primitive).
  bool contains(const Vec3& p) const;

  void validate() const;
};

class AnalyticScene : public SceneField {
 public:
  AnalyticScene(std::vector<Primitive> primitives, Rgb background,
                int appearance_dim = 8);

  FieldSample query(const Vec3& position, const Vec3& direction,
                    const AppearanceVector& appearance) const override;
  double density_only(const Vec3& position) const override;
  std::optional<Aabb> bounds_hint() const override;
  int appearance_dim() const override { return appearance_dim_; }
  Rgb background() const override { return background_; }

  const std::vector<Primitive>& primitives() const { return primitives_; }

 private:
  std::vector<Primitive> primitives_;
  Rgb background_;
  int appearance_dim_;
  Aabb hint_;
  bool has_hint_ = false;
};

// ---------------------------------------------------------------------------
// Voxel-grid scenes: trilinear interpolation over a dense grid.

class VoxelGridScene : public SceneField {
 public:
  // `sigma` holds nx*ny*nz values, x fastest; `rgb` holds three times as
  // many, interleaved r,g,b per node. Values are stored as float because the
  // on-disk format is 32-bit, but interpolation runs in double.
  VoxelGridScene(std::array<int, 3> resolution, Aabb bounds,
                 std::vector<float> sigma, std::vector<float> rgb,
                 Rgb background, int appearance_dim = 8);

  FieldSample query(const Vec3& position, const Vec3& direction,
                    const AppearanceVector& appearance) const override;
  double density_only(const Vec3& position) const override;
  std::optional<Aabb> bounds_hint() const override { return bounds_; }
  int appearance_dim() const override { return appearance_dim_; }
  Rgb background() const override { return background_; }

  const std::array<int, 3>& resolution() const { return resolution_; }

 private:
  struct Interp {
    double sigma;
    Rgb color;
  };
  Interp interpolate(const Vec3& p) const;

  std::array<int, 3> resolution_;
  Aabb bounds_;
  std::vector<float> sigma_;
  std::vector<float> rgb_;
  Rgb background_;
  int appearance_dim_;
};

// ---------------------------------------------------------------------------
// Scene files and appearance utilities.

// Loads a scene description (JSON). Analytic scenes list primitives inline;
// voxel scenes reference a raw little-endian float32 payload whose path is
// resolved relative to the JSON file. See README for the schema.
std::shared_ptr<SceneField> load_scene(const std::string& path);

// Convenience wrapper matching the shading call sites.
FieldSample query_field(const SceneField& field, const Vec3& position,
                        const Vec3& direction, const AppearanceVector& appearance);

// Picks two distinct entries of `training` uniformly at random and returns a
// convex combination with weight drawn uniformly from [0, 1). With a single
// entry, returns that entry. Throws DomainError on an empty list or on
// mismatched lengths.
AppearanceVector interpolate_appearance(std::span<const AppearanceVector> training,
                                        SeededRng& rng);

}  // namespace lens
