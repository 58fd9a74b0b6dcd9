// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lens/geometry.hpp"
#include "lens/presets.hpp"
#include "lens/scene.hpp"

namespace lens {

struct VolumeConfig {
  int resolution = presets::kDensityResolution;     // r_v, must be >= 1
  double t_sigma = presets::kDensityThreshold;      // occupancy cutoff, >= 0
  double e_max = 0.0;                               // box extension, >= 0

  void validate() const;
};

// Occupied cell centres of a discretized density volume.
struct OccupiedPointSet {
  std::vector<Vec3> points;
  double spacing = 0.0;  // cell edge length lambda
  Aabb source_box;       // the extended box the grid covered
  double t_sigma = 0.0;  // threshold the points passed

  std::size_t count() const { return points.size(); }
};

// Cube-cell grid over `box`: the cell edge is lambda = (smallest strictly
// positive box edge) / resolution_param, each axis gets
// floor(edge / lambda) cells (at least 1), and centres sit at
// min + (i + 1/2) * lambda. A zero-extent axis contributes one layer at its
// midpoint. Centres are emitted x-fastest, then y, then z.
std::vector<Vec3> build_grid(const Aabb& box, int resolution_param);

// Cell count along one axis for the rule above (shared by the candidate
// grids of the placement stage). floor(edge / lambda) with round-off
// forgiveness so an exact multiple never loses its last layer.
int grid_cells_along(double edge, double lambda);

// Evaluates the field's density at every cell centre of the grid over the
// training bounding box extended by config.e_max, and keeps centres with
// sigma strictly greater than config.t_sigma. `jobs` bounds the worker
// threads; results are identical for any value.
OccupiedPointSet extract_density_volume(const SceneField& field,
                                        std::span<const Pose> training_poses,
                                        const VolumeConfig& config, int jobs = 1);

// Same extraction over an explicit box (already extended).
OccupiedPointSet extract_density_volume_box(const SceneField& field,
                                            const Aabb& extended_box,
                                            const VolumeConfig& config,
                                            int jobs = 1);

// Plain-text persistence: a one-line header with spacing, box and threshold,
// then one "x y z" line per point (shortest round-trippable decimals).
void save_occupied_points(const OccupiedPointSet& set, const std::string& path);
OccupiedPointSet load_occupied_points(const std::string& path);

}  // namespace lens
