// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lens/density_volume.hpp"
#include "lens/geometry.hpp"
#include "lens/rng.hpp"
#include "lens/spatial_index.hpp"

namespace lens {

// Candidate grid layout: a single horizontal plane of positions (scenes
// captured at roughly constant height) or a full 3D grid.
enum class PlacementMode { kPlanar2D, kVolumetric3D };

PlacementMode parse_placement_mode(const std::string& name);  // "planar-2d" | "volumetric-3d"
const char* placement_mode_name(PlacementMode mode);

struct PlacementConfig {
  int n = 0;                  // requested camera count, >= 1
  double d_sigma = 0.0;       // min clearance from occupied volume, >= 0
  double d_max = 0.0;         // max distance to nearest real camera, > d_sigma
  int r0 = 1;                 // initial grid resolution parameter
  int sigma_r = 1;            // resolution increment per iteration
  double theta_deg = 0.0;     // per-axis perturbation range, >= 0
  PlacementMode mode = PlacementMode::kVolumetric3D;
  double e_max = 0.0;         // bounding-box extension, >= 0
  std::optional<double> plane_height;  // planar mode; default: mean camera height
  int max_iterations = 64;
  std::uint64_t seed = 0;
  bool volume_pruning = true;  // disable to skip the d_sigma criterion

  void validate() const;
};

struct IterationStats {
  int resolution = 0;
  std::size_t candidates = 0;
  std::size_t retained = 0;
};

struct VirtualCameraSet {
  std::vector<Pose> poses;
  int iterations_used = 0;
  int final_resolution = 0;
  double final_spacing = 0.0;
  std::vector<IterationStats> iteration_stats;
};

// Thin wrapper so call sites read like the pipeline description.
SpatialIndex build_index(std::vector<Vec3> points);

// Candidate positions inside `box` at resolution parameter r. Volumetric
// mode reuses the density-volume cell rule (cube cells, centres). Planar
// mode grids x and y the same way (cell edge = smallest positive horizontal
// extent / r) on the single plane z = plane_height, which must lie inside
// the box.
std::vector<Vec3> generate_candidates(const Aabb& box, int resolution_param,
                                      PlacementMode mode, double plane_height);

// Keeps candidates with nearest_occupied >= d_sigma (clearance from scene
// geometry; an empty occupied index passes everything) and
// nearest_real <= d_max (stay close to poses the field was trained on).
std::vector<Vec3> prune_candidates(std::span<const Vec3> candidates,
                                   const SpatialIndex& occupied,
                                   const SpatialIndex& real_cameras,
                                   double d_sigma, double d_max);

// Orientation for a virtual camera: copy the orientation of the nearest
// training pose (ties: lowest index), then perturb by intrinsic X, Y, Z
// rotations with angles drawn uniformly from [-theta/2, +theta/2] degrees
// (three draws in that axis order).
UnitQuaternion assign_orientation(const Vec3& position,
                                  std::span<const Pose> training_poses,
                                  double theta_deg, SeededRng& rng);

// Full placement loop: extend the training bounding box by e_max, then grow
// the candidate grid (r = r0, r0 + sigma_r, ...) until pruning leaves at
// least n positions; overshoot resolves to a uniform random subset of
// exactly n. Poses come back in random selection order, so any prefix is
// itself a uniform subset. Throws PlacementInfeasibleError after
// max_iterations unsuccessful refinements.
VirtualCameraSet place_cameras(std::span<const Pose> training_poses,
                               const OccupiedPointSet& occupied,
                               const PlacementConfig& config);

}  // namespace lens
