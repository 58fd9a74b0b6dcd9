// SPDX-License-Identifier: Apache-2.0
#include "lens/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lens {

PlacementMode parse_placement_mode(const std::string& name) {
  if (name == "planar-2d") return PlacementMode::kPlanar2D;
  if (name == "volumetric-3d") return PlacementMode::kVolumetric3D;
  throw DomainError("unknown placement mode \"" + name +
                    "\" (expected planar-2d or volumetric-3d)");
}

const char* placement_mode_name(PlacementMode mode) {
  return mode == PlacementMode::kPlanar2D ? "planar-2d" : "volumetric-3d";
}

void PlacementConfig::validate() const {
  if (n < 1) throw DomainError("placement: n must be >= 1");
  if (!std::isfinite(d_sigma) || d_sigma < 0.0)
    throw DomainError("placement: d_sigma must be finite and >= 0");
  if (!std::isfinite(d_max) || !(d_sigma < d_max))
    throw DomainError("placement: requires d_sigma < d_max");
  if (r0 < 1) throw DomainError("placement: r0 must be >= 1");
  if (sigma_r < 1) throw DomainError("placement: sigma_r must be >= 1");
  if (!std::isfinite(theta_deg) || theta_deg < 0.0)
    throw DomainError("placement: theta must be finite and >= 0");
  if (!std::isfinite(e_max) || e_max < 0.0)
    throw DomainError("placement: e_max must be finite and >= 0");
  if (plane_height && !std::isfinite(*plane_height))
    throw DomainError("placement: plane height must be finite");
  if (max_iterations < 1) throw DomainError("placement: max_iterations must be >= 1");
}

SpatialIndex build_index(std::vector<Vec3> points) {
  return SpatialIndex(std::move(points));
}

namespace {

// Grid spacing for one refinement step.
double candidate_spacing(const Aabb& box, int r, PlacementMode mode) {
  if (mode == PlacementMode::kVolumetric3D)
    return box.smallest_positive_edge() / r;
  const Vec3 d = box.diagonal();
  double smallest = 0.0;
  for (double edge : {d.x, d.y})
    if (edge > 0.0 && (smallest == 0.0 || edge < smallest)) smallest = edge;
  if (smallest == 0.0)
    throw DomainError("planar placement: box has no horizontal extent");
  return smallest / r;
}

}  // namespace

std::vector<Vec3> generate_candidates(const Aabb& box, int resolution_param,
                                      PlacementMode mode, double plane_height) {
  box.validate();
  if (resolution_param < 1)
    throw DomainError("generate_candidates: resolution must be >= 1");
  if (mode == PlacementMode::kVolumetric3D)
    return build_grid(box, resolution_param);

  if (!(plane_height >= box.min.z) || !(plane_height <= box.max.z))
    throw DomainError("planar placement: plane height outside the box");
  const double lambda = candidate_spacing(box, resolution_param, mode);
  const Vec3 d = box.diagonal();
  const int nx = grid_cells_along(d.x, lambda);
  const int ny = grid_cells_along(d.y, lambda);

  std::vector<Vec3> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    const double y = d.y > 0.0 ? box.min.y + (iy + 0.5) * lambda
                               : 0.5 * (box.min.y + box.max.y);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = d.x > 0.0 ? box.min.x + (ix + 0.5) * lambda
                                 : 0.5 * (box.min.x + box.max.x);
      centers.push_back(Vec3{x, y, plane_height});
    }
  }
  return centers;
}

std::vector<Vec3> prune_candidates(std::span<const Vec3> candidates,
                                   const SpatialIndex& occupied,
                                   const SpatialIndex& real_cameras,
                                   double d_sigma, double d_max) {
  std::vector<Vec3> kept;
  for (const Vec3& c : candidates) {
    if (occupied.nearest_distance(c) < d_sigma) continue;   // too close to geometry
    if (real_cameras.nearest_distance(c) > d_max) continue; // too far from capture
    kept.push_back(c);
  }
  return kept;
}

UnitQuaternion assign_orientation(const Vec3& position,
                                  std::span<const Pose> training_poses,
                                  double theta_deg, SeededRng& rng) {
  if (training_poses.empty())
    throw DomainError("assign_orientation: no training poses");
  if (!std::isfinite(theta_deg) || theta_deg < 0.0)
    throw DomainError("assign_orientation: theta must be finite and >= 0");

  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < training_poses.size(); ++i) {
    const Vec3 d = training_poses[i].position - position;
    const double d2 = dot(d, d);
    if (d2 < best_sq) {
      best_sq = d2;
      best = i;
    }
  }

  const double half = 0.5 * deg_to_rad(theta_deg);
  const double ax = rng.uniform(-half, half);
  const double ay = rng.uniform(-half, half);
  const double az = rng.uniform(-half, half);
  const UnitQuaternion qx = UnitQuaternion::from_axis_angle({1, 0, 0}, ax);
  const UnitQuaternion qy = UnitQuaternion::from_axis_angle({0, 1, 0}, ay);
  const UnitQuaternion qz = UnitQuaternion::from_axis_angle({0, 0, 1}, az);
  return training_poses[best].orientation * qx * qy * qz;
}

VirtualCameraSet place_cameras(std::span<const Pose> training_poses,
                               const OccupiedPointSet& occupied,
                               const PlacementConfig& config) {
  config.validate();
  const Aabb box = extend_box(bounding_box(training_poses), config.e_max);

  double plane_height = 0.0;
  if (config.mode == PlacementMode::kPlanar2D) {
    if (config.plane_height) {
      plane_height = *config.plane_height;
    } else {
      for (const Pose& p : training_poses) plane_height += p.position.z;
      plane_height /= static_cast<double>(training_poses.size());
    }
    if (!(plane_height >= box.min.z) || !(plane_height <= box.max.z))
      throw DomainError("planar placement: plane height outside the extended box");
  }

  const SpatialIndex occupied_index =
      config.volume_pruning ? SpatialIndex(occupied.points) : SpatialIndex();
  std::vector<Vec3> real_positions;
  real_positions.reserve(training_poses.size());
  for (const Pose& p : training_poses) real_positions.push_back(p.position);
  const SpatialIndex real_index(std::move(real_positions));

  SeededRng rng(config.seed);
  VirtualCameraSet result;
  const std::size_t want = static_cast<std::size_t>(config.n);

  int r = config.r0;
  for (int iter = 0; iter < config.max_iterations; ++iter, r += config.sigma_r) {
    const std::vector<Vec3> candidates =
        generate_candidates(box, r, config.mode, plane_height);
    std::vector<Vec3> kept = prune_candidates(candidates, occupied_index,
                                              real_index, config.d_sigma,
                                              config.d_max);
    result.iteration_stats.push_back(
        IterationStats{r, candidates.size(), kept.size()});
    if (kept.size() < want) continue;

    // Partial Fisher-Yates: the first `want` slots end up a uniform random
    // subset, in selection order.
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + rng.uniform_below(kept.size() - i);
      std::swap(kept[i], kept[j]);
    }
    kept.resize(want);

    result.poses.reserve(want);
    for (const Vec3& position : kept)
      result.poses.push_back(Pose{
          position,
          assign_orientation(position, training_poses, config.theta_deg, rng)});
    result.iterations_used = iter + 1;
    result.final_resolution = r;
    result.final_spacing = candidate_spacing(box, r, config.mode);
    return result;
  }

  const IterationStats& last = result.iteration_stats.back();
  throw PlacementInfeasibleError(last.resolution, last.retained, want);
}

}  // namespace lens
