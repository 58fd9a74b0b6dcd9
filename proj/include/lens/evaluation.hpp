// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "lens/density_volume.hpp"
#include "lens/geometry.hpp"
#include "lens/image.hpp"
#include "lens/placement.hpp"
#include "lens/render.hpp"

namespace lens {

struct PoseError {
  double translation_m = 0.0;  // euclidean distance between camera centres
  double rotation_deg = 0.0;   // geodesic angle between orientations
};

PoseError pose_errors(const Pose& predicted, const Pose& truth);

// Median over `v`; the even case averages the two central values.
double median(std::vector<double> v);

// How well a pose set covers a query set: for every query, the distance to
// its nearest training position and the angle to its nearest training
// orientation (minimized independently), summarized by medians. Growing the
// training set can only shrink both numbers.
struct CoverageStats {
  double median_nn_translation_m = 0.0;
  double median_nn_rotation_deg = 0.0;
};

CoverageStats coverage_stats(std::span<const Pose> training,
                             std::span<const Pose> queries);

// Retrieval localizer: the query and every database image are box-downsampled
// by `downsample`, compared by MSE, and the pose of the best match (ties:
// lowest index) is returned.
struct DatabaseEntry {
  Image image;
  Pose pose;
};

std::size_t retrieval_localize_index(const Image& query,
                                     std::span<const Image> database_images,
                                     int downsample);
Pose retrieval_localize(const Image& query, std::span<const DatabaseEntry> database,
                        int downsample);

// Query poses drawn uniformly from the training bounding box extended by
// e_max, each oriented like its nearest training pose. Pose i depends only
// on (seed, i), never on `count`.
std::vector<Pose> uniform_query_poses(std::span<const Pose> training,
                                      std::size_t count, double e_max,
                                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ablation over synthetic-to-real dataset ratios.

struct AblationRow {
  double ratio = 0.0;
  double median_translation_m = 0.0;
  double median_rotation_deg = 0.0;
  // Relative improvement over the ratio-0 baseline, e.g. 0.25 = 25% lower
  // median error. The baseline row carries 0.
  double rel_improvement_translation = 0.0;
  double rel_improvement_rotation = 0.0;
};

struct AblationConfig {
  VolumeConfig volume;          // density extraction for placement pruning
  PlacementConfig placement;    // n and seed are driven per run
  RenderConfig render;          // seed is driven per run
  PinholeIntrinsics intrinsics;
  int downsample = 8;           // retrieval downsample factor
  int jobs = 1;
  std::uint64_t seed = 0;       // master seed; sub-seeds derive from it
};

// For each ratio rho (sorted ascending, must contain 0): build a database of
// rendered real views plus the first ceil(rho * |real|) synthetic views,
// localize every rendered test query against it, and record median errors.
// Cameras are placed once at the largest ratio; smaller ratios reuse
// prefixes, so each database extends the previous one.
std::vector<AblationRow> run_ablation(const SceneField& field,
                                      std::span<const Pose> real_poses,
                                      std::span<const Pose> test_poses,
                                      std::span<const double> ratios,
                                      const AblationConfig& config);

// Writes the summary table:
//
//   ratio\tmed_tr_m\tmed_rot_deg\trel_impr_tr\trel_impr_rot
//
// plus a long-format companion ("ratio\tmetric\tvalue", one line per cell)
// next to it, named <stem>.long<ext>.
void emit_report(std::span<const AblationRow> rows, const std::string& path);

// Strict parser for the summary table (round-trip of emit_report).
std::vector<AblationRow> parse_report(const std::string& path);

// Companion path naming rule, shared with tests.
std::string long_report_path(const std::string& path);

}  // namespace lens
