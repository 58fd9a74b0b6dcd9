// SPDX-License-Identifier: Apache-2.0
#pragma once

// Published defaults for the dataset-generation pipeline. Keep every
// user-facing constant here: the CLI help text and the regression tests both
// read this table, so a value changed anywhere else is a bug.

namespace lens::presets {

inline constexpr const char* kToolVersion = "0.1.0";

// Density-volume extraction.
inline constexpr int kDensityResolution = 128;    // r_v, cells along the smallest box edge
inline constexpr double kDensityThreshold = 20.0; // t_sigma, occupancy cutoff

// Volume rendering (coarse + fine hierarchical sampling).
inline constexpr int kCoarseSamples = 256;  // N_c
inline constexpr int kFineSamples = 256;    // N_f

// Derived ray bounds when the user gives none: fractions of the length of
// the diagonal of the working bounding box.
inline constexpr double kNearFraction = 0.05;
inline constexpr double kFarFraction = 1.5;

// Camera placement presets. Distances in metres, angles in degrees.
struct PlacementPreset {
  double d_max_m;    // max distance to the nearest real camera
  double d_sigma_m;  // min clearance from occupied volume
  double e_max_m;    // bounding-box extension
  double theta_deg;  // per-axis orientation perturbation range
  const char* mode;  // candidate grid layout
};

inline constexpr PlacementPreset kOutdoor{8.0, 1.0, 1.0, 15.0, "planar-2d"};
inline constexpr PlacementPreset kIndoor{0.5, 0.2, 0.2, 20.0, "volumetric-3d"};

// Ablation defaults: synthetic-to-real dataset ratios and the report gate.
inline constexpr const char* kDefaultRatios = "0,1,2,5,10";
// --check fails unless the largest ratio's median translation error is at
// most this fraction of the real-only baseline.
inline constexpr double kAblationMaxErrorRatio = 0.60;

}  // namespace lens::presets
