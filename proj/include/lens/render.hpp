// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "lens/geometry.hpp"
#include "lens/image.hpp"
#include "lens/presets.hpp"
#include "lens/rng.hpp"
#include "lens/scene.hpp"

namespace lens {

struct RenderConfig {
  int n_coarse = presets::kCoarseSamples;
  int n_fine = presets::kFineSamples;
  double t_near = 0.0;   // used by render_image/render_batch to build rays
  double t_far = 0.0;
  bool stratified = false;  // jitter coarse samples inside their bins
  Rgb background;
  std::uint64_t seed = 0;

  void validate() const;
};

// Everything the compositor saw along one ray, for diagnostics and tests.
// After a fine pass the arrays cover the union of coarse and fine samples.
struct RayShading {
  std::vector<double> ts;
  std::vector<double> sigmas;
  std::vector<Rgb> sample_colors;
  std::vector<double> weights;  // T_i * (1 - exp(-sigma_i * delta_i))
  Rgb color;                    // weighted colours + T_final * background
  double transmittance = 0.0;   // T after the last sample
};

struct RayResult {
  Rgb color;
  double transmittance = 0.0;
};

// Volume-renders one ray: N_c samples over [t_near, t_far] (bin midpoints,
// or jittered within bins when config.stratified), then optionally N_f
// importance samples drawn from the coarse weight distribution and
// composited over the union. Sample i covers delta_i = t_{i+1} - t_i, the
// last sample extends to t_far. Throws RenderError when the field returns a
// non-finite or out-of-range sample.
RayShading render_ray_detail(const SceneField& field, const Ray& ray,
                             const AppearanceVector& appearance,
                             const RenderConfig& config, SeededRng& rng);

RayResult render_ray(const SceneField& field, const Ray& ray,
                     const AppearanceVector& appearance,
                     const RenderConfig& config, SeededRng& rng);

// Inverse-CDF resampling of the piecewise-constant coarse weight
// distribution. Bin i spans [e_i, e_{i+1}] with e_0 = ts[0],
// e_i = (ts[i-1] + ts[i]) / 2 and e_N = ts[N-1]. All-zero weights fall back
// to the uniform distribution. Returns n_fine positions sorted ascending.
std::vector<double> importance_resample(std::span<const double> coarse_ts,
                                        std::span<const double> coarse_weights,
                                        int n_fine, SeededRng& rng);

// Renders a full pinhole view through pixel centres. Every pixel draws its
// randomness from substream(config.seed, pixel_index), so the result is
// independent of `jobs`. Ray bounds come from config.t_near / t_far.
Image render_image(const SceneField& field, const Pose& pose,
                   const PinholeIntrinsics& intrinsics,
                   const AppearanceVector& appearance,
                   const RenderConfig& config, int jobs = 1);

struct RenderJob {
  Pose pose;
  AppearanceVector appearance;
};

// Renders a set of views, `parallelism` images in flight. Image k uses seed
// mix(config.seed, k); output order matches input order and the bytes are
// identical for every parallelism level. A failing image aborts the batch
// with the lowest failing index named in the error.
std::vector<Image> render_batch(const SceneField& field,
                                std::span<const RenderJob> jobs,
                                const PinholeIntrinsics& intrinsics,
                                const RenderConfig& config, int parallelism);

}  // namespace lens
