// SPDX-License-Identifier: Apache-2.0
#include "lens/render.hpp"

#include <algorithm>
#include <cmath>

#include "lens/num_io.hpp"
#include "lens/parallel.hpp"

namespace lens {

void RenderConfig::validate() const {
  if (n_coarse < 1) throw DomainError("render: n_coarse must be >= 1");
  if (n_fine < 0) throw DomainError("render: n_fine must be >= 0");
  if (n_fine > 0 && n_coarse < 2)
    throw DomainError("render: importance sampling needs n_coarse >= 2");
  if (!std::isfinite(background.r) || !std::isfinite(background.g) ||
      !std::isfinite(background.b) || background.r < 0.0 || background.r > 1.0 ||
      background.g < 0.0 || background.g > 1.0 || background.b < 0.0 ||
      background.b > 1.0)
    throw DomainError("render: background colour outside [0, 1]");
}

namespace {

void check_ray(const Ray& ray) {
  if (!is_finite(ray.origin) || !is_finite(ray.direction))
    throw DomainError("render: ray not finite");
  if (std::abs(norm(ray.direction) - 1.0) > 1e-6)
    throw DomainError("render: ray direction must be unit length");
  if (!(ray.t_near >= 0.0) || !(ray.t_near < ray.t_far) ||
      !std::isfinite(ray.t_far))
    throw DomainError("render: need 0 <= t_near < t_far");
}

FieldSample sample_field(const SceneField& field, const Ray& ray, double t,
                         const AppearanceVector& appearance) {
  const FieldSample s =
      field.query(ray.origin + t * ray.direction, ray.direction, appearance);
  if (!std::isfinite(s.sigma) || s.sigma < 0.0 || !std::isfinite(s.color.r) ||
      !std::isfinite(s.color.g) || !std::isfinite(s.color.b) ||
      s.color.r < 0.0 || s.color.r > 1.0 || s.color.g < 0.0 ||
      s.color.g > 1.0 || s.color.b < 0.0 || s.color.b > 1.0)
    throw RenderError("invalid field sample at t=" + format_double(t));
  return s;
}

// Front-to-back compositing with a running transmittance product, so the
// weights and the final T sum to 1 up to round-off by construction.
void composite(const std::vector<double>& ts, const std::vector<double>& sigmas,
               const std::vector<Rgb>& colors, double t_far, const Rgb& background,
               RayShading* out) {
  const std::size_t n = ts.size();
  out->weights.assign(n, 0.0);
  double transmittance = 1.0;
  Rgb acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = (i + 1 < n ? ts[i + 1] : t_far) - ts[i];
    const double alpha = 1.0 - std::exp(-sigmas[i] * delta);
    const double w = transmittance * alpha;
    out->weights[i] = w;
    acc += w * colors[i];
    transmittance *= 1.0 - alpha;
  }
  out->color = acc + transmittance * background;
  out->transmittance = transmittance;
}

}  // namespace

std::vector<double> importance_resample(std::span<const double> coarse_ts,
                                        std::span<const double> coarse_weights,
                                        int n_fine, SeededRng& rng) {
  if (n_fine < 0) throw DomainError("importance_resample: n_fine must be >= 0");
  const std::size_t n = coarse_ts.size();
  if (n < 2) throw DomainError("importance_resample: need at least 2 coarse samples");
  if (coarse_weights.size() != n)
    throw DomainError("importance_resample: ts/weights size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(coarse_ts[i]) ||
        (i > 0 && !(coarse_ts[i] >= coarse_ts[i - 1])))
      throw DomainError("importance_resample: ts must be sorted and finite");
    if (!std::isfinite(coarse_weights[i]) || coarse_weights[i] < 0.0)
      throw DomainError("importance_resample: weights must be finite and >= 0");
  }
  if (n_fine == 0) return {};

  // Bin edges: first and last samples own half-bins clipped to the sampled
  // support, interior edges sit midway between neighbours.
  std::vector<double> edges(n + 1);
  edges[0] = coarse_ts[0];
  for (std::size_t i = 1; i < n; ++i)
    edges[i] = 0.5 * (coarse_ts[i - 1] + coarse_ts[i]);
  edges[n] = coarse_ts[n - 1];

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_fine));

  double total = 0.0;
  for (double w : coarse_weights) total += w;
  if (total <= 0.0) {
    // Nothing along the ray: fall back to uniform positions.
    for (int j = 0; j < n_fine; ++j)
      out.push_back(edges[0] + rng.uniform() * (edges[n] - edges[0]));
  } else {
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += coarse_weights[i] / total;
      cdf[i] = acc;
    }
    cdf[n - 1] = 1.0;  // guard against round-off undershoot
    for (int j = 0; j < n_fine; ++j) {
      const double u = rng.uniform();
      const std::size_t k =
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      const double lo = k == 0 ? 0.0 : cdf[k - 1];
      const double span = cdf[k] - lo;
      const double frac = span > 0.0 ? (u - lo) / span : 0.5;
      out.push_back(edges[k] + frac * (edges[k + 1] - edges[k]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RayShading render_ray_detail(const SceneField& field, const Ray& ray,
                             const AppearanceVector& appearance,
                             const RenderConfig& config, SeededRng& rng) {
  config.validate();
  check_ray(ray);
  check_appearance(appearance, field.appearance_dim());

  const int nc = config.n_coarse;
  const double delta = (ray.t_far - ray.t_near) / nc;
  std::vector<double> ts(nc);
  for (int i = 0; i < nc; ++i) {
    const double offset = config.stratified ? rng.uniform() : 0.5;
    ts[i] = ray.t_near + (i + offset) * delta;
  }

  std::vector<double> sigmas(nc);
  std::vector<Rgb> colors(nc);
  for (int i = 0; i < nc; ++i) {
    const FieldSample s = sample_field(field, ray, ts[i], appearance);
    sigmas[i] = s.sigma;
    colors[i] = s.color;
  }

  RayShading shading;
  composite(ts, sigmas, colors, ray.t_far, config.background, &shading);

  if (config.n_fine > 0) {
    const std::vector<double> fine_ts =
        importance_resample(ts, shading.weights, config.n_fine, rng);

    // Composite over the union; coarse evaluations are reused, equal ts keep
    // the coarse sample first.
    std::vector<double> all_ts, all_sigmas;
    std::vector<Rgb> all_colors;
    all_ts.reserve(ts.size() + fine_ts.size());
    all_sigmas.reserve(all_ts.capacity());
    all_colors.reserve(all_ts.capacity());
    std::size_t ci = 0, fi = 0;
    while (ci < ts.size() || fi < fine_ts.size()) {
      if (fi >= fine_ts.size() || (ci < ts.size() && ts[ci] <= fine_ts[fi])) {
        all_ts.push_back(ts[ci]);
        all_sigmas.push_back(sigmas[ci]);
        all_colors.push_back(colors[ci]);
        ++ci;
      } else {
        const double t = fine_ts[fi];
        const FieldSample s = sample_field(field, ray, t, appearance);
        all_ts.push_back(t);
        all_sigmas.push_back(s.sigma);
        all_colors.push_back(s.color);
        ++fi;
      }
    }
    composite(all_ts, all_sigmas, all_colors, ray.t_far, config.background,
              &shading);
    shading.ts = std::move(all_ts);
    shading.sigmas = std::move(all_sigmas);
    shading.sample_colors = std::move(all_colors);
  } else {
    shading.ts = std::move(ts);
    shading.sigmas = std::move(sigmas);
    shading.sample_colors = std::move(colors);
  }
  return shading;
}

RayResult render_ray(const SceneField& field, const Ray& ray,
                     const AppearanceVector& appearance,
                     const RenderConfig& config, SeededRng& rng) {
  const RayShading s = render_ray_detail(field, ray, appearance, config, rng);
  return RayResult{s.color, s.transmittance};
}

Image render_image(const SceneField& field, const Pose& pose,
                   const PinholeIntrinsics& intrinsics,
                   const AppearanceVector& appearance,
                   const RenderConfig& config, int jobs) {
  config.validate();
  intrinsics.validate();
  if (!(config.t_near >= 0.0) || !(config.t_near < config.t_far) ||
      !std::isfinite(config.t_far))
    throw DomainError("render_image: need 0 <= t_near < t_far");

  Image image(intrinsics.width, intrinsics.height);
  parallel_for(static_cast<std::size_t>(intrinsics.height), jobs, [&](std::size_t y) {
    for (int x = 0; x < intrinsics.width; ++x) {
      const std::size_t pixel_index = y * intrinsics.width + x;
      SeededRng pixel_rng = SeededRng::substream(config.seed, pixel_index);
      try {
        const Ray ray = pixel_ray(pose, intrinsics, x + 0.5, y + 0.5,
                                  config.t_near, config.t_far);
        image.at(x, static_cast<int>(y)) =
            render_ray(field, ray, appearance, config, pixel_rng).color;
      } catch (const RenderError& e) {
        throw RenderError("pixel (" + std::to_string(x) + ", " +
                          std::to_string(y) + "): " + e.what());
      }
    }
  });
  return image;
}

std::vector<Image> render_batch(const SceneField& field,
                                std::span<const RenderJob> jobs,
                                const PinholeIntrinsics& intrinsics,
                                const RenderConfig& config, int parallelism) {
  config.validate();
  if (parallelism < 1) throw DomainError("render_batch: parallelism must be >= 1");
  std::vector<Image> images(jobs.size());
  parallel_for(jobs.size(), parallelism, [&](std::size_t k) {
    RenderConfig image_config = config;
    image_config.seed = SeededRng::mix(config.seed, k);
    try {
      images[k] = render_image(field, jobs[k].pose, intrinsics,
                               jobs[k].appearance, image_config, 1);
    } catch (const RenderError& e) {
      throw RenderError("image " + std::to_string(k) + ": " + e.what());
    }
  });
  return images;
}

}  // namespace lens
