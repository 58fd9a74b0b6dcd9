// SPDX-License-Identifier: Apache-2.0
//
// lens-forge: offline dataset-generation pipeline. Subcommands mirror the
// pipeline stages: `volume` extracts occupied scene points, `place` samples
// virtual cameras, `render` synthesizes their views, `ablate` measures how
// growing synthetic-to-real ratios change retrieval localization error.
// Every stage is pure in (inputs, flags, seed); reruns are byte-identical
// except for the timestamps inside the run manifest.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lens/dataset.hpp"
#include "lens/density_volume.hpp"
#include "lens/errors.hpp"
#include "lens/evaluation.hpp"
#include "lens/image.hpp"
#include "lens/num_io.hpp"
#include "lens/placement.hpp"
#include "lens/presets.hpp"
#include "lens/render.hpp"
#include "lens/scene.hpp"

#include "manifest.hpp"

namespace {

using nlohmann::ordered_json;
using namespace lens;

constexpr std::uint64_t kAppearanceSalt = 0x61707065;  // decorrelates streams

// ---------------------------------------------------------------------------
// Flag helpers

bool parse_size_spec(const std::string& spec, int* width, int* height) {
  const std::size_t x = spec.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= spec.size()) return false;
  try {
    *width = static_cast<int>(parse_int(spec.substr(0, x)));
    *height = static_cast<int>(parse_int(spec.substr(x + 1)));
  } catch (const ParseError&) {
    return false;
  }
  return *width >= 1 && *height >= 1;
}

std::vector<double> parse_ratio_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw ParseError("empty ratio list");
  return out;
}

// Usage-time validators so malformed flag values fail as usage errors.
const CLI::Validator kSizeValidator(
    [](std::string& s) {
      int w, h;
      return parse_size_spec(s, &w, &h)
                 ? std::string{}
                 : "expected <width>x<height>, e.g. 64x64";
    },
    "WxH");

const CLI::Validator kRatioValidator(
    [](std::string& s) {
      try {
        parse_ratio_list(s);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string{};
    },
    "RATIOS");

std::vector<Pose> dataset_poses(const PosedDataset& ds) {
  std::vector<Pose> poses;
  poses.reserve(ds.images.size());
  for (const PosedImage& img : ds.images) poses.push_back(img.pose);
  return poses;
}

// Default ray bounds: fractions of the diagonal of the pose bounding box
// merged with the scene's own bounds hint.
void derive_t_bounds(const SceneField& field, std::span<const Pose> poses,
                     double* t_near, double* t_far) {
  Aabb box = bounding_box(poses);
  if (const auto hint = field.bounds_hint()) box = merge_boxes(box, *hint);
  const double diag = norm(box.diagonal());
  if (!(diag > 0.0))
    throw DomainError(
        "cannot derive ray bounds from a degenerate scene; pass --t-near/--t-far");
  *t_near = presets::kNearFraction * diag;
  *t_far = presets::kFarFraction * diag;
}

ordered_json placement_json(const PlacementConfig& pc) {
  ordered_json j;
  j["n"] = pc.n;
  j["d_sigma"] = pc.d_sigma;
  j["d_max"] = pc.d_max;
  j["theta_deg"] = pc.theta_deg;
  j["mode"] = placement_mode_name(pc.mode);
  j["e_max"] = pc.e_max;
  if (pc.plane_height)
    j["plane_height"] = *pc.plane_height;
  else
    j["plane_height"] = nullptr;
  j["volume_pruning"] = pc.volume_pruning;
  return j;
}

// ---------------------------------------------------------------------------
// volume

struct VolumeArgs {
  std::string scene, poses, out;
  int rv = presets::kDensityResolution;
  double t_sigma = presets::kDensityThreshold;
  double e_max = 0.0;
  int jobs = 1;
};

int run_volume(const VolumeArgs& a) {
  if (a.rv < 1) throw DomainError("--rv must be >= 1");
  if (!std::isfinite(a.t_sigma) || a.t_sigma < 0.0)
    throw DomainError("--t-sigma must be finite and >= 0");
  if (!std::isfinite(a.e_max) || a.e_max < 0.0)
    throw DomainError("--e-max must be finite and >= 0");
  if (a.jobs < 1) throw DomainError("--jobs must be >= 1");

  const std::string started = tool::utc_now_iso8601();
  const auto field = load_scene(a.scene);
  const PosedDataset ds = load_pose_file(a.poses);
  const std::vector<Pose> poses = dataset_poses(ds);

  const VolumeConfig config{a.rv, a.t_sigma, a.e_max};
  const OccupiedPointSet set =
      extract_density_volume(*field, poses, config, a.jobs);
  if (set.points.empty())
    std::cerr << "warning: no occupied cells above t_sigma="
              << format_double(a.t_sigma) << "\n";

  save_occupied_points(set, a.out);

  ordered_json cfg;
  cfg["scene"] = a.scene;
  cfg["poses"] = a.poses;
  cfg["rv"] = a.rv;
  cfg["t_sigma"] = a.t_sigma;
  cfg["e_max"] = a.e_max;
  cfg["jobs"] = a.jobs;
  cfg["out"] = a.out;
  tool::write_manifest(a.out + ".manifest.json", "volume", 0,
                       {a.scene, a.poses}, cfg, started,
                       tool::utc_now_iso8601());
  std::cerr << "wrote " << set.points.size() << " occupied points to " << a.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// place

struct PlaceArgs {
  std::string poses, occupied, out;
  int n = 0;
  std::string preset;
  double d_sigma = 0.0, d_max = 0.0, theta = 0.0, e_max = 0.0;
  std::string mode;
  double plane_height = 0.0;
  bool has_plane_height = false;
  bool no_volume_pruning = false;
  std::uint64_t seed = 0;
};

int run_place(const PlaceArgs& a, const CLI::App* cmd) {
  PlacementConfig pc;
  pc.n = a.n;
  if (!a.preset.empty()) {
    const presets::PlacementPreset& p =
        a.preset == "indoor" ? presets::kIndoor : presets::kOutdoor;
    pc.d_sigma = p.d_sigma_m;
    pc.d_max = p.d_max_m;
    pc.theta_deg = p.theta_deg;
    pc.e_max = p.e_max_m;
    pc.mode = parse_placement_mode(p.mode);
  } else {
    for (const char* flag : {"--d-sigma", "--d-max", "--theta", "--mode", "--e-max"})
      if (cmd->count(flag) == 0) {
        std::cerr << "error: " << flag << " is required (or use --preset)\n";
        return 2;
      }
  }
  if (cmd->count("--d-sigma")) pc.d_sigma = a.d_sigma;
  if (cmd->count("--d-max")) pc.d_max = a.d_max;
  if (cmd->count("--theta")) pc.theta_deg = a.theta;
  if (cmd->count("--e-max")) pc.e_max = a.e_max;
  if (cmd->count("--mode")) pc.mode = parse_placement_mode(a.mode);
  if (a.has_plane_height) pc.plane_height = a.plane_height;
  pc.seed = a.seed;
  pc.volume_pruning = !a.no_volume_pruning;

  const std::string started = tool::utc_now_iso8601();
  const PosedDataset ds = load_pose_file(a.poses);
  const std::vector<Pose> poses = dataset_poses(ds);
  const OccupiedPointSet occupied = load_occupied_points(a.occupied);

  const VirtualCameraSet cams = place_cameras(poses, occupied, pc);

  PosedDataset out;
  out.intrinsics = ds.intrinsics;
  out.scene_id = ds.scene_id;
  out.appearance_dim = 0;
  out.images.reserve(cams.poses.size());
  for (std::size_t i = 0; i < cams.poses.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "virt_%05zu.ppm", i);
    out.images.push_back(
        PosedImage{name, cams.poses[i], "", ImageOrigin::kSynthetic, {}});
  }
  save_pose_file(out, a.out);

  ordered_json cfg;
  cfg["poses"] = a.poses;
  cfg["occupied"] = a.occupied;
  cfg["placement"] = placement_json(pc);
  cfg["out"] = a.out;
  tool::write_manifest(a.out + ".manifest.json", "place", a.seed,
                       {a.poses, a.occupied}, cfg, started,
                       tool::utc_now_iso8601());
  std::cerr << "placed " << cams.poses.size() << " cameras after "
            << cams.iterations_used << " iteration(s), final resolution "
            << cams.final_resolution << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
  std::string scene, poses, out_dir;
  int nc = presets::kCoarseSamples;
  int nf = presets::kFineSamples;
  std::string size;  // empty = native pose-file size
  std::string appearance = "fixed";
  std::uint64_t seed = 0;
  int jobs = 1;
  double t_near = -1.0, t_far = -1.0;  // negative = derive from the scene
};

int run_render(const RenderArgs& a, const CLI::App* cmd) {
  const std::string started = tool::utc_now_iso8601();
  const auto field = load_scene(a.scene);
  const PosedDataset ds = load_pose_file(a.poses);
  if (ds.images.empty()) throw DomainError("pose file lists no images");
  const std::vector<Pose> poses = dataset_poses(ds);

  PinholeIntrinsics intr = ds.intrinsics;
  if (!a.size.empty()) {
    int w = 0, h = 0;
    parse_size_spec(a.size, &w, &h);  // validated at parse time
    intr = intr.scaled_to(w, h);
  }

  RenderConfig rc;
  rc.n_coarse = a.nc;
  rc.n_fine = a.nf;
  rc.background = field->background();
  rc.seed = a.seed;
  if (cmd->count("--t-near") || cmd->count("--t-far")) {
    if (!cmd->count("--t-near") || !cmd->count("--t-far"))
      throw DomainError("--t-near and --t-far must be given together");
    rc.t_near = a.t_near;
    rc.t_far = a.t_far;
  } else {
    derive_t_bounds(*field, poses, &rc.t_near, &rc.t_far);
  }

  std::vector<RenderJob> jobs_list;
  jobs_list.reserve(ds.images.size());
  if (a.appearance == "random") {
    std::vector<AppearanceVector> pool;
    for (const PosedImage& img : ds.images)
      if (!img.appearance.empty()) pool.push_back(img.appearance);
    if (pool.empty())
      throw DomainError(
          "--appearance random needs appearance vectors in the pose file");
    for (std::size_t k = 0; k < ds.images.size(); ++k) {
      SeededRng rng =
          SeededRng::substream(SeededRng::mix(a.seed, kAppearanceSalt), k);
      jobs_list.push_back(
          RenderJob{ds.images[k].pose, interpolate_appearance(pool, rng)});
    }
  } else {
    for (const PosedImage& img : ds.images)
      jobs_list.push_back(RenderJob{img.pose, img.appearance});
  }

  const std::vector<Image> images =
      render_batch(*field, jobs_list, intr, rc, a.jobs);

  std::filesystem::create_directories(a.out_dir);
  for (std::size_t k = 0; k < images.size(); ++k) {
    const std::filesystem::path path =
        std::filesystem::path(a.out_dir) / ds.images[k].name;
    if (path.has_parent_path())
      std::filesystem::create_directories(path.parent_path());
    write_ppm(images[k], path.string());
    std::cerr << "rendered " << ds.images[k].name << " (" << k + 1 << "/"
              << images.size() << ")\n";
  }

  ordered_json cfg;
  cfg["scene"] = a.scene;
  cfg["poses"] = a.poses;
  cfg["nc"] = a.nc;
  cfg["nf"] = a.nf;
  cfg["size"] = ordered_json::array({intr.width, intr.height});
  cfg["appearance"] = a.appearance;
  cfg["t_near"] = rc.t_near;
  cfg["t_far"] = rc.t_far;
  cfg["jobs"] = a.jobs;
  cfg["out_dir"] = a.out_dir;
  tool::write_manifest(
      (std::filesystem::path(a.out_dir) / "manifest.json").string(), "render",
      a.seed, {a.scene, a.poses}, cfg, started, tool::utc_now_iso8601());
  return 0;
}

// ---------------------------------------------------------------------------
// ablate

struct AblateArgs {
  std::string scene, poses, out;
  std::string ratios = presets::kDefaultRatios;
  bool check = false;
  std::string size = "64x64";
  int nc = 64;
  int nf = 0;
  int downsample = 8;
  int test_count = 200;
  std::string preset = "indoor";
  double d_sigma = 0.0, d_max = 0.0, theta = 0.0, e_max = 0.0;
  std::string mode;
  int rv = 32;
  double t_sigma = presets::kDensityThreshold;
  std::uint64_t seed = 0;
  int jobs = 1;
  double t_near = -1.0, t_far = -1.0;
};

int run_ablate(const AblateArgs& a, const CLI::App* cmd) {
  const std::vector<double> ratios = parse_ratio_list(a.ratios);

  const std::string started = tool::utc_now_iso8601();
  const auto field = load_scene(a.scene);
  const PosedDataset ds = load_pose_file(a.poses);
  const std::vector<Pose> train = dataset_poses(ds);
  if (train.empty()) throw DomainError("pose file lists no images");

  AblationConfig config;
  const presets::PlacementPreset& p =
      a.preset == "indoor" ? presets::kIndoor : presets::kOutdoor;
  config.placement.d_sigma = cmd->count("--d-sigma") ? a.d_sigma : p.d_sigma_m;
  config.placement.d_max = cmd->count("--d-max") ? a.d_max : p.d_max_m;
  config.placement.theta_deg = cmd->count("--theta") ? a.theta : p.theta_deg;
  config.placement.e_max = cmd->count("--e-max") ? a.e_max : p.e_max_m;
  config.placement.mode =
      parse_placement_mode(cmd->count("--mode") ? a.mode : p.mode);
  config.volume.resolution = a.rv;
  config.volume.t_sigma = a.t_sigma;
  config.volume.e_max = config.placement.e_max;

  int w = 0, h = 0;
  parse_size_spec(a.size, &w, &h);  // validated at parse time
  config.intrinsics = ds.intrinsics.scaled_to(w, h);

  config.render.n_coarse = a.nc;
  config.render.n_fine = a.nf;
  config.render.background = field->background();
  if (cmd->count("--t-near") || cmd->count("--t-far")) {
    if (!cmd->count("--t-near") || !cmd->count("--t-far"))
      throw DomainError("--t-near and --t-far must be given together");
    config.render.t_near = a.t_near;
    config.render.t_far = a.t_far;
  } else {
    derive_t_bounds(*field, train, &config.render.t_near,
                    &config.render.t_far);
  }
  config.downsample = a.downsample;
  config.jobs = a.jobs;
  config.seed = a.seed;

  const std::vector<Pose> test =
      uniform_query_poses(train, static_cast<std::size_t>(a.test_count),
                          config.placement.e_max, SeededRng::mix(a.seed, 5));

  const std::vector<AblationRow> rows =
      run_ablation(*field, train, test, ratios, config);
  emit_report(rows, a.out);
  for (const AblationRow& r : rows)
    std::cerr << "ratio " << format_double(r.ratio) << ": med_tr "
              << format_double(r.median_translation_m) << " m, med_rot "
              << format_double(r.median_rotation_deg) << " deg\n";

  ordered_json cfg;
  cfg["scene"] = a.scene;
  cfg["poses"] = a.poses;
  cfg["ratios"] = ratios;
  cfg["check"] = a.check;
  cfg["size"] = ordered_json::array({w, h});
  cfg["nc"] = a.nc;
  cfg["nf"] = a.nf;
  cfg["downsample"] = a.downsample;
  cfg["test_count"] = a.test_count;
  cfg["preset"] = a.preset;
  cfg["placement"] = placement_json(config.placement);
  cfg["rv"] = a.rv;
  cfg["t_sigma"] = a.t_sigma;
  cfg["t_near"] = config.render.t_near;
  cfg["t_far"] = config.render.t_far;
  cfg["jobs"] = a.jobs;
  cfg["out"] = a.out;
  tool::write_manifest(a.out + ".manifest.json", "ablate", a.seed,
                       {a.scene, a.poses}, cfg, started,
                       tool::utc_now_iso8601());

  if (a.check) {
    bool ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].median_translation_m >
          rows[i - 1].median_translation_m + 1e-12) {
        std::cerr << "check failed: median translation error increased from "
                  << "ratio " << format_double(rows[i - 1].ratio) << " to "
                  << format_double(rows[i].ratio) << "\n";
        ok = false;
      }
    if (rows.size() > 1) {
      const double limit =
          presets::kAblationMaxErrorRatio * rows.front().median_translation_m;
      if (rows.back().median_translation_m > limit) {
        std::cerr << "check failed: ratio " << format_double(rows.back().ratio)
                  << " median translation error "
                  << format_double(rows.back().median_translation_m)
                  << " exceeds " << format_double(limit) << " ("
                  << format_double(100.0 * presets::kAblationMaxErrorRatio)
                  << "% of baseline)\n";
        ok = false;
      }
    }
    if (!ok) return 5;
    std::cerr << "check passed\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lens-forge: synthetic dataset generation for camera relocalization"};
  app.set_version_flag("--version", presets::kToolVersion);
  app.require_subcommand(1);

  VolumeArgs va;
  CLI::App* volume = app.add_subcommand(
      "volume", "Extract occupied density-volume points from a scene");
  volume->add_option("scene", va.scene, "Scene description (JSON)")->required();
  volume->add_option("poses", va.poses, "Training pose file")->required();
  volume->add_option("--rv", va.rv, "Grid cells along the smallest box edge")
      ->capture_default_str();
  volume->add_option("--t-sigma", va.t_sigma, "Occupancy density threshold")
      ->capture_default_str();
  volume->add_option("--e-max", va.e_max, "Bounding-box extension (m)")
      ->capture_default_str();
  volume->add_option("--jobs", va.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  volume->add_option("--out", va.out, "Output occupied-point file")->required();

  PlaceArgs pa;
  CLI::App* place =
      app.add_subcommand("place", "Place virtual cameras around the real poses");
  place->add_option("poses", pa.poses, "Training pose file")->required();
  place->add_option("occupied", pa.occupied, "Occupied-point file from `volume`")
      ->required();
  place->add_option("--n", pa.n, "Number of virtual cameras")
      ->required()
      ->check(CLI::PositiveNumber);
  place
      ->add_option("--preset", pa.preset,
                   std::string("Parameter preset: indoor (d_max ") +
                       format_double(presets::kIndoor.d_max_m) + ", d_sigma " +
                       format_double(presets::kIndoor.d_sigma_m) + ", e_max " +
                       format_double(presets::kIndoor.e_max_m) + ", theta " +
                       format_double(presets::kIndoor.theta_deg) + ", " +
                       presets::kIndoor.mode + ") or outdoor (d_max " +
                       format_double(presets::kOutdoor.d_max_m) + ", d_sigma " +
                       format_double(presets::kOutdoor.d_sigma_m) + ", e_max " +
                       format_double(presets::kOutdoor.e_max_m) + ", theta " +
                       format_double(presets::kOutdoor.theta_deg) + ", " +
                       presets::kOutdoor.mode + ")")
      ->check(CLI::IsMember({"indoor", "outdoor"}));
  place->add_option("--d-sigma", pa.d_sigma, "Min clearance from occupied volume (m)");
  place->add_option("--d-max", pa.d_max, "Max distance to nearest real camera (m)");
  place->add_option("--theta", pa.theta, "Orientation perturbation range (deg)");
  place->add_option("--mode", pa.mode, "Candidate grid layout")
      ->check(CLI::IsMember({"planar-2d", "volumetric-3d"}));
  place->add_option("--e-max", pa.e_max, "Bounding-box extension (m)");
  CLI::Option* ph = place->add_option("--plane-height", pa.plane_height,
                                      "Plane height for planar-2d (default: "
                                      "mean training camera height)");
  place->add_option("--seed", pa.seed, "Random seed")
      ->envname("LENS_FORGE_SEED")
      ->capture_default_str();
  place->add_flag("--no-volume-pruning", pa.no_volume_pruning,
                  "Skip the d_sigma clearance criterion");
  place->add_option("--out", pa.out, "Output pose file")->required();

  RenderArgs ra;
  CLI::App* render =
      app.add_subcommand("render", "Volume-render views for a pose file");
  render->add_option("scene", ra.scene, "Scene description (JSON)")->required();
  render->add_option("poses", ra.poses, "Pose file to render")->required();
  render->add_option("--nc", ra.nc, "Coarse samples per ray")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  render->add_option("--nf", ra.nf, "Fine (importance) samples per ray")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  render->add_option("--size", ra.size,
                     "Output size WxH (default: pose-file intrinsics size)")
      ->check(kSizeValidator);
  render->add_option("--appearance", ra.appearance,
                     "Appearance codes: fixed (from the pose file) or random "
                     "(interpolated between pose-file vectors)")
      ->check(CLI::IsMember({"random", "fixed"}))
      ->capture_default_str();
  render->add_option("--seed", ra.seed, "Random seed")
      ->envname("LENS_FORGE_SEED")
      ->capture_default_str();
  render->add_option("--jobs", ra.jobs, "Images rendered in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  render->add_option("--t-near", ra.t_near, "Ray start distance (default: derived)");
  render->add_option("--t-far", ra.t_far, "Ray end distance (default: derived)");
  render->add_option("--out-dir", ra.out_dir, "Output image directory")->required();

  AblateArgs aa;
  CLI::App* ablate = app.add_subcommand(
      "ablate", "Measure localization error across synthetic-to-real ratios");
  ablate->add_option("scene", aa.scene, "Scene description (JSON)")->required();
  ablate->add_option("poses", aa.poses,
                     "Real training pose file (test queries are sampled "
                     "uniformly around it)")
      ->required();
  ablate->add_option("--ratios", aa.ratios, "Synthetic-to-real ratios")
      ->check(kRatioValidator)
      ->capture_default_str();
  ablate->add_flag("--check", aa.check,
                   std::string("Fail (exit 5) unless median translation error "
                               "is non-increasing and the largest ratio "
                               "reaches <= ") +
                       format_double(100.0 * presets::kAblationMaxErrorRatio) +
                       "% of the baseline");
  ablate->add_option("--size", aa.size, "Render size WxH")
      ->check(kSizeValidator)
      ->capture_default_str();
  ablate->add_option("--nc", aa.nc, "Coarse samples per ray")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--nf", aa.nf, "Fine samples per ray")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  ablate->add_option("--downsample", aa.downsample, "Retrieval downsample factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--test-count", aa.test_count,
                     "Number of uniform test query poses")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--preset", aa.preset, "Placement preset")
      ->check(CLI::IsMember({"indoor", "outdoor"}))
      ->capture_default_str();
  ablate->add_option("--d-sigma", aa.d_sigma, "Override preset d_sigma (m)");
  ablate->add_option("--d-max", aa.d_max, "Override preset d_max (m)");
  ablate->add_option("--theta", aa.theta, "Override preset theta (deg)");
  ablate->add_option("--e-max", aa.e_max, "Override preset e_max (m)");
  ablate->add_option("--mode", aa.mode, "Override preset grid layout")
      ->check(CLI::IsMember({"planar-2d", "volumetric-3d"}));
  ablate->add_option("--rv", aa.rv, "Density grid resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--t-sigma", aa.t_sigma, "Occupancy density threshold")
      ->capture_default_str();
  ablate->add_option("--seed", aa.seed, "Random seed")
      ->envname("LENS_FORGE_SEED")
      ->capture_default_str();
  ablate->add_option("--jobs", aa.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--t-near", aa.t_near, "Ray start distance (default: derived)");
  ablate->add_option("--t-far", aa.t_far, "Ray end distance (default: derived)");
  ablate->add_option("--out", aa.out, "Output report (TSV)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  pa.has_plane_height = ph->count() > 0;

  try {
    if (volume->parsed()) return run_volume(va);
    if (place->parsed()) return run_place(pa, place);
    if (render->parsed()) return run_render(ra, render);
    if (ablate->parsed()) return run_ablate(aa, ablate);
  } catch (const PlacementInfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
