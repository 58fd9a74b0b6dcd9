// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the lens-forge binary: exit-code contract, flag
// validation, the four-stage pipeline, and byte-identical reruns (also
// across --jobs settings). Manifests are excluded from byte comparisons
// because they embed wall-clock timestamps.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lens/dataset.hpp"
#include "lens/density_volume.hpp"
#include "lens/evaluation.hpp"
#include "lens/image.hpp"

namespace lens {
namespace {

namespace fs = std::filesystem;

fs::path test_tmpdir() {
  const fs::path dir = fs::path(LENS_TEST_TMPDIR) / "cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = test_tmpdir() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string scene_path(const char* name) {
  return std::string(LENS_DATA_DIR) + "/scenes/" + name;
}

std::string poses_path(const char* name) {
  return std::string(LENS_DATA_DIR) + "/poses/" + name;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the tool through the shell, capturing both streams. `env_prefix`
// lets tests set variables for a single invocation ("VAR=x ").
RunResult run_forge(const std::string& args, const std::string& env_prefix = "") {
  static int call = 0;
  const fs::path out = test_tmpdir() / ("stdout_" + std::to_string(call) + ".txt");
  const fs::path err = test_tmpdir() / ("stderr_" + std::to_string(call) + ".txt");
  ++call;
  const std::string cmd = env_prefix + std::string(LENS_FORGE_BIN) + " " + args +
                          " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_all(out);
  r.err = read_all(err);
  return r;
}

// Relative paths of regular files under `root`, sorted, manifests excluded.
std::vector<std::string> artifact_files(const fs::path& root) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root).string();
    if (rel.find("manifest.json") != std::string::npos) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

void expect_identical_trees(const fs::path& a, const fs::path& b) {
  const std::vector<std::string> fa = artifact_files(a);
  const std::vector<std::string> fb = artifact_files(b);
  ASSERT_EQ(fa, fb);
  for (const std::string& rel : fa)
    EXPECT_EQ(read_all(a / rel), read_all(b / rel)) << "file differs: " << rel;
}

// One full volume -> place -> render -> ablate pipeline into `dir`.
void run_pipeline(const fs::path& dir, int jobs) {
  const std::string scene = scene_path("box_obstacle.json");
  const std::string poses = poses_path("box_obstacle_train.txt");
  const std::string j = std::to_string(jobs);

  RunResult r = run_forge("volume " + scene + " " + poses +
                          " --rv 16 --e-max 0.2 --jobs " + j + " --out " +
                          (dir / "occ.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  r = run_forge("place " + poses + " " + (dir / "occ.txt").string() +
                " --n 20 --preset indoor --seed 11 --out " +
                (dir / "virt.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  r = run_forge("render " + scene + " " + (dir / "virt.txt").string() +
                " --size 16x16 --nc 8 --nf 4 --seed 5 --jobs " + j +
                " --out-dir " + (dir / "imgs").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  r = run_forge("ablate " + scene + " " + poses +
                " --ratios 0,2 --size 16x16 --nc 12 --test-count 24 --rv 16"
                " --d-max 1.0 --d-sigma 0.25 --theta 20 --e-max 0.2"
                " --mode volumetric-3d --seed 7 --jobs " +
                j + " --out " + (dir / "report.tsv").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
}

// ---------------------------------------------------------------------------
// Version / help / usage errors

TEST(Cli, VersionPrintsTheToolVersion) {
  const RunResult r = run_forge("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, HelpListsTheSubcommands) {
  const RunResult r = run_forge("--help");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* cmd : {"volume", "place", "render", "ablate"})
    EXPECT_NE(r.out.find(cmd), std::string::npos) << cmd;
}

TEST(Cli, PlaceHelpDocumentsThePresetParameters) {
  const RunResult r = run_forge("place --help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("indoor (d_max 0.5, d_sigma 0.2, e_max 0.2, theta 20"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("outdoor (d_max 8, d_sigma 1, e_max 1, theta 15"),
            std::string::npos)
      << r.out;
}

TEST(Cli, MissingSubcommandOrUnknownFlagIsAUsageError) {
  EXPECT_EQ(run_forge("").exit_code, 2);
  const fs::path dir = fresh_dir("usage");
  const std::string out = (dir / "x.txt").string();
  const RunResult r =
      run_forge("volume " + scene_path("box_obstacle.json") + " " +
                poses_path("box_obstacle_train.txt") + " --bogus --out " + out);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(out));  // nothing written on a usage error
}

TEST(Cli, MalformedFlagValuesAreUsageErrors) {
  const fs::path dir = fresh_dir("badflags");
  const std::string scene = scene_path("box_obstacle.json");
  const std::string poses = poses_path("box_obstacle_train.txt");

  RunResult r = run_forge("render " + scene + " " + poses +
                          " --size 64 --out-dir " + (dir / "imgs").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(dir / "imgs"));

  r = run_forge("ablate " + scene + " " + poses + " --ratios 0,,5 --out " +
                (dir / "r.tsv").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(dir / "r.tsv"));

  r = run_forge("volume " + scene + " " + poses + " --jobs 0 --out " +
                (dir / "occ.txt").string());
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, MissingInputFilesAreParseErrors) {
  const fs::path dir = fresh_dir("missing");
  const RunResult r = run_forge("volume " + (dir / "absent.json").string() + " " +
                                poses_path("box_obstacle_train.txt") + " --out " +
                                (dir / "occ.txt").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "occ.txt"));
}

TEST(Cli, DomainErrorsExitThree) {
  const fs::path dir = fresh_dir("domain");
  const std::string scene = scene_path("box_obstacle.json");
  const std::string poses = poses_path("box_obstacle_train.txt");

  // --rv is range-checked by the tool itself, not the flag parser.
  RunResult r = run_forge("volume " + scene + " " + poses + " --rv 0 --out " +
                          (dir / "occ.txt").string());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("--rv"), std::string::npos);

  // Half-open ray interval specification.
  r = run_forge("render " + scene + " " + poses + " --t-near 0.5 --out-dir " +
                (dir / "imgs").string());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("--t-near and --t-far"), std::string::npos);

  // Random appearance needs appearance vectors in the pose file.
  r = run_forge("render " + scene + " " + poses +
                " --appearance random --size 8x8 --out-dir " +
                (dir / "imgs").string());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("appearance"), std::string::npos);

  // Ratio semantics (missing 0 baseline) are a domain error, not usage.
  r = run_forge("ablate " + scene + " " + poses +
                " --ratios 1,2 --size 8x8 --nc 4 --test-count 4 --rv 4 --out " +
                (dir / "r.tsv").string());
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, PlaceRequiresConstraintFlagsOrAPreset) {
  const fs::path dir = fresh_dir("placeflags");
  // Build a valid occupied file first.
  RunResult r = run_forge("volume " + scene_path("box_obstacle.json") + " " +
                          poses_path("box_obstacle_train.txt") +
                          " --rv 8 --e-max 0.2 --out " + (dir / "occ.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  r = run_forge("place " + poses_path("box_obstacle_train.txt") + " " +
                (dir / "occ.txt").string() + " --n 5 --out " +
                (dir / "virt.txt").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("is required (or use --preset)"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "virt.txt"));
}

TEST(Cli, InfeasiblePlacementExitsFour) {
  const fs::path dir = fresh_dir("infeasible");
  // Two poses with e_max 0 restrict the candidates to the segment between
  // them; occupied points blanket that segment more densely than d_sigma, so
  // every refinement prunes everything.
  PosedDataset ds;
  ds.intrinsics = PinholeIntrinsics{8, 8, 4, 4, 4, 4};
  ds.images.push_back(
      PosedImage{"a.ppm", Pose{{0, 0, 0}, {}}, "", ImageOrigin::kReal, {}});
  ds.images.push_back(
      PosedImage{"b.ppm", Pose{{1, 0, 0}, {}}, "", ImageOrigin::kReal, {}});
  save_pose_file(ds, (dir / "two.txt").string());
  OccupiedPointSet occ;
  for (int i = 0; i <= 100; ++i) occ.points.push_back({0.01 * i, 0, 0});
  occ.spacing = 0.01;
  occ.source_box = Aabb{{0, 0, 0}, {1, 0, 0}};
  occ.t_sigma = 20.0;
  save_occupied_points(occ, (dir / "occ.txt").string());

  const RunResult r = run_forge(
      "place " + (dir / "two.txt").string() + " " + (dir / "occ.txt").string() +
      " --n 1 --d-sigma 0.02 --d-max 0.5 --theta 5 --e-max 0"
      " --mode volumetric-3d --out " +
      (dir / "virt.txt").string());
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "virt.txt"));
}

// ---------------------------------------------------------------------------
// Stage behaviour

TEST(Cli, EmptyVolumeWarnsButSucceeds) {
  const fs::path dir = fresh_dir("emptyvol");
  const RunResult r = run_forge("volume " + scene_path("box_obstacle.json") + " " +
                                poses_path("box_obstacle_train.txt") +
                                " --rv 8 --t-sigma 1e9 --out " +
                                (dir / "occ.txt").string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.err.find("warning: no occupied cells"), std::string::npos);
  EXPECT_EQ(load_occupied_points((dir / "occ.txt").string()).count(), 0u);
}

TEST(Cli, RenderWritesOneImagePerPoseAtTheRequestedSize) {
  const fs::path dir = fresh_dir("renderout");
  PosedDataset ds;
  ds.intrinsics = PinholeIntrinsics{16, 12, 10, 10, 8, 6};
  int i = 0;
  for (const char* name : {"cam_a.ppm", "cam_b.ppm", "cam_c.ppm"})
    ds.images.push_back(PosedImage{
        name, Pose{{0.3 * i++, 0, 0}, {}}, "", ImageOrigin::kReal, {}});
  save_pose_file(ds, (dir / "three.txt").string());

  const RunResult r = run_forge("render " + scene_path("box_obstacle.json") + " " +
                                (dir / "three.txt").string() +
                                " --size 8x6 --nc 4 --nf 0 --out-dir " +
                                (dir / "imgs").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* name : {"cam_a.ppm", "cam_b.ppm", "cam_c.ppm"}) {
    const fs::path img_path = dir / "imgs" / name;
    ASSERT_TRUE(fs::exists(img_path)) << name;
    const Image img = read_ppm(img_path.string());
    EXPECT_EQ(img.width, 8);
    EXPECT_EQ(img.height, 6);
  }
  EXPECT_TRUE(fs::exists(dir / "imgs" / "manifest.json"));
}

TEST(Cli, ManifestRecordsTheResolvedConfiguration) {
  const fs::path dir = fresh_dir("manifest");
  const RunResult r = run_forge("volume " + scene_path("box_obstacle.json") + " " +
                                poses_path("box_obstacle_train.txt") +
                                " --rv 16 --e-max 0.2 --out " +
                                (dir / "occ.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string manifest = read_all(dir / "occ.txt.manifest.json");
  EXPECT_NE(manifest.find("\"tool_version\": \"0.1.0\""), std::string::npos);
  EXPECT_NE(manifest.find("\"command\": \"volume\""), std::string::npos);
  EXPECT_NE(manifest.find("\"rv\": 16"), std::string::npos);
  EXPECT_NE(manifest.find("\"fnv1a64\": \""), std::string::npos);
  EXPECT_NE(manifest.find("\"started_utc\""), std::string::npos);
  EXPECT_NE(manifest.find("\"finished_utc\""), std::string::npos);
}

TEST(Cli, EnvironmentSeedMatchesTheEquivalentFlag) {
  const fs::path dir = fresh_dir("envseed");
  RunResult r = run_forge("volume " + scene_path("box_obstacle.json") + " " +
                          poses_path("box_obstacle_train.txt") +
                          " --rv 8 --e-max 0.2 --out " + (dir / "occ.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  const std::string base = "place " + poses_path("box_obstacle_train.txt") + " " +
                           (dir / "occ.txt").string() + " --n 10 --preset indoor";
  r = run_forge(base + " --seed 123 --out " + (dir / "flag.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  r = run_forge(base + " --out " + (dir / "env.txt").string(),
                "LENS_FORGE_SEED=123 ");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  r = run_forge(base + " --out " + (dir / "zero.txt").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;

  EXPECT_EQ(read_all(dir / "flag.txt"), read_all(dir / "env.txt"));
  EXPECT_NE(read_all(dir / "flag.txt"), read_all(dir / "zero.txt"));
}

// ---------------------------------------------------------------------------
// Determinism

TEST(Cli, PipelineRerunsAreByteIdentical) {
  const fs::path a = fresh_dir("pipe_a");
  const fs::path b = fresh_dir("pipe_b");
  run_pipeline(a, 1);
  run_pipeline(b, 1);
  expect_identical_trees(a, b);

  // The report is well-formed and parseable.
  const std::vector<AblationRow> rows = parse_report((a / "report.tsv").string());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].ratio, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].ratio, 2.0);
  // The placed set is a loadable pose file with the requested count.
  EXPECT_EQ(load_pose_file((a / "virt.txt").string()).size(), 20u);
}

TEST(Cli, JobsDoNotChangeTheBytes) {
  const fs::path a = fresh_dir("jobs_1");
  const fs::path c = fresh_dir("jobs_3");
  run_pipeline(a, 1);
  run_pipeline(c, 3);
  expect_identical_trees(a, c);
}

// ---------------------------------------------------------------------------
// --check

TEST(Cli, CheckPassesOnAScenePlacementThatHelps) {
  const fs::path dir = fresh_dir("checkpass");
  const RunResult r = run_forge(
      "ablate " + scene_path("box_obstacle.json") + " " +
      poses_path("box_obstacle_train.txt") +
      " --d-max 1.0 --d-sigma 0.25 --theta 20 --e-max 0.2 --mode volumetric-3d"
      " --size 32x32 --nc 48 --test-count 100 --rv 32 --seed 7 --check --out " +
      (dir / "report.tsv").string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.err.find("check passed"), std::string::npos);
}

TEST(Cli, CheckFailureExitsFiveButStillWritesTheReport) {
  const fs::path dir = fresh_dir("checkfail");
  // Ratio 1 alone cannot reach the required error reduction on this scene.
  const RunResult r = run_forge(
      "ablate " + scene_path("box_obstacle.json") + " " +
      poses_path("box_obstacle_train.txt") +
      " --ratios 0,1 --d-max 1.0 --d-sigma 0.25 --theta 20 --e-max 0.2"
      " --mode volumetric-3d --size 16x16 --nc 12 --test-count 24 --rv 16"
      " --seed 7 --check --out " +
      (dir / "report.tsv").string());
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_NE(r.err.find("check failed"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report.tsv"));  // emitted before the check
  EXPECT_TRUE(fs::exists(dir / "report.long.tsv"));
}

}  // namespace
}  // namespace lens
