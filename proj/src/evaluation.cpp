// SPDX-License-Identifier: Apache-2.0
#include "lens/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lens/num_io.hpp"
#include "lens/parallel.hpp"

namespace lens {

PoseError pose_errors(const Pose& predicted, const Pose& truth) {
  return PoseError{norm(predicted.position - truth.position),
                   rotation_angle_between(predicted.orientation, truth.orientation)};
}

double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

CoverageStats coverage_stats(std::span<const Pose> training,
                             std::span<const Pose> queries) {
  if (training.empty()) throw DomainError("coverage_stats: no training poses");
  if (queries.empty()) throw DomainError("coverage_stats: no query poses");
  std::vector<double> nn_tr, nn_rot;
  nn_tr.reserve(queries.size());
  nn_rot.reserve(queries.size());
  for (const Pose& q : queries) {
    double best_tr = std::numeric_limits<double>::infinity();
    double best_rot = std::numeric_limits<double>::infinity();
    for (const Pose& t : training) {
      best_tr = std::min(best_tr, norm(q.position - t.position));
      best_rot = std::min(best_rot,
                          rotation_angle_between(q.orientation, t.orientation));
    }
    nn_tr.push_back(best_tr);
    nn_rot.push_back(best_rot);
  }
  return CoverageStats{median(nn_tr), median(nn_rot)};
}

std::size_t retrieval_localize_index(const Image& query,
                                     std::span<const Image> database_images,
                                     int downsample) {
  if (database_images.empty())
    throw DomainError("retrieval: empty database");
  const Image q = box_downsample(query, downsample);
  std::size_t best = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < database_images.size(); ++i) {
    const double mse = image_mse(q, box_downsample(database_images[i], downsample));
    if (mse < best_mse) {  // strict: ties keep the lowest index
      best_mse = mse;
      best = i;
    }
  }
  return best;
}

Pose retrieval_localize(const Image& query, std::span<const DatabaseEntry> database,
                        int downsample) {
  std::vector<Image> images;
  images.reserve(database.size());
  for (const DatabaseEntry& e : database) images.push_back(e.image);
  return database[retrieval_localize_index(query, images, downsample)].pose;
}

std::vector<Pose> uniform_query_poses(std::span<const Pose> training,
                                      std::size_t count, double e_max,
                                      std::uint64_t seed) {
  if (count == 0) throw DomainError("uniform_query_poses: count must be >= 1");
  const Aabb box = extend_box(bounding_box(training), e_max);
  std::vector<Pose> queries;
  queries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SeededRng rng = SeededRng::substream(seed, i);
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = rng.uniform(box.min[a], box.max[a]);
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < training.size(); ++t) {
      const Vec3 d = training[t].position - p;
      const double d2 = dot(d, d);
      if (d2 < best_sq) {
        best_sq = d2;
        best = t;
      }
    }
    queries.push_back(Pose{p, training[best].orientation});
  }
  return queries;
}

// ---------------------------------------------------------------------------
// Ablation

namespace {

std::vector<RenderJob> plain_jobs(std::span<const Pose> poses) {
  std::vector<RenderJob> jobs;
  jobs.reserve(poses.size());
  for (const Pose& p : poses) jobs.push_back(RenderJob{p, {}});
  return jobs;
}

std::vector<Image> downsample_all(std::span<const Image> images, int factor) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const Image& img : images) out.push_back(box_downsample(img, factor));
  return out;
}

std::size_t argmin_mse(const Image& query_down, std::span<const Image> db_down) {
  std::size_t best = 0;
  double best_mse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < db_down.size(); ++i) {
    const double mse = image_mse(query_down, db_down[i]);
    if (mse < best_mse) {
      best_mse = mse;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<AblationRow> run_ablation(const SceneField& field,
                                      std::span<const Pose> real_poses,
                                      std::span<const Pose> test_poses,
                                      std::span<const double> ratios,
                                      const AblationConfig& config) {
  if (real_poses.empty()) throw DomainError("ablation: no real poses");
  if (test_poses.empty()) throw DomainError("ablation: no test poses");
  if (ratios.empty()) throw DomainError("ablation: no ratios");
  std::set<double> unique;
  for (double r : ratios) {
    if (!std::isfinite(r) || r < 0.0)
      throw DomainError("ablation: ratios must be finite and >= 0");
    if (!unique.insert(r).second) throw DomainError("ablation: duplicate ratio");
  }
  if (*unique.begin() != 0.0)
    throw DomainError("ablation: ratios must include the 0 baseline");
  const std::vector<double> sorted(unique.begin(), unique.end());

  // Seeds for the independent stages, all derived from the master seed.
  const std::uint64_t seed_real = SeededRng::mix(config.seed, 1);
  const std::uint64_t seed_query = SeededRng::mix(config.seed, 2);
  const std::uint64_t seed_place = SeededRng::mix(config.seed, 3);
  const std::uint64_t seed_synth = SeededRng::mix(config.seed, 4);

  RenderConfig rc = config.render;
  rc.seed = seed_real;
  const std::vector<Image> real_images = render_batch(
      field, plain_jobs(real_poses), config.intrinsics, rc, config.jobs);
  rc.seed = seed_query;
  const std::vector<Image> query_images = render_batch(
      field, plain_jobs(test_poses), config.intrinsics, rc, config.jobs);

  // Place once at the largest ratio; smaller ratios take prefixes (the
  // selection order is uniformly random, so every prefix is a uniform
  // subset and each database extends the previous one).
  const std::size_t n_max = static_cast<std::size_t>(
      std::ceil(sorted.back() * static_cast<double>(real_poses.size())));
  std::vector<Pose> synth_poses;
  std::vector<Image> synth_images;
  if (n_max > 0) {
    const OccupiedPointSet occupied =
        extract_density_volume(field, real_poses, config.volume, config.jobs);
    PlacementConfig pc = config.placement;
    pc.n = static_cast<int>(n_max);
    pc.seed = seed_place;
    synth_poses = place_cameras(real_poses, occupied, pc).poses;
    rc.seed = seed_synth;
    synth_images = render_batch(field, plain_jobs(synth_poses),
                                config.intrinsics, rc, config.jobs);
  }

  const std::vector<Image> query_down =
      downsample_all(query_images, config.downsample);
  std::vector<Image> db_down = downsample_all(real_images, config.downsample);
  std::vector<Pose> db_poses(real_poses.begin(), real_poses.end());

  std::vector<AblationRow> rows;
  for (double ratio : sorted) {
    const std::size_t want_synth = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(real_poses.size())));
    while (db_poses.size() < real_poses.size() + want_synth) {
      const std::size_t k = db_poses.size() - real_poses.size();
      db_poses.push_back(synth_poses[k]);
      db_down.push_back(box_downsample(synth_images[k], config.downsample));
    }

    std::vector<double> err_tr(test_poses.size()), err_rot(test_poses.size());
    parallel_for(test_poses.size(), config.jobs, [&](std::size_t q) {
      const std::size_t best = argmin_mse(query_down[q], db_down);
      const PoseError err = pose_errors(db_poses[best], test_poses[q]);
      err_tr[q] = err.translation_m;
      err_rot[q] = err.rotation_deg;
    });

    AblationRow row;
    row.ratio = ratio;
    row.median_translation_m = median(err_tr);
    row.median_rotation_deg = median(err_rot);
    rows.push_back(row);
  }

  const double base_tr = rows.front().median_translation_m;
  const double base_rot = rows.front().median_rotation_deg;
  for (AblationRow& row : rows) {
    if (row.ratio == 0.0) continue;
    if (base_tr > 0.0)
      row.rel_improvement_translation =
          (base_tr - row.median_translation_m) / base_tr;
    if (base_rot > 0.0)
      row.rel_improvement_rotation = (base_rot - row.median_rotation_deg) / base_rot;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

static const char* const kReportHeader =
    "ratio\tmed_tr_m\tmed_rot_deg\trel_impr_tr\trel_impr_rot";

std::string long_report_path(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.extension().empty()) return path + ".long";
  std::filesystem::path out = p;
  out.replace_filename(p.stem().string() + ".long" + p.extension().string());
  return out.string();
}

void emit_report(std::span<const AblationRow> rows, const std::string& path) {
  if (rows.empty()) throw DomainError("emit_report: no rows");
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << kReportHeader << '\n';
  for (const AblationRow& r : rows)
    out << format_double(r.ratio) << '\t' << format_double(r.median_translation_m)
        << '\t' << format_double(r.median_rotation_deg) << '\t'
        << format_double(r.rel_improvement_translation) << '\t'
        << format_double(r.rel_improvement_rotation) << '\n';
  if (!out.flush()) throw DomainError("failed writing " + path);

  static const char* const kMetrics[4] = {"med_tr_m", "med_rot_deg",
                                          "rel_impr_tr", "rel_impr_rot"};
  std::ofstream lout(long_report_path(path));
  if (!lout) throw DomainError("cannot write " + long_report_path(path));
  lout << "ratio\tmetric\tvalue\n";
  for (const AblationRow& r : rows) {
    const double values[4] = {r.median_translation_m, r.median_rotation_deg,
                              r.rel_improvement_translation,
                              r.rel_improvement_rotation};
    for (int m = 0; m < 4; ++m)
      lout << format_double(r.ratio) << '\t' << kMetrics[m] << '\t'
           << format_double(values[m]) << '\n';
  }
  if (!lout.flush()) throw DomainError("failed writing " + long_report_path(path));
}

std::vector<AblationRow> parse_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw ParseError(path, 1, "unexpected report header");

  std::vector<AblationRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok[5], extra;
    for (auto& t : tok)
      if (!std::getline(ss, t, '\t'))
        throw ParseError(path, line_no, "expected 5 tab-separated columns");
    if (std::getline(ss, extra, '\t'))
      throw ParseError(path, line_no, "trailing columns");
    AblationRow r;
    r.ratio = parse_double(tok[0]);
    r.median_translation_m = parse_double(tok[1]);
    r.median_rotation_deg = parse_double(tok[2]);
    r.rel_improvement_translation = parse_double(tok[3]);
    r.rel_improvement_rotation = parse_double(tok[4]);
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  return rows;
}

}  // namespace lens
