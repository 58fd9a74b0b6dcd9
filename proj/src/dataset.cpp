// SPDX-License-Identifier: Apache-2.0
#include "lens/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lens/num_io.hpp"

namespace lens {

namespace {

enum class QuatOrder { kXyzw, kWxyz };
enum class FrameConvention { kCamToWorld, kWorldToCam };

struct Convention {
  FrameConvention frame = FrameConvention::kCamToWorld;
  QuatOrder order = QuatOrder::kXyzw;
};

Convention parse_convention(const std::string& value, const std::string& path) {
  std::istringstream ss(value);
  std::string frame, order, extra;
  if (!(ss >> frame >> order) || (ss >> extra))
    throw ParseError(path + ": convention needs \"<frame> <order>\"");
  Convention c;
  if (frame == "cam2world") c.frame = FrameConvention::kCamToWorld;
  else if (frame == "world2cam") c.frame = FrameConvention::kWorldToCam;
  else throw ParseError(path + ": unknown frame convention \"" + frame + "\"");
  if (order == "xyzw") c.order = QuatOrder::kXyzw;
  else if (order == "wxyz") c.order = QuatOrder::kWxyz;
  else throw ParseError(path + ": unknown quaternion order \"" + order + "\"");
  return c;
}

// Builds the native camera-to-world pose from one line's raw numbers.
Pose remap_pose(const double p[3], const double q[4], const Convention& conv,
                const std::string& path, std::size_t line_no) {
  double x, y, z, w;
  if (conv.order == QuatOrder::kXyzw) {
    x = q[0]; y = q[1]; z = q[2]; w = q[3];
  } else {
    w = q[0]; x = q[1]; y = q[2]; z = q[3];
  }
  const double n = std::sqrt(x * x + y * y + z * z + w * w);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-3)
    throw ParseError(path, line_no,
                     "quaternion norm " + format_double(n) + " deviates from 1");
  const UnitQuaternion quat(x, y, z, w);  // renormalizes the small residue
  const Vec3 t{p[0], p[1], p[2]};
  if (conv.frame == FrameConvention::kCamToWorld) return Pose{t, quat};
  // world-to-camera: invert.  R_c2w = R^T, position = -R^T t.
  const UnitQuaternion inv = quat.conjugate();
  return Pose{-inv.rotate(t), inv};
}

}  // namespace

PosedDataset load_pose_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pose file " + path);

  PosedDataset dataset;
  Convention conv;
  bool have_intrinsics = false;
  std::unordered_set<std::string> names;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t start = body.find_first_not_of(' ');
      if (start == std::string::npos) continue;  // bare comment
      body = body.substr(start);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;  // comment without key=value
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "scene") {
        dataset.scene_id = value;
      } else if (key == "intrinsics") {
        std::istringstream ss(value);
        std::string tok[6], extra;
        for (auto& t : tok)
          if (!(ss >> t))
            throw ParseError(path, line_no,
                             "intrinsics needs \"w h fx fy cx cy\"");
        if (ss >> extra)
          throw ParseError(path, line_no, "intrinsics has trailing fields");
        dataset.intrinsics =
            PinholeIntrinsics{static_cast<int>(parse_int(tok[0])),
                              static_cast<int>(parse_int(tok[1])),
                              parse_double(tok[2]), parse_double(tok[3]),
                              parse_double(tok[4]), parse_double(tok[5])};
        try {
          dataset.intrinsics.validate();
        } catch (const DomainError& e) {
          throw ParseError(path, line_no, e.what());
        }
        have_intrinsics = true;
      } else if (key == "convention") {
        conv = parse_convention(value, path);
      } else if (key == "appearance_dim") {
        dataset.appearance_dim = static_cast<int>(parse_int(value));
      }
      continue;
    }

    std::istringstream ss(line);
    PosedImage img;
    if (!(ss >> img.name)) continue;
    double p[3], q[4];
    for (double& v : p) {
      std::string tok;
      if (!(ss >> tok)) throw ParseError(path, line_no, "truncated position");
      v = parse_double(tok);
    }
    for (double& v : q) {
      std::string tok;
      if (!(ss >> tok)) throw ParseError(path, line_no, "truncated quaternion");
      v = parse_double(tok);
    }
    img.pose = remap_pose(p, q, conv, path, line_no);

    std::string tok;
    while (ss >> tok) img.appearance.push_back(parse_double(tok));
    if (!img.appearance.empty() &&
        static_cast<int>(img.appearance.size()) != dataset.appearance_dim)
      throw ParseError(path, line_no,
                       "expected 0 or " + std::to_string(dataset.appearance_dim) +
                           " appearance coefficients, got " +
                           std::to_string(img.appearance.size()));

    if (!names.insert(img.name).second)
      throw ParseError(path, line_no, "duplicate image name " + img.name);
    dataset.images.push_back(std::move(img));
  }

  if (!have_intrinsics)
    throw ParseError(path + ": missing \"# intrinsics=...\" header");
  if (dataset.images.empty())
    throw ParseError(path + ": empty dataset (no image lines)");
  return dataset;
}

PosedDataset load_dataset(const std::string& pose_file,
                          const std::string& image_dir) {
  PosedDataset dataset = load_pose_file(pose_file);
  for (PosedImage& img : dataset.images) {
    const std::filesystem::path p = std::filesystem::path(image_dir) / img.name;
    if (!std::filesystem::is_regular_file(p))
      throw ParseError("dataset image missing: " + p.string());
    img.image_path = p.string();
  }
  return dataset;
}

void save_pose_file(const PosedDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  if (!dataset.scene_id.empty()) out << "# scene=" << dataset.scene_id << '\n';
  out << "# intrinsics=" << dataset.intrinsics.width << ' '
      << dataset.intrinsics.height << ' ' << format_double(dataset.intrinsics.fx)
      << ' ' << format_double(dataset.intrinsics.fy) << ' '
      << format_double(dataset.intrinsics.cx) << ' '
      << format_double(dataset.intrinsics.cy) << '\n';
  out << "# convention=cam2world xyzw\n";
  if (dataset.appearance_dim > 0)
    out << "# appearance_dim=" << dataset.appearance_dim << '\n';
  for (const PosedImage& img : dataset.images) {
    const Pose& pose = img.pose;
    out << img.name << ' ' << format_double(pose.position.x) << ' '
        << format_double(pose.position.y) << ' '
        << format_double(pose.position.z) << ' '
        << format_double(pose.orientation.x()) << ' '
        << format_double(pose.orientation.y()) << ' '
        << format_double(pose.orientation.z()) << ' '
        << format_double(pose.orientation.w());
    for (double a : img.appearance) out << ' ' << format_double(a);
    out << '\n';
  }
  if (!out.flush()) throw DomainError("failed writing " + path);
}

PosedDataset merge_datasets(const PosedDataset& real,
                            const PosedDataset& synthetic) {
  if (!(real.intrinsics == synthetic.intrinsics))
    throw DomainError("merge: intrinsics differ between datasets");
  if (real.scene_id != synthetic.scene_id)
    throw DomainError("merge: scene tags differ (\"" + real.scene_id +
                      "\" vs \"" + synthetic.scene_id + "\")");
  if (real.appearance_dim != synthetic.appearance_dim)
    throw DomainError("merge: appearance dimensions differ");

  PosedDataset merged;
  merged.intrinsics = real.intrinsics;
  merged.scene_id = real.scene_id;
  merged.appearance_dim = real.appearance_dim;
  merged.images = real.images;

  std::unordered_set<std::string> names;
  for (const PosedImage& img : merged.images) names.insert(img.name);
  for (PosedImage img : synthetic.images) {
    if (!names.insert(img.name).second) {
      img.name = "synth/" + img.name;
      if (!names.insert(img.name).second)
        throw DomainError("merge: name collision on " + img.name);
    }
    merged.images.push_back(std::move(img));
  }
  return merged;
}

std::vector<PosedImage> sample_minibatch(const PosedDataset& dataset,
                                         std::size_t batch_size, SeededRng& rng) {
  if (batch_size < 1) throw DomainError("sample_minibatch: batch size must be >= 1");
  if (batch_size > dataset.images.size())
    throw DomainError("sample_minibatch: batch size exceeds dataset size");

  // Partial Fisher-Yates over the index array: uniform without replacement.
  std::vector<std::size_t> idx(dataset.images.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<PosedImage> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j = i + rng.uniform_below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    batch.push_back(dataset.images[idx[i]]);
  }
  return batch;
}

}  // namespace lens
