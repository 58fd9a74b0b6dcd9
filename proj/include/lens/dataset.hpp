// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "lens/geometry.hpp"
#include "lens/rng.hpp"
#include "lens/scene.hpp"

namespace lens {

enum class ImageOrigin { kReal, kSynthetic };

struct PosedImage {
  std::string name;        // unique within a dataset; doubles as the file name
  Pose pose;               // camera-to-world
  std::string image_path;  // empty until resolved against an image directory
  ImageOrigin origin = ImageOrigin::kReal;
  AppearanceVector appearance;  // empty = no appearance code
};

struct PosedDataset {
  std::vector<PosedImage> images;
  PinholeIntrinsics intrinsics;
  std::string scene_id;     // free-form tag tying the dataset to its scene
  int appearance_dim = 0;   // expected appearance length (0 = none)

  std::size_t size() const { return images.size(); }
};

// Text pose format, one image per line:
//
//   # scene=<tag>                         (optional)
//   # intrinsics=<w> <h> <fx> <fy> <cx> <cy>
//   # convention=<cam2world|world2cam> <xyzw|wxyz>   (optional, native default)
//   # appearance_dim=<d>                  (optional, default 0)
//   <name> <x> <y> <z> <q1> <q2> <q3> <q4> [<a_1> ... <a_d>]
//
// Foreign conventions are remapped to the native one (camera-to-world,
// quaternion stored x y z w) while loading; saving always writes native.
// Quaternions are renormalized when their norm is within 1e-3 of 1 and
// rejected otherwise. Duplicate names are rejected.
PosedDataset load_pose_file(const std::string& path);

// load_pose_file plus image resolution: every entry must exist as a file
// named <image_dir>/<name>.
PosedDataset load_dataset(const std::string& pose_file,
                          const std::string& image_dir);

void save_pose_file(const PosedDataset& dataset, const std::string& path);

// Concatenates real + synthetic images under the real dataset's metadata.
// Intrinsics, scene tag and appearance dimension must match. A synthetic
// name colliding with a real one gains a "synth/" prefix; an unresolvable
// collision is an error.
PosedDataset merge_datasets(const PosedDataset& real, const PosedDataset& synthetic);

// Uniform sample of `batch_size` distinct images, in selection order.
std::vector<PosedImage> sample_minibatch(const PosedDataset& dataset,
                                         std::size_t batch_size, SeededRng& rng);

}  // namespace lens
