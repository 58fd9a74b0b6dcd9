// SPDX-License-Identifier: Apache-2.0
#include "lens/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace lens {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool color_valid(const Rgb& c) {
  return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b) &&
         c.r >= 0.0 && c.r <= 1.0 && c.g >= 0.0 && c.g <= 1.0 && c.b >= 0.0 &&
         c.b <= 1.0;
}

}  // namespace

void check_appearance(const AppearanceVector& a, int dim) {
  if (a.empty()) return;  // identity appearance
  if (static_cast<int>(a.size()) != dim)
    throw DomainError("appearance vector has " + std::to_string(a.size()) +
                      " coefficients, scene expects " + std::to_string(dim));
  for (double v : a)
    if (!std::isfinite(v)) throw DomainError("appearance coefficient not finite");
}

Rgb apply_appearance(const Rgb& base, const AppearanceVector& a) {
  if (a.empty()) return base;
  auto coeff = [&](std::size_t i) { return i < a.size() ? a[i] : 0.0; };
  return Rgb{clamp01(base.r * (1.0 + coeff(0)) + coeff(3)),
             clamp01(base.g * (1.0 + coeff(1)) + coeff(4)),
             clamp01(base.b * (1.0 + coeff(2)) + coeff(5))};
}

// ---------------------------------------------------------------------------
// Primitive

bool Primitive::contains(const Vec3& p) const {
  switch (shape) {
    case Shape::kBox:
      return std::abs(p.x - center.x) <= 0.5 * size.x &&
             std::abs(p.y - center.y) <= 0.5 * size.y &&
             std::abs(p.z - center.z) <= 0.5 * size.z;
    case Shape::kSphere:
      return norm(p - center) <= radius;
    case Shape::kSlab:
      return std::abs(p[axis] - center[axis]) <= 0.5 * thickness;
  }
  return false;
}

void Primitive::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0)
    throw DomainError("primitive sigma must be finite and >= 0");
  if (!color_valid(color)) throw DomainError("primitive colour outside [0, 1]");
  if (!is_finite(center)) throw DomainError("primitive centre not finite");
  switch (shape) {
    case Shape::kBox:
      if (!is_finite(size) || size.x <= 0.0 || size.y <= 0.0 || size.z <= 0.0)
        throw DomainError("box size must be positive");
      break;
    case Shape::kSphere:
      if (!std::isfinite(radius) || radius <= 0.0)
        throw DomainError("sphere radius must be positive");
      break;
    case Shape::kSlab:
      if (axis < 0 || axis > 2) throw DomainError("slab axis must be 0, 1 or 2");
      if (!std::isfinite(thickness) || thickness <= 0.0)
        throw DomainError("slab thickness must be positive");
      break;
  }
}

// ---------------------------------------------------------------------------
// AnalyticScene

AnalyticScene::AnalyticScene(std::vector<Primitive> primitives, Rgb background,
                             int appearance_dim)
    : primitives_(std::move(primitives)),
      background_(background),
      appearance_dim_(appearance_dim) {
  if (!color_valid(background_)) throw DomainError("background colour outside [0, 1]");
  if (appearance_dim_ < 0) throw DomainError("appearance_dim must be >= 0");
  for (const Primitive& p : primitives_) p.validate();

  // Bounding hint: union of primitive extents. A slab is unbounded in two
  // axes, so scenes containing one advertise no hint.
  bool has_hint = false;
  bool unbounded = false;
  for (const Primitive& p : primitives_) {
    Aabb b;
    switch (p.shape) {
      case Primitive::Shape::kBox:
        b = Aabb{p.center - 0.5 * p.size, p.center + 0.5 * p.size};
        break;
      case Primitive::Shape::kSphere:
        b = Aabb{p.center - Vec3{p.radius, p.radius, p.radius},
                 p.center + Vec3{p.radius, p.radius, p.radius}};
        break;
      case Primitive::Shape::kSlab:
        unbounded = true;
        continue;
    }
    hint_ = has_hint ? merge_boxes(hint_, b) : b;
    has_hint = true;
  }
  if (unbounded || !has_hint) hint_ = Aabb{};  // flag value; see bounds_hint()
  has_hint_ = has_hint && !unbounded;
}

FieldSample AnalyticScene::query(const Vec3& position, const Vec3& direction,
                                 const AppearanceVector& appearance) const {
  (void)direction;  // the analytic emitters are view-independent
  if (!is_finite(position)) throw DomainError("query: position not finite");
  if (!appearance.empty() &&
      static_cast<int>(appearance.size()) != appearance_dim_)
    throw DomainError("query: appearance length mismatch");

  // Overlaps resolve to the largest density; ties keep the earliest
  // primitive so results do not depend on evaluation order.
  const Primitive* hit = nullptr;
  for (const Primitive& p : primitives_)
    if (p.contains(position) && (hit == nullptr || p.sigma > hit->sigma))
      hit = &p;

  if (hit == nullptr || hit->sigma <= 0.0)
    return FieldSample{0.0, hit ? apply_appearance(hit->color, appearance)
                                : background_};
  return FieldSample{hit->sigma, apply_appearance(hit->color, appearance)};
}

double AnalyticScene::density_only(const Vec3& position) const {
  if (!is_finite(position)) throw DomainError("density_only: position not finite");
  double best = 0.0;
  for (const Primitive& p : primitives_)
    if (p.sigma > best && p.contains(position)) best = p.sigma;
  return best;
}

std::optional<Aabb> AnalyticScene::bounds_hint() const {
  if (!has_hint_) return std::nullopt;
  return hint_;
}

// ---------------------------------------------------------------------------
// VoxelGridScene

VoxelGridScene::VoxelGridScene(std::array<int, 3> resolution, Aabb bounds,
                               std::vector<float> sigma, std::vector<float> rgb,
                               Rgb background, int appearance_dim)
    : resolution_(resolution),
      bounds_(bounds),
      sigma_(std::move(sigma)),
      rgb_(std::move(rgb)),
      background_(background),
      appearance_dim_(appearance_dim) {
  bounds_.validate();
  const Vec3 d = bounds_.diagonal();
  if (!(d.x > 0.0) || !(d.y > 0.0) || !(d.z > 0.0))
    throw DomainError("voxel grid bounds must have positive extent");
  for (int a = 0; a < 3; ++a)
    if (resolution_[a] < 2)
      throw DomainError("voxel grid needs at least 2 nodes per axis");
  const std::size_t n = static_cast<std::size_t>(resolution_[0]) *
                        resolution_[1] * resolution_[2];
  if (sigma_.size() != n) throw DomainError("voxel grid sigma payload size mismatch");
  if (rgb_.size() != 3 * n) throw DomainError("voxel grid rgb payload size mismatch");
  for (float v : sigma_)
    if (!std::isfinite(v) || v < 0.0f)
      throw DomainError("voxel grid sigma values must be finite and >= 0");
  for (float v : rgb_)
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw DomainError("voxel grid rgb values must lie in [0, 1]");
  if (!color_valid(background_)) throw DomainError("background colour outside [0, 1]");
  if (appearance_dim_ < 0) throw DomainError("appearance_dim must be >= 0");
}

VoxelGridScene::Interp VoxelGridScene::interpolate(const Vec3& p) const {
  const Vec3 d = bounds_.diagonal();
  double u[3], f[3];
  int i[3];
  const Vec3 rel = p - bounds_.min;
  const double rel_arr[3] = {rel.x, rel.y, rel.z};
  const double ext[3] = {d.x, d.y, d.z};
  for (int a = 0; a < 3; ++a) {
    u[a] = rel_arr[a] / ext[a] * (resolution_[a] - 1);
    i[a] = std::clamp(static_cast<int>(std::floor(u[a])), 0, resolution_[a] - 2);
    f[a] = u[a] - i[a];
  }
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(resolution_[0]);
  const std::size_t sz = sy * resolution_[1];
  const std::size_t base = i[0] * sx + i[1] * sy + i[2] * sz;

  double sigma = 0.0;
  double rgb[3] = {0.0, 0.0, 0.0};
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    const double w = (dx ? f[0] : 1.0 - f[0]) * (dy ? f[1] : 1.0 - f[1]) *
                     (dz ? f[2] : 1.0 - f[2]);
    const std::size_t idx = base + dx * sx + dy * sy + dz * sz;
    sigma += w * sigma_[idx];
    for (int ch = 0; ch < 3; ++ch) rgb[ch] += w * rgb_[3 * idx + ch];
  }
  return Interp{sigma, Rgb{rgb[0], rgb[1], rgb[2]}};
}

FieldSample VoxelGridScene::query(const Vec3& position, const Vec3& direction,
                                  const AppearanceVector& appearance) const {
  (void)direction;
  if (!is_finite(position)) throw DomainError("query: position not finite");
  if (!appearance.empty() &&
      static_cast<int>(appearance.size()) != appearance_dim_)
    throw DomainError("query: appearance length mismatch");
  if (!bounds_.contains(position)) return FieldSample{0.0, background_};
  const Interp s = interpolate(position);
  if (s.sigma <= 0.0) return FieldSample{0.0, apply_appearance(s.color, appearance)};
  return FieldSample{s.sigma, apply_appearance(s.color, appearance)};
}

double VoxelGridScene::density_only(const Vec3& position) const {
  if (!is_finite(position)) throw DomainError("density_only: position not finite");
  if (!bounds_.contains(position)) return 0.0;
  return interpolate(position).sigma;
}

// ---------------------------------------------------------------------------
// Scene files

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(what + " must be an array of 3 numbers");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Rgb parse_rgb(const json& j, const std::string& what) {
  const Vec3 v = parse_vec3(j, what);
  return Rgb{v.x, v.y, v.z};
}

int parse_axis(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw ParseError("slab axis must be \"x\", \"y\" or \"z\"");
}

std::shared_ptr<SceneField> parse_analytic(const json& root) {
  std::vector<Primitive> prims;
  for (const json& jp : root.at("primitives")) {
    Primitive p;
    const std::string shape = jp.at("shape").get<std::string>();
    p.sigma = jp.at("sigma").get<double>();
    p.color = parse_rgb(jp.at("color"), "primitive color");
    if (shape == "box") {
      p.shape = Primitive::Shape::kBox;
      p.center = parse_vec3(jp.at("center"), "box center");
      p.size = parse_vec3(jp.at("size"), "box size");
    } else if (shape == "sphere") {
      p.shape = Primitive::Shape::kSphere;
      p.center = parse_vec3(jp.at("center"), "sphere center");
      p.radius = jp.at("radius").get<double>();
    } else if (shape == "slab") {
      p.shape = Primitive::Shape::kSlab;
      p.axis = parse_axis(jp.at("axis"));
      p.center = Vec3{};
      p.center[p.axis] = jp.at("center").get<double>();
      p.thickness = jp.at("thickness").get<double>();
    } else {
      throw ParseError("unknown primitive shape \"" + shape + "\"");
    }
    prims.push_back(p);
  }
  const Rgb bg = parse_rgb(root.at("background"), "background");
  const int dim = root.value("appearance_dim", 8);
  return std::make_shared<AnalyticScene>(std::move(prims), bg, dim);
}

std::shared_ptr<SceneField> parse_voxel(const json& root,
                                        const std::filesystem::path& json_path) {
  const json& jr = root.at("resolution");
  if (!jr.is_array() || jr.size() != 3)
    throw ParseError("resolution must be an array of 3 integers");
  const std::array<int, 3> res{jr[0].get<int>(), jr[1].get<int>(), jr[2].get<int>()};

  const json& jb = root.at("bounds");
  const Aabb bounds{parse_vec3(jb.at("min"), "bounds.min"),
                    parse_vec3(jb.at("max"), "bounds.max")};

  const std::filesystem::path data_path =
      json_path.parent_path() / root.at("data").get<std::string>();
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw ParseError("cannot open voxel payload " + data_path.string());

  const std::size_t n = static_cast<std::size_t>(res[0]) * res[1] * res[2];
  std::vector<float> sigma(n), rgb(3 * n);
  in.read(reinterpret_cast<char*>(sigma.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  in.read(reinterpret_cast<char*>(rgb.data()),
          static_cast<std::streamsize>(3 * n * sizeof(float)));
  if (!in) throw ParseError("voxel payload " + data_path.string() + " truncated");
  char extra;
  if (in.read(&extra, 1))
    throw ParseError("voxel payload " + data_path.string() +
                     " larger than resolution implies");

  const Rgb bg = parse_rgb(root.at("background"), "background");
  const int dim = root.value("appearance_dim", 8);
  return std::make_shared<VoxelGridScene>(res, bounds, std::move(sigma),
                                          std::move(rgb), bg, dim);
}

}  // namespace

std::shared_ptr<SceneField> load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file " + path);
  json root;
  try {
    root = json::parse(in);
    const std::string type = root.at("type").get<std::string>();
    if (type == "analytic") return parse_analytic(root);
    if (type == "voxel_grid") return parse_voxel(root, path);
    throw ParseError("unknown scene type \"" + type + "\"");
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    // JSON syntax errors and value violations alike are file problems.
    throw ParseError(path + ": " + e.what());
  }
}

FieldSample query_field(const SceneField& field, const Vec3& position,
                        const Vec3& direction, const AppearanceVector& appearance) {
  return field.query(position, direction, appearance);
}

AppearanceVector interpolate_appearance(std::span<const AppearanceVector> training,
                                        SeededRng& rng) {
  if (training.empty())
    throw DomainError("interpolate_appearance: no training vectors");
  const std::size_t dim = training[0].size();
  for (const AppearanceVector& a : training)
    if (a.size() != dim)
      throw DomainError("interpolate_appearance: mixed vector lengths");
  if (training.size() == 1) return training[0];

  const std::size_t i = rng.uniform_below(training.size());
  std::size_t j = rng.uniform_below(training.size() - 1);
  if (j >= i) ++j;
  const double t = rng.uniform();

  AppearanceVector out(dim);
  for (std::size_t k = 0; k < dim; ++k)
    out[k] = (1.0 - t) * training[i][k] + t * training[j][k];
  return out;
}

}  // namespace lens
