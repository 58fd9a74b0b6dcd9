// SPDX-License-Identifier: Apache-2.0
#include "lens/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lens {

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!std::isfinite(n) || n < 1e-12)
    throw DomainError("normalized: vector norm too small or non-finite");
  return v / n;
}

// ---------------------------------------------------------------------------
// UnitQuaternion

UnitQuaternion::UnitQuaternion(double x, double y, double z, double w) {
  const double n = std::sqrt(x * x + y * y + z * z + w * w);
  if (!std::isfinite(n) || n < 1e-12)
    throw DomainError("quaternion norm too small or non-finite");
  if (std::abs(n - 1.0) <= 1e-12) {
    // Already unit: keep the exact bit pattern so that serialized rotations
    // reload without perturbation.
    x_ = x;
    y_ = y;
    z_ = z;
    w_ = w;
  } else {
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
    w_ = w / n;
  }
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle_rad) {
  const Vec3 u = normalized(axis);
  const double h = 0.5 * angle_rad;
  const double s = std::sin(h);
  return UnitQuaternion(u.x * s, u.y * s, u.z * s, std::cos(h));
}

UnitQuaternion UnitQuaternion::from_rotation_matrix(const Mat3& m) {
  // Shepperd's method: pick the largest of the four squared components to
  // keep the divisor well away from zero.
  const double t = m[0][0] + m[1][1] + m[2][2];
  double x, y, z, w;
  if (t > 0.0) {
    const double s = std::sqrt(t + 1.0) * 2.0;  // 4w
    w = 0.25 * s;
    x = (m[2][1] - m[1][2]) / s;
    y = (m[0][2] - m[2][0]) / s;
    z = (m[1][0] - m[0][1]) / s;
  } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;  // 4x
    w = (m[2][1] - m[1][2]) / s;
    x = 0.25 * s;
    y = (m[0][1] + m[1][0]) / s;
    z = (m[0][2] + m[2][0]) / s;
  } else if (m[1][1] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;  // 4y
    w = (m[0][2] - m[2][0]) / s;
    x = (m[0][1] + m[1][0]) / s;
    y = 0.25 * s;
    z = (m[1][2] + m[2][1]) / s;
  } else {
    const double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;  // 4z
    w = (m[1][0] - m[0][1]) / s;
    x = (m[0][2] + m[2][0]) / s;
    y = (m[1][2] + m[2][1]) / s;
    z = 0.25 * s;
  }
  return UnitQuaternion(x, y, z, w);
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
  return UnitQuaternion(
      w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
      w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
      w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_,
      w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_);
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  // v' = v + 2 w (q x v) + 2 q x (q x v), with q the vector part.
  const Vec3 q{x_, y_, z_};
  const Vec3 t = cross(q, v);
  return v + 2.0 * (w_ * t + cross(q, t));
}

Mat3 UnitQuaternion::to_rotation_matrix() const {
  const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  return {{{1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy)},
           {2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx)},
           {2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy)}}};
}

bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
  return std::abs(a.dot(b)) >= 1.0 - tol;
}

double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double d = std::min(1.0, std::abs(a.dot(b)));
  return rad_to_deg(2.0 * std::acos(d));
}

// ---------------------------------------------------------------------------
// Pose

Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
  const Vec3 backward = normalized(position - target);  // camera +z
  Vec3 right = cross(up, backward);
  if (norm(right) < 1e-9)
    throw DomainError("look_at: view direction parallel to up vector");
  right = normalized(right);
  const Vec3 true_up = cross(backward, right);
  // Columns are the camera axes expressed in world coordinates.
  const Mat3 m{{{right.x, true_up.x, backward.x},
                {right.y, true_up.y, backward.y},
                {right.z, true_up.z, backward.z}}};
  return Pose{position, UnitQuaternion::from_rotation_matrix(m)};
}

// ---------------------------------------------------------------------------
// Aabb

void Aabb::validate() const {
  if (!is_finite(min) || !is_finite(max))
    throw DomainError("box has non-finite corner");
  if (min.x > max.x || min.y > max.y || min.z > max.z)
    throw DomainError("box has min > max");
}

double Aabb::smallest_positive_edge() const {
  validate();
  const Vec3 d = diagonal();
  double best = 0.0;
  for (int a = 0; a < 3; ++a)
    if (d[a] > 0.0 && (best == 0.0 || d[a] < best)) best = d[a];
  if (best == 0.0) throw DomainError("box is a single point");
  return best;
}

Aabb bounding_box(std::span<const Pose> poses) {
  if (poses.empty()) throw DomainError("bounding_box: no poses");
  Aabb box{poses[0].position, poses[0].position};
  for (const Pose& p : poses) {
    if (!is_finite(p.position))
      throw DomainError("bounding_box: non-finite pose position");
    box.min = component_min(box.min, p.position);
    box.max = component_max(box.max, p.position);
  }
  return box;
}

Aabb extend_box(const Aabb& box, double e_max) {
  box.validate();
  if (!(e_max >= 0.0)) throw DomainError("extend_box: e_max must be >= 0");
  const Vec3 e{e_max, e_max, e_max};
  return Aabb{box.min - e, box.max + e};
}

Aabb merge_boxes(const Aabb& a, const Aabb& b) {
  a.validate();
  b.validate();
  return Aabb{component_min(a.min, b.min), component_max(a.max, b.max)};
}

// ---------------------------------------------------------------------------
// Pinhole camera

void PinholeIntrinsics::validate() const {
  if (width < 1 || height < 1)
    throw DomainError("intrinsics: image size must be positive");
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy))
    throw DomainError("intrinsics: focal lengths must be positive and finite");
  if (!std::isfinite(cx) || !std::isfinite(cy))
    throw DomainError("intrinsics: principal point must be finite");
}

PinholeIntrinsics PinholeIntrinsics::scaled_to(int new_width, int new_height) const {
  validate();
  if (new_width < 1 || new_height < 1)
    throw DomainError("intrinsics: scaled size must be positive");
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  return PinholeIntrinsics{new_width, new_height, fx * sx, fy * sy, cx * sx, cy * sy};
}

Ray pixel_ray(const Pose& pose, const PinholeIntrinsics& intrinsics, double px,
              double py, double t_near, double t_far) {
  intrinsics.validate();
  if (!(px >= 0.0) || !(px < intrinsics.width) || !(py >= 0.0) ||
      !(py < intrinsics.height))
    throw DomainError("pixel_ray: pixel coordinate outside the image");
  if (!(t_near >= 0.0) || !(t_near < t_far) || !std::isfinite(t_far))
    throw DomainError("pixel_ray: need 0 <= t_near < t_far");
  const Vec3 cam_dir{(px - intrinsics.cx) / intrinsics.fx,
                     -(py - intrinsics.cy) / intrinsics.fy, -1.0};
  return Ray{pose.position, normalized(pose.orientation.rotate(cam_dir)),
             t_near, t_far};
}

}  // namespace lens
