// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <span>

#include "lens/errors.hpp"

namespace lens {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// ---------------------------------------------------------------------------
// Vec3

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  bool operator==(const Vec3& o) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Throws DomainError when the vector is too short to carry a direction.
Vec3 normalized(const Vec3& v);

inline Vec3 component_min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

inline Vec3 component_max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

bool is_finite(const Vec3& v);

// ---------------------------------------------------------------------------
// UnitQuaternion

using Mat3 = std::array<std::array<double, 3>, 3>;

// Rotation stored as (x, y, z, w), kept at unit norm by construction.
class UnitQuaternion {
 public:
  // Identity rotation.
  UnitQuaternion() : x_(0), y_(0), z_(0), w_(1) {}

  // Normalizes the given components; throws DomainError when the norm is too
  // small to define a rotation (< 1e-12) or any component is non-finite.
  UnitQuaternion(double x, double y, double z, double w);

  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle_rad);
  static UnitQuaternion from_rotation_matrix(const Mat3& m);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double w() const { return w_; }

  // Hamilton product: (a * b).rotate(v) == a.rotate(b.rotate(v)).
  UnitQuaternion operator*(const UnitQuaternion& o) const;

  UnitQuaternion conjugate() const { return UnitQuaternion(-x_, -y_, -z_, w_); }

  Vec3 rotate(const Vec3& v) const;

  Mat3 to_rotation_matrix() const;

  double dot(const UnitQuaternion& o) const {
    return x_ * o.x_ + y_ * o.y_ + z_ * o.z_ + w_ * o.w_;
  }

 private:
  double x_, y_, z_, w_;
};

// True when both quaternions name the same rotation (q and -q are equal).
bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b,
                   double tol = 1e-9);

// Shortest geodesic angle between two rotations, in degrees:
// 2 * acos(|<a, b>|), clamped against round-off. Range [0, 180].
double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b);

// ---------------------------------------------------------------------------
// Pose

// Rigid camera pose in the camera-to-world sense: `position` is the camera
// centre in world coordinates and `orientation` maps camera-frame vectors to
// world-frame vectors. The camera looks along its local -z axis, +x is right
// and +y is up (right-handed).
struct Pose {
  Vec3 position;
  UnitQuaternion orientation;

  // World-space optical axis (the rotated -z).
  Vec3 forward() const { return orientation.rotate({0.0, 0.0, -1.0}); }
};

// Pose at `position` looking at `target`, with `up` fixing the roll.
Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up);

// ---------------------------------------------------------------------------
// Aabb

// Axis-aligned box; valid when min <= max holds per axis (use validate()).
struct Aabb {
  Vec3 min;
  Vec3 max;

  void validate() const;

  Vec3 diagonal() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }

  // Smallest strictly positive edge length; throws DomainError when every
  // edge is zero (a point box spans no volume to discretize).
  double smallest_positive_edge() const;
};

// Smallest box containing every pose position; throws DomainError when the
// span is empty.
Aabb bounding_box(std::span<const Pose> poses);

// Box grown by e_max (>= 0) on every side.
Aabb extend_box(const Aabb& box, double e_max);

// Union of two boxes.
Aabb merge_boxes(const Aabb& a, const Aabb& b);

// ---------------------------------------------------------------------------
// Pinhole camera

struct PinholeIntrinsics {
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  void validate() const;  // positive sizes and focal lengths, finite centre

  bool operator==(const PinholeIntrinsics& o) const = default;

  // Same camera, new pixel grid; focal lengths and centre scale with it.
  PinholeIntrinsics scaled_to(int new_width, int new_height) const;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_near = 0.0;
  double t_far = 0.0;
};

// World-space ray through the continuous pixel coordinate (px, py), which
// must lie inside the image, i.e. [0, width) x [0, height); callers who want
// a pixel centre pass x + 0.5. The camera-frame direction is
// ((px - cx)/fx, -(py - cy)/fy, -1), normalized: pixel rows grow downward
// while the camera's +y points up. Requires 0 <= t_near < t_far.
Ray pixel_ray(const Pose& pose, const PinholeIntrinsics& intrinsics, double px,
              double py, double t_near, double t_far);

}  // namespace lens
