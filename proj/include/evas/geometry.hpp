#pragma once

#include <array>

#include "evas/frame.hpp"

namespace evas {

// Head orientation in radians: yaw in (-pi, pi], pitch in [-pi/2, pi/2],
// roll in (-pi, pi]. Positive pitch looks toward the +z pole.
struct Viewport {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  bool operator==(const Viewport&) const = default;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Row-major 3x3 rotation matrix.
struct Rot3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  Vec3 apply(const Vec3& v) const;
  Rot3 transposed() const;
  Rot3 operator*(const Rot3& o) const;
};

enum class Sampling { kNearest, kBilinear };

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

Viewport normalize_viewport(Viewport vp);

// ERP pixel -> unit sphere direction. Longitude spans the width, colatitude
// the height; the frame center maps to (1,0,0).
Vec3 plane_to_sphere(double u_px, double v_px, int width, int height);

// Inverse mapping. u wrapped into [0,width), v in [0,height]; at the poles
// u = width/2. Throws if |d| deviates from 1 by more than 1e-6.
void sphere_to_plane(const Vec3& d, int width, int height, double& u_px,
                     double& v_px);

// Rz(yaw) * Ry(-pitch) * Rx(roll). Maps (1,0,0) to the viewport center
// direction.
Rot3 rotation_from_viewport(const Viewport& vp);

// Recenters the viewport at the frame center via inverse mapping over output
// pixels. Horizontal wraparound, vertical clamp.
Frame reproject(const Frame& frame, const Viewport& vp, Sampling sampling);

// Same resampling with the transposed rotation (client-side restore).
Frame inverse_reproject(const Frame& frame, const Viewport& vp,
                        Sampling sampling);

// Reprojection with an explicit rotation, used for cluster-to-user remaps.
Frame reproject_with(const Frame& frame, const Rot3& rot, Sampling sampling);

}  // namespace evas
