#include "evas/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace evas {

namespace {

constexpr double kPi = 3.14159265358979323846;

int wrap_col(int x, int width) {
  x %= width;
  return x < 0 ? x + width : x;
}

int clamp_row(int y, int height) {
  return y < 0 ? 0 : (y >= height ? height - 1 : y);
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

void plane_coords(const Vec3& d, int width, int height, double& u, double& v) {
  u = (std::atan2(d.y, d.x) + kPi) * width / (2.0 * kPi);
  if (u >= width) u -= width;
  if (u < 0) u += width;
  double z = d.z < -1.0 ? -1.0 : (d.z > 1.0 ? 1.0 : d.z);
  v = std::acos(z) * height / kPi;
  if (std::abs(d.z) >= 1.0) u = width / 2.0;
}

void sample_nearest(const Frame& f, double u, double v, std::uint8_t* out) {
  int x = wrap_col(static_cast<int>(std::floor(u)), f.width());
  int y = clamp_row(static_cast<int>(std::floor(v)), f.height());
  const std::uint8_t* p = f.px(x, y);
  out[0] = p[0];
  out[1] = p[1];
  out[2] = p[2];
}

void sample_bilinear(const Frame& f, double u, double v, std::uint8_t* out) {
  double gx = u - 0.5, gy = v - 0.5;
  int x0 = static_cast<int>(std::floor(gx));
  int y0 = static_cast<int>(std::floor(gy));
  double tx = gx - x0, ty = gy - y0;
  int x0w = wrap_col(x0, f.width());
  int x1w = wrap_col(x0 + 1, f.width());
  int y0c = clamp_row(y0, f.height());
  int y1c = clamp_row(y0 + 1, f.height());
  const std::uint8_t* p00 = f.px(x0w, y0c);
  const std::uint8_t* p10 = f.px(x1w, y0c);
  const std::uint8_t* p01 = f.px(x0w, y1c);
  const std::uint8_t* p11 = f.px(x1w, y1c);
  for (int c = 0; c < 3; ++c) {
    double top = p00[c] * (1 - tx) + p10[c] * tx;
    double bot = p01[c] * (1 - tx) + p11[c] * tx;
    double val = top * (1 - ty) + bot * ty;
    int iv = round_half_up(val);
    out[c] = static_cast<std::uint8_t>(iv < 0 ? 0 : (iv > 255 ? 255 : iv));
  }
}

}  // namespace

Vec3 Rot3::apply(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Rot3 Rot3::transposed() const {
  Rot3 t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
  return t;
}

Rot3 Rot3::operator*(const Rot3& o) const {
  Rot3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
      out(r, c) = s;
    }
  return out;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0) a += 2.0 * kPi;
  return a - kPi;
}

Viewport normalize_viewport(Viewport vp) {
  vp.yaw = wrap_angle(vp.yaw);
  vp.roll = wrap_angle(vp.roll);
  if (vp.pitch > kPi / 2) vp.pitch = kPi / 2;
  if (vp.pitch < -kPi / 2) vp.pitch = -kPi / 2;
  return vp;
}

Vec3 plane_to_sphere(double u_px, double v_px, int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("plane_to_sphere: bad dimensions");
  double lambda = 2.0 * kPi * u_px / width - kPi;
  double v = kPi * v_px / height;
  if (v < 0) v = 0;
  if (v > kPi) v = kPi;
  return {std::cos(lambda) * std::sin(v), std::sin(lambda) * std::sin(v),
          std::cos(v)};
}

void sphere_to_plane(const Vec3& d, int width, int height, double& u_px,
                     double& v_px) {
  double norm = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument("sphere_to_plane: direction is not unit length");
  plane_coords(d, width, height, u_px, v_px);
}

Rot3 rotation_from_viewport(const Viewport& vp) {
  double cy = std::cos(vp.yaw), sy = std::sin(vp.yaw);
  double cp = std::cos(vp.pitch), sp = std::sin(vp.pitch);
  double cr = std::cos(vp.roll), sr = std::sin(vp.roll);
  // Rz(yaw) * Ry(-pitch) * Rx(roll), expanded.
  Rot3 w;
  w(0, 0) = cy * cp;
  w(0, 1) = -cy * sp * sr - sy * cr;
  w(0, 2) = -cy * sp * cr + sy * sr;
  w(1, 0) = sy * cp;
  w(1, 1) = -sy * sp * sr + cy * cr;
  w(1, 2) = -sy * sp * cr - cy * sr;
  w(2, 0) = sp;
  w(2, 1) = cp * sr;
  w(2, 2) = cp * cr;
  return w;
}

Frame reproject_with(const Frame& frame, const Rot3& rot, Sampling sampling) {
  int w = frame.width(), h = frame.height();
  Frame out(w, h);
  // The output direction field is separable in (column, row).
  std::vector<double> cl(w), sl(w), sv(h), cv(h);
  for (int i = 0; i < w; ++i) {
    double lambda = 2.0 * kPi * (i + 0.5) / w - kPi;
    cl[i] = std::cos(lambda);
    sl[i] = std::sin(lambda);
  }
  for (int j = 0; j < h; ++j) {
    double v = kPi * (j + 0.5) / h;
    sv[j] = std::sin(v);
    cv[j] = std::cos(v);
  }
  // rot * (cl, sl, 0) per column; the row contributes sv * that + cv * rot_z
  std::vector<double> ax(w), ay(w), az(w);
  for (int i = 0; i < w; ++i) {
    ax[i] = rot.m[0] * cl[i] + rot.m[1] * sl[i];
    ay[i] = rot.m[3] * cl[i] + rot.m[4] * sl[i];
    az[i] = rot.m[6] * cl[i] + rot.m[7] * sl[i];
  }
  for (int j = 0; j < h; ++j) {
    std::uint8_t* row = out.px(0, j);
    double svj = sv[j], cvj = cv[j];
    double bx = rot.m[2] * cvj, by = rot.m[5] * cvj, bz = rot.m[8] * cvj;
    if (sampling == Sampling::kNearest) {
      for (int i = 0; i < w; ++i) {
        Vec3 s{ax[i] * svj + bx, ay[i] * svj + by, az[i] * svj + bz};
        double u, v;
        plane_coords(s, w, h, u, v);
        sample_nearest(frame, u, v, row + 3 * i);
      }
    } else {
      for (int i = 0; i < w; ++i) {
        Vec3 s{ax[i] * svj + bx, ay[i] * svj + by, az[i] * svj + bz};
        double u, v;
        plane_coords(s, w, h, u, v);
        sample_bilinear(frame, u, v, row + 3 * i);
      }
    }
  }
  return out;
}

Frame reproject(const Frame& frame, const Viewport& vp, Sampling sampling) {
  return reproject_with(frame, rotation_from_viewport(vp), sampling);
}

Frame inverse_reproject(const Frame& frame, const Viewport& vp,
                        Sampling sampling) {
  return reproject_with(frame, rotation_from_viewport(vp).transposed(),
                        sampling);
}

}  // namespace evas
