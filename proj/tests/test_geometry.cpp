#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "evas/geometry.hpp"
#include "evas/metrics.hpp"
#include "support/fixtures.hpp"

using namespace evas;

namespace {
constexpr double kPi = 3.14159265358979323846;

Viewport random_viewport(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng) * kPi, u(rng) * kPi / 2, u(rng) * kPi};
}

double ortho_residual(const Rot3& r) {
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int k = 0; k < 3; ++k) dot += r(i, k) * r(j, k);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double det3(const Rot3& r) {
  return r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
         r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
         r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
}

Frame column_shift(const Frame& f, int k) {
  Frame out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      int sx = (x + k) % f.width();
      if (sx < 0) sx += f.width();
      const std::uint8_t* p = f.px(sx, y);
      std::uint8_t* q = out.px(x, y);
      q[0] = p[0];
      q[1] = p[1];
      q[2] = p[2];
    }
  return out;
}

}  // namespace

TEST_CASE("plane_to_sphere anchor points") {
  Vec3 c = plane_to_sphere(1920, 1024, 3840, 2048);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(std::abs(c.y) < 1e-12);
  CHECK(std::abs(c.z) < 1e-12);

  Vec3 left = plane_to_sphere(0, 1024, 3840, 2048);
  CHECK(left.x == doctest::Approx(-1.0));

  Vec3 pole = plane_to_sphere(123.0, 0, 3840, 2048);
  CHECK(pole.z == doctest::Approx(1.0));
  CHECK(std::abs(pole.x) < 1e-12);
}

TEST_CASE("sphere_to_plane anchors and pole convention") {
  double u, v;
  sphere_to_plane({1, 0, 0}, 3840, 2048, u, v);
  CHECK(u == doctest::Approx(1920));
  CHECK(v == doctest::Approx(1024));
  sphere_to_plane({0, 0, 1}, 3840, 2048, u, v);
  CHECK(u == doctest::Approx(1920));
  CHECK(v == doctest::Approx(0));
  CHECK_THROWS_AS((sphere_to_plane({1, 1, 0}, 3840, 2048, u, v)),
                  std::invalid_argument);
}

TEST_CASE("sphere<->plane round trip within 1e-9 px") {
  int w = 384, h = 204;
  for (int yi = 1; yi < 40; ++yi)
    for (int xi = 0; xi < 40; ++xi) {
      double u0 = xi * w / 40.0, v0 = yi * h / 40.0;
      double u1, v1;
      sphere_to_plane(plane_to_sphere(u0, v0, w, h), w, h, u1, v1);
      double du = std::abs(u1 - u0);
      du = std::min(du, std::abs(du - w));
      CHECK(du < 1e-9);
      CHECK(std::abs(v1 - v0) < 1e-9);
    }
}

TEST_CASE("rotation_from_viewport basics") {
  Rot3 id = rotation_from_viewport({0, 0, 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(id(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  Vec3 fwd = rotation_from_viewport({kPi / 2, 0, 0}).apply({1, 0, 0});
  CHECK(fwd.y == doctest::Approx(1.0));
  Vec3 up = rotation_from_viewport({0, kPi / 2, 0}).apply({1, 0, 0});
  CHECK(up.z == doctest::Approx(1.0));
}

TEST_CASE("rotation matrices stay orthonormal with det +1") {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    Rot3 r = rotation_from_viewport(random_viewport(rng));
    CHECK(ortho_residual(r) < 1e-9);
    CHECK(std::abs(det3(r) - 1.0) < 1e-9);
  }
}

TEST_CASE("reproject identity viewport is bit exact") {
  Frame f = fixtures::random_frame(48, 24, 2);
  CHECK(reproject(f, {0, 0, 0}, Sampling::kNearest) == f);
  CHECK(inverse_reproject(f, {0, 0, 0}, Sampling::kNearest) == f);
}

TEST_CASE("pure yaw by whole pixels is a circular column shift") {
  Frame f = fixtures::random_frame(60, 30, 9);
  for (int k : {1, 7, 30, 59}) {
    Viewport vp{2 * kPi * k / f.width(), 0, 0};
    CHECK(reproject(f, vp, Sampling::kNearest) == column_shift(f, k));
  }
}

TEST_CASE("inverse_reproject undoes whole-pixel yaw exactly") {
  Frame f = fixtures::random_frame(60, 30, 13);
  Viewport vp{2 * kPi * 11 / f.width(), 0, 0};
  CHECK(inverse_reproject(reproject(f, vp, Sampling::kNearest), vp,
                          Sampling::kNearest) == f);
}

TEST_CASE("double reprojection keeps a smooth gradient above 35 dB") {
  Frame f = fixtures::gradient_frame(240, 120);
  Viewport vp{0.4, 0.2, 0.1};
  Frame fwd = reproject(f, vp, Sampling::kBilinear);
  Frame back = inverse_reproject(fwd, vp, Sampling::kBilinear);
  CHECK(psnr(to_luma(f), to_luma(back)) >= 35.0);
}

TEST_CASE("reproject preserves constant frames") {
  Frame c(36, 12, 93);
  CHECK(reproject(c, {1.0, 0.5, 0.25}, Sampling::kNearest) == c);
  CHECK(reproject(c, {1.0, 0.5, 0.25}, Sampling::kBilinear) == c);
}

TEST_CASE("reproject keeps mean luma of natural content stable") {
  Frame f = fixtures::natural_frame(240, 120, 21);
  Frame r = reproject(f, {0.8, 0.3, 0.0}, Sampling::kBilinear);
  auto mean = [](const Frame& fr) {
    std::vector<double> l = to_luma(fr);
    double s = 0;
    for (double v : l) s += v;
    return s / l.size();
  };
  CHECK(std::abs(mean(f) - mean(r)) < 3.0);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}
