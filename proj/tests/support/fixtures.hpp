#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "evas/frame.hpp"
#include "evas/trace.hpp"

namespace fixtures {

inline evas::Frame random_frame(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<std::uint8_t> rgb(3LL * w * h);
  for (auto& b : rgb) b = static_cast<std::uint8_t>(dist(rng));
  return evas::Frame(w, h, std::move(rgb));
}

// Smooth horizontal gradient with a mild vertical ramp.
inline evas::Frame gradient_frame(int w, int h) {
  evas::Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = f.px(x, y);
      p[0] = static_cast<std::uint8_t>(255.0 * x / (w - 1) + 0.5);
      p[1] = static_cast<std::uint8_t>(255.0 * y / (h - 1) + 0.5);
      p[2] = static_cast<std::uint8_t>(
          0.5 * (255.0 * x / (w - 1) + 255.0 * y / (h - 1)) + 0.5);
    }
  return f;
}

// Multi-octave value noise; stands in for photographic content.
inline evas::Frame natural_frame(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<std::vector<double>> planes(3,
                                          std::vector<double>(1LL * w * h, 0));
  double amp = 1.0, total = 0.0;
  for (int cell = 128; cell >= 8; cell /= 2, amp *= 0.55) {
    int gw = w / cell + 2, gh = h / cell + 2;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> lattice(1LL * gw * gh);
      for (double& v : lattice) v = dist(rng);
      for (int y = 0; y < h; ++y) {
        double fy = static_cast<double>(y) / cell;
        int y0 = static_cast<int>(fy);
        double ty = fy - y0;
        for (int x = 0; x < w; ++x) {
          double fx = static_cast<double>(x) / cell;
          int x0 = static_cast<int>(fx);
          double tx = fx - x0;
          double v00 = lattice[1LL * y0 * gw + x0];
          double v10 = lattice[1LL * y0 * gw + x0 + 1];
          double v01 = lattice[1LL * (y0 + 1) * gw + x0];
          double v11 = lattice[1LL * (y0 + 1) * gw + x0 + 1];
          double v = (v00 * (1 - tx) + v10 * tx) * (1 - ty) +
                     (v01 * (1 - tx) + v11 * tx) * ty;
          planes[c][1LL * y * w + x] += amp * v;
        }
      }
    }
    total += amp;
  }
  evas::Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = f.px(x, y);
      for (int c = 0; c < 3; ++c) {
        double v = planes[c][1LL * y * w + x] / total;
        p[c] = static_cast<std::uint8_t>(v * 255.0 + 0.5);
      }
    }
  return f;
}

// Smooth head movement: two incommensurate sinusoids per angle plus drift.
inline evas::Trace synthetic_trace(const std::string& id, double duration,
                                   double hz, unsigned seed,
                                   double yaw_center = 0.0,
                                   double yaw_amp = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.28318);
  std::uniform_real_distribution<double> period(3.0, 9.0);
  double p1 = period(rng), p2 = period(rng) * 1.7;
  double f1 = phase(rng), f2 = phase(rng), f3 = phase(rng), f4 = phase(rng);
  evas::Trace t;
  t.user_id = id;
  int n = static_cast<int>(duration * hz) + 1;
  for (int k = 0; k < n; ++k) {
    double s = k / hz;
    evas::Viewport vp;
    vp.yaw = yaw_center + yaw_amp * (0.7 * std::sin(6.28318 * s / p1 + f1) +
                                     0.3 * std::sin(6.28318 * s / p2 + f2));
    vp.pitch = 0.3 * std::sin(6.28318 * s / (p1 * 1.3) + f3);
    vp.roll = 0.1 * std::sin(6.28318 * s / (p2 * 0.8) + f4);
    t.samples.push_back({s, evas::normalize_viewport(vp)});
  }
  return t;
}

}  // namespace fixtures
