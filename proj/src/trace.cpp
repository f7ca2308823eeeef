#include "evas/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evas {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Interpolates along the shortest arc between two wrapped angles.
double lerp_angle(double a, double b, double t) {
  return wrap_angle(a + wrap_angle(b - a) * t);
}

}  // namespace

Rot3 quat_to_rotation(const Quaternion& q) {
  double w = q.q0, x = q.q1, y = q.q2, z = q.q3;
  Rot3 r;
  r(0, 0) = 1 - 2 * (y * y + z * z);
  r(0, 1) = 2 * (x * y - w * z);
  r(0, 2) = 2 * (x * z + w * y);
  r(1, 0) = 2 * (x * y + w * z);
  r(1, 1) = 1 - 2 * (x * x + z * z);
  r(1, 2) = 2 * (y * z - w * x);
  r(2, 0) = 2 * (x * z - w * y);
  r(2, 1) = 2 * (y * z + w * x);
  r(2, 2) = 1 - 2 * (x * x + y * y);
  return r;
}

Viewport quat_to_viewport(const Quaternion& q) {
  double norm =
      std::sqrt(q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3);
  if (std::abs(norm - 1.0) > 1e-3)
    throw std::invalid_argument("quaternion norm deviates from 1 by more than 1e-3");
  Quaternion n{q.q0 / norm, q.q1 / norm, q.q2 / norm, q.q3 / norm};
  Rot3 r = quat_to_rotation(n);

  Viewport vp;
  double sp = r(2, 0);
  if (sp > 1) sp = 1;
  if (sp < -1) sp = -1;
  vp.pitch = std::asin(sp);
  if (std::abs(sp) > 1.0 - 1e-9) {
    // Gimbal lock: roll is indistinguishable from yaw, fold it into yaw.
    vp.roll = 0;
    if (sp > 0)
      vp.yaw = std::atan2(-r(0, 1), -r(0, 2));
    else
      vp.yaw = -std::atan2(r(0, 1), r(0, 2));
  } else {
    vp.yaw = std::atan2(r(1, 0), r(0, 0));
    vp.roll = std::atan2(r(2, 1), r(2, 2));
  }
  return normalize_viewport(vp);
}

double angular_error(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

std::vector<double> unwrap_yaw(const std::vector<double>& seq) {
  if (seq.empty()) throw std::invalid_argument("unwrap_yaw: empty sequence");
  std::vector<double> out;
  out.reserve(seq.size());
  out.push_back(seq[0]);
  for (size_t i = 1; i < seq.size(); ++i)
    out.push_back(out.back() + wrap_angle(seq[i] - seq[i - 1]));
  return out;
}

Viewport interpolate_viewport(const Trace& trace, double t) {
  const auto& s = trace.samples;
  if (s.size() < 2) throw std::invalid_argument("trace too short");
  if (t < s.front().t - 1e-9 || t > s.back().t + 1e-9)
    throw std::invalid_argument("time outside trace span");
  auto it = std::lower_bound(
      s.begin(), s.end(), t,
      [](const TraceSample& a, double tt) { return a.t < tt; });
  if (it == s.begin()) return s.front().vp;
  if (it == s.end()) return s.back().vp;
  const TraceSample& b = *it;
  const TraceSample& a = *(it - 1);
  double f = (t - a.t) / (b.t - a.t);
  Viewport vp;
  vp.yaw = lerp_angle(a.vp.yaw, b.vp.yaw, f);
  vp.pitch = lerp(a.vp.pitch, b.vp.pitch, f);
  vp.roll = lerp_angle(a.vp.roll, b.vp.roll, f);
  return vp;
}

Trace resample_trace(const Trace& trace, double hz) {
  if (hz <= 0) throw std::invalid_argument("resample rate must be positive");
  const auto& s = trace.samples;
  if (s.size() < 2 || s.back().t - s.front().t < 2.0 / hz)
    throw std::invalid_argument("trace too short to resample at " +
                                std::to_string(hz) + " Hz");
  double dt = 1.0 / hz;
  Trace out;
  out.user_id = trace.user_id;
  long long n = static_cast<long long>(
                    std::floor((s.back().t - s.front().t) / dt + 1e-9)) +
                1;
  out.samples.reserve(n);
  for (long long k = 0; k < n; ++k) {
    double t = s.front().t + k * dt;
    if (t > s.back().t) t = s.back().t;
    out.samples.push_back({t, interpolate_viewport(trace, t)});
  }
  return out;
}

Trace load_trace(const std::string& path, const std::string& cols,
                 bool degrees, const std::string& user_id) {
  std::vector<std::string> names;
  {
    std::stringstream ss(cols);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  int it = -1, iy = -1, ip = -1, ir = -1, iq[4] = {-1, -1, -1, -1};
  for (int i = 0; i < static_cast<int>(names.size()); ++i) {
    const std::string& n = names[i];
    if (n == "t")
      it = i;
    else if (n == "yaw")
      iy = i;
    else if (n == "pitch")
      ip = i;
    else if (n == "roll")
      ir = i;
    else if (n == "q0" || n == "q1" || n == "q2" || n == "q3")
      iq[n[1] - '0'] = i;
    else if (n != "_")
      throw std::invalid_argument("unknown trace column '" + n + "'");
  }
  bool quat = iq[0] >= 0;
  if (it < 0) throw std::invalid_argument("trace columns must include 't'");
  if (quat) {
    if (iq[1] < 0 || iq[2] < 0 || iq[3] < 0)
      throw std::invalid_argument("all of q0..q3 required for quaternion traces");
  } else if (iy < 0 || ip < 0 || ir < 0) {
    throw std::invalid_argument(
        "trace columns must include yaw,pitch,roll or q0..q3");
  }

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  Trace trace;
  trace.user_id = user_id.empty() ? path : user_id;
  std::string line;
  int lineno = 0;
  double scale = degrees ? kPi / 180.0 : 1.0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::stringstream ss(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ss >> tok) toks.push_back(tok);
    if (toks.empty()) continue;  // blank line
    auto numeric = [&](int idx, double& out) {
      if (idx >= static_cast<int>(toks.size())) return false;
      const std::string& s = toks[idx];
      char* end = nullptr;
      out = std::strtod(s.c_str(), &end);
      return end == s.c_str() + s.size();
    };
    TraceSample s;
    if (!numeric(it, s.t)) continue;  // header or comment line
    if (toks.size() < names.size())
      throw std::runtime_error("trace '" + path + "' line " +
                               std::to_string(lineno) + ": expected " +
                               std::to_string(names.size()) + " columns");
    auto field = [&](int idx) {
      double v;
      if (!numeric(idx, v))
        throw std::runtime_error("trace '" + path + "' line " +
                                 std::to_string(lineno) + ": bad number '" +
                                 toks[idx] + "'");
      return v;
    };
    if (quat)
      s.vp = quat_to_viewport(
          {field(iq[0]), field(iq[1]), field(iq[2]), field(iq[3])});
    else
      s.vp = normalize_viewport(
          {field(iy) * scale, field(ip) * scale, field(ir) * scale});
    if (!trace.samples.empty() && s.t <= trace.samples.back().t)
      throw std::runtime_error("trace '" + path + "' line " +
                               std::to_string(lineno) +
                               ": timestamps must be strictly increasing");
    trace.samples.push_back(s);
  }
  if (trace.samples.size() < 2)
    throw std::runtime_error("trace '" + path + "' has fewer than 2 samples");
  return trace;
}

}  // namespace evas
