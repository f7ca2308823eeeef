#pragma once

#include <string>
#include <vector>

#include "evas/geometry.hpp"

namespace evas {

struct TraceSample {
  double t = 0.0;  // seconds
  Viewport vp;
};

// One user's head-movement log, timestamps strictly increasing.
struct Trace {
  std::string user_id;
  std::vector<TraceSample> samples;
};

// Scalar-first unit quaternion.
struct Quaternion {
  double q0 = 1.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

Rot3 quat_to_rotation(const Quaternion& q);

// Euler extraction under the yaw/pitch/roll convention used by
// rotation_from_viewport. Near-pole orientations get roll = 0 and the free
// angle folded into yaw. Throws if the norm deviates from 1 by more than 1e-3.
Viewport quat_to_viewport(const Quaternion& q);

// Shortest-path angular distance in [0, pi].
double angular_error(double a, double b);

// Removes 2*pi jumps so consecutive deltas lie in (-pi, pi].
std::vector<double> unwrap_yaw(const std::vector<double>& seq);

// Viewport at an arbitrary time, yaw interpolated along the shortest arc.
// t outside the trace span is an error.
Viewport interpolate_viewport(const Trace& trace, double t);

// Uniform resampling at 1/hz spacing from the first to the last timestamp.
Trace resample_trace(const Trace& trace, double hz);

// Delimited text ingestion. cols names the file's columns in order, from
// {t, yaw, pitch, roll, q0, q1, q2, q3, _} where '_' skips a column.
// Either all four quaternion columns or yaw/pitch/roll must be present.
Trace load_trace(const std::string& path, const std::string& cols,
                 bool degrees, const std::string& user_id = "");

}  // namespace evas
