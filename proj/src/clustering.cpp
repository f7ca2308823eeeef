#include "evas/clustering.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace evas {

namespace {

double dist3(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<int> neighbors(const std::vector<double>& m, int n, int i,
                           double eps) {
  std::vector<int> out;
  for (int j = 0; j < n; ++j)
    if (m[1LL * i * n + j] <= eps) out.push_back(j);
  return out;
}

}  // namespace

Vec3 viewport_to_point(const Viewport& vp) {
  return {std::cos(vp.yaw) * std::cos(vp.pitch),
          std::sin(vp.yaw) * std::cos(vp.pitch), std::sin(vp.pitch)};
}

Vec3 motion_vector(const Trace& trace, double t, double dt) {
  if (dt <= 0) throw std::invalid_argument("motion_vector: dt must be positive");
  Vec3 p1 = viewport_to_point(interpolate_viewport(trace, t));
  Vec3 p0 = viewport_to_point(interpolate_viewport(trace, t - dt));
  return {(p1.x - p0.x) / dt, (p1.y - p0.y) / dt, (p1.z - p0.z) / dt};
}

void distance_matrices(const std::vector<UserState>& users,
                       std::vector<double>& mp, std::vector<double>& mv) {
  size_t n = users.size();
  mp.assign(n * n, 0.0);
  mv.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double dp = dist3(users[i].position, users[j].position);
      double dv = dist3(users[i].motion, users[j].motion);
      mp[i * n + j] = mp[j * n + i] = dp;
      mv[i * n + j] = mv[j * n + i] = dv;
    }
}

std::vector<double> combine(const std::vector<double>& mp,
                            const std::vector<double>& mv, double omega) {
  if (mp.size() != mv.size())
    throw std::invalid_argument("combine: matrix size mismatch");
  if (omega < 0 || omega > 1)
    throw std::invalid_argument("combine: omega must be in [0,1]");
  double maxp = 0, maxv = 0;
  for (double v : mp) maxp = std::max(maxp, v);
  for (double v : mv) maxv = std::max(maxv, v);
  // divide rather than multiply by the reciprocal so omega endpoints return
  // the normalized matrix bit-exactly
  std::vector<double> out(mp.size());
  for (size_t i = 0; i < mp.size(); ++i) {
    double np = maxp > 0 ? mp[i] / maxp : 0.0;
    double nv = maxv > 0 ? mv[i] / maxv : 0.0;
    out[i] = omega * np + (1.0 - omega) * nv;
  }
  return out;
}

std::vector<int> dbscan(const std::vector<double>& m, int n, double eps,
                        int min_pts) {
  if (m.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("dbscan: matrix size mismatch");
  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int cid = 0;
  for (int i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    std::vector<int> seed = neighbors(m, n, i, eps);
    if (static_cast<int>(seed.size()) < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cid;
    std::deque<int> queue(seed.begin(), seed.end());
    while (!queue.empty()) {
      int j = queue.front();
      queue.pop_front();
      if (labels[j] == kNoise) labels[j] = cid;  // border point
      if (labels[j] != kUnvisited) continue;
      labels[j] = cid;
      std::vector<int> nj = neighbors(m, n, j, eps);
      if (static_cast<int>(nj.size()) >= min_pts)
        queue.insert(queue.end(), nj.begin(), nj.end());
    }
    ++cid;
  }
  return labels;
}

std::vector<Viewport> cluster_centers(const std::vector<int>& labels,
                                      const std::vector<UserState>& users) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<Viewport> centers(k);
  for (int c = 0; c < k; ++c) {
    Vec3 sum{0, 0, 0};
    int first = -1;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != c) continue;
      if (first < 0) first = static_cast<int>(i);
      sum.x += users[i].position.x;
      sum.y += users[i].position.y;
      sum.z += users[i].position.z;
    }
    double norm = std::sqrt(sum.x * sum.x + sum.y * sum.y + sum.z * sum.z);
    Vec3 p;
    if (norm < 1e-12) {
      p = users[first].position;  // degenerate zero mean
    } else {
      p = {sum.x / norm, sum.y / norm, sum.z / norm};
    }
    double z = p.z < -1 ? -1 : (p.z > 1 ? 1 : p.z);
    centers[c] = {std::atan2(p.y, p.x), std::asin(z), 0.0};
  }
  return centers;
}

ClusterAssignment cluster_users(const std::vector<UserState>& users,
                                const ClusterConfig& cfg) {
  std::vector<double> mp, mv;
  distance_matrices(users, mp, mv);
  std::vector<double> m = combine(mp, mv, cfg.omega);
  ClusterAssignment out;
  out.labels =
      dbscan(m, static_cast<int>(users.size()), cfg.eps, cfg.min_pts);
  out.centers = cluster_centers(out.labels, users);
  out.cluster_count = static_cast<int>(out.centers.size());
  return out;
}

}  // namespace evas
