#pragma once

#include <string>
#include <vector>

#include "evas/trace.hpp"

namespace evas {

inline constexpr int kNoise = -1;

struct UserState {
  std::string user_id;
  Vec3 position;  // unit view direction
  Vec3 motion;    // d(position)/dt, 1/s
};

struct ClusterConfig {
  double eps = 0.15;
  int min_pts = 2;
  double omega = 0.8;
  double motion_dt = 1.0 / 30.0;  // seconds
};

struct ClusterAssignment {
  std::vector<int> labels;  // cluster id or kNoise, per user
  std::vector<Viewport> centers;
  int cluster_count = 0;
};

// View direction on the unit sphere; roll does not move it.
Vec3 viewport_to_point(const Viewport& vp);

// Finite difference of the view direction over dt, ending at t.
Vec3 motion_vector(const Trace& trace, double t, double dt);

// MP(i,j) = |P_i - P_j|, MV(i,j) = |V_i - V_j|, both N*N row-major.
void distance_matrices(const std::vector<UserState>& users,
                       std::vector<double>& mp, std::vector<double>& mv);

// omega * MP/max(MP) + (1-omega) * MV/max(MV); an all-zero matrix keeps its
// zeros. Entries land in [0,1].
std::vector<double> combine(const std::vector<double>& mp,
                            const std::vector<double>& mv, double omega);

// Classic DBSCAN on a precomputed distance matrix, index-order deterministic.
std::vector<int> dbscan(const std::vector<double>& m, int n, double eps,
                        int min_pts);

// Renormalized mean direction per cluster, as (yaw, pitch, roll=0). A
// zero-length mean falls back to the lowest-indexed member.
std::vector<Viewport> cluster_centers(const std::vector<int>& labels,
                                      const std::vector<UserState>& users);

ClusterAssignment cluster_users(const std::vector<UserState>& users,
                                const ClusterConfig& cfg);

}  // namespace evas
