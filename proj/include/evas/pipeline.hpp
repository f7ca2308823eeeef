#pragma once

#include <string>
#include <vector>

#include "evas/clustering.hpp"
#include "evas/metrics.hpp"
#include "evas/predict.hpp"
#include "evas/vbm.hpp"

namespace evas {

struct SimConfig {
  std::string frames_dir;
  std::vector<std::string> trace_paths;
  std::string trace_cols = "t,yaw,pitch,roll";
  bool trace_degrees = false;
  double tick_rate = 30.0;
  PredictionConfig prediction;
  ClusterConfig clustering;
  std::vector<Scheme> schemes = {Scheme::kEvas, Scheme::kNonViewport,
                                 Scheme::kTwoLayer};
  Sampling sampling = Sampling::kBilinear;
  std::string predictor = "lr";  // lr | gru | perfect
  std::string model_path;       // required for gru
  std::string output_dir;
  unsigned seed = 1;
  bool evaluate_quality = true;
  int max_ticks = 0;  // 0 = no cap
  std::string encoded_sizes_path;
  bool compare_variants = false;
};

// key=value lines, '#' comments; 'trace=' may repeat.
SimConfig load_sim_config(const std::string& path);

enum class GroupingMode { kJoint, kPositionOnly, kAllInOne };

std::string grouping_name(GroupingMode m);

struct TickStats {
  int tick = 0;
  int clusters = 0;
  int noise = 0;
};

struct QualityRecord {
  int tick = 0;
  std::string user;
  std::string variant;
  double fov_mse = 0.0;
};

struct SimResult {
  std::vector<TickStats> ticks;
  std::vector<BandwidthRecord> bandwidth;
  std::vector<QualityRecord> quality;
  BandwidthSummary summary;
  double mean_clusters = 0.0;
  double mean_noise = 0.0;
  double mean_fov_mse = 0.0;
  int users = 0;
  int frame_w = 0;
  int frame_h = 0;
};

SimResult run_simulation(const SimConfig& cfg,
                         GroupingMode mode = GroupingMode::kJoint);

// Ground-truth FOV (user-centered reprojection of gt_frame) against the FOV
// rendered from the cluster's reconstructed VBM frame, as luma MSE.
double fov_quality_loss(const Viewport& user_vp, const Viewport& cluster_vp,
                        const Frame& gt_frame, const VbmFrame& vbm,
                        Sampling sampling);

struct VariantResult {
  std::string variant;
  double mean_fov_mse = 0.0;
};

// Mean FOV quality loss under all-users-one-multicast, position-only
// clustering (omega=1) and joint clustering.
std::vector<VariantResult> compare_clustering_variants(const SimConfig& cfg);

// bandwidth.csv, quality.csv and summary.txt under cfg.output_dir.
void write_sim_outputs(const SimConfig& cfg, const SimResult& result,
                       const std::vector<VariantResult>* variants = nullptr);

// frame_%06d.ppm paths in frames_dir, 1-based and contiguous.
std::vector<std::string> list_frames(const std::string& frames_dir);

std::string frame_id(int index_1based);

}  // namespace evas
