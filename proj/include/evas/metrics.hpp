#pragma once

#include <map>
#include <string>
#include <vector>

#include "evas/frame.hpp"
#include "evas/vbm.hpp"

namespace evas {

struct QualityReport {
  std::string region;  // full | fov | margin_ring | base_ring
  double mse = 0.0;
  double psnr = 0.0;  // +inf when mse == 0
  double ssim = 1.0;
};

double mse(const std::vector<double>& a, const std::vector<double>& b);
double psnr_from_mse(double m);
double psnr(const std::vector<double>& a, const std::vector<double>& b);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, C1=(0.01*255)^2,
// C2=(0.03*255)^2, valid windows only (no padding). Planes must be at least
// 11x11.
double ssim(const std::vector<double>& a, const std::vector<double>& b,
            int width, int height);

// Quality of the reconstruction per layout region: full frame, FOV, margin
// ring (margin minus FOV) and base ring (outside the margin). Ring SSIM
// averages the local SSIM of valid windows whose centers fall in the region.
std::vector<QualityReport> region_quality(const Frame& original,
                                          const Frame& reconstructed,
                                          const VbmLayout& layout);

enum class Scheme { kEvas, kNonViewport, kTwoLayer };

std::string scheme_name(Scheme s);

struct BandwidthRecord {
  Scheme scheme = Scheme::kEvas;
  int tick = 0;
  long long bytes = 0;
  int recipients = 0;
  int transmissions = 0;
};

struct BandwidthSummary {
  std::map<Scheme, long long> total_bytes;
  std::map<Scheme, long long> total_transmissions;
  // savings[{a,b}] = 1 - bytes(a)/bytes(b)
  std::map<std::pair<Scheme, Scheme>, double> savings;
  int ticks = 0;
};

// Requires every present scheme to cover the same set of ticks.
BandwidthSummary bandwidth_summary(const std::vector<BandwidthRecord>& records);

// Optional encoded-size override table, CSV with header "frame_id,bytes".
std::map<std::string, long long> load_encoded_sizes(const std::string& path);

}  // namespace evas
