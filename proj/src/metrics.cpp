#include "evas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace evas {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

const std::vector<double>& gaussian_kernel() {
  static const std::vector<double> kernel = [] {
    std::vector<double> k(kWin * kWin);
    double sum = 0;
    for (int y = 0; y < kWin; ++y)
      for (int x = 0; x < kWin; ++x) {
        double dx = x - kWin / 2, dy = y - kWin / 2;
        double v = std::exp(-(dx * dx + dy * dy) / (2 * kSigma * kSigma));
        k[y * kWin + x] = v;
        sum += v;
      }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// Local SSIM for every valid window, (w-10)x(h-10) values.
std::vector<double> ssim_map(const std::vector<double>& a,
                             const std::vector<double>& b, int w, int h) {
  if (w < kWin || h < kWin)
    throw std::invalid_argument("ssim requires planes of at least 11x11");
  if (a.size() != b.size() || a.size() != static_cast<size_t>(w) * h)
    throw std::invalid_argument("ssim: plane size mismatch");
  const std::vector<double>& kern = gaussian_kernel();
  int mw = w - kWin + 1, mh = h - kWin + 1;
  std::vector<double> out(static_cast<size_t>(mw) * mh);
  for (int y = 0; y < mh; ++y) {
    for (int x = 0; x < mw; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int ky = 0; ky < kWin; ++ky) {
        const double* pa = a.data() + static_cast<size_t>(y + ky) * w + x;
        const double* pb = b.data() + static_cast<size_t>(y + ky) * w + x;
        const double* pk = kern.data() + ky * kWin;
        for (int kx = 0; kx < kWin; ++kx) {
          double wgt = pk[kx];
          ma += wgt * pa[kx];
          mb += wgt * pb[kx];
          saa += wgt * pa[kx] * pa[kx];
          sbb += wgt * pb[kx] * pb[kx];
          sab += wgt * pa[kx] * pb[kx];
        }
      }
      double va = saa - ma * ma;
      double vb = sbb - mb * mb;
      double cov = sab - ma * mb;
      out[static_cast<size_t>(y) * mw + x] =
          ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
          ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
    }
  }
  return out;
}

bool in_rect(int x, int y, const Rect& r) {
  return x >= r.x0 && x < r.x0 + r.w && y >= r.y0 && y < r.y0 + r.h;
}

}  // namespace

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("mse: plane size mismatch");
  double sum = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / a.size();
}

double psnr_from_mse(double m) {
  if (m <= 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double psnr(const std::vector<double>& a, const std::vector<double>& b) {
  return psnr_from_mse(mse(a, b));
}

double ssim(const std::vector<double>& a, const std::vector<double>& b,
            int width, int height) {
  std::vector<double> map = ssim_map(a, b, width, height);
  double sum = 0;
  for (double v : map) sum += v;
  return sum / map.size();
}

std::vector<QualityReport> region_quality(const Frame& original,
                                          const Frame& reconstructed,
                                          const VbmLayout& layout) {
  int w = original.width(), h = original.height();
  if (w != layout.src_w || h != layout.src_h ||
      reconstructed.width() != w || reconstructed.height() != h)
    throw std::invalid_argument("region_quality: frame/layout size mismatch");
  std::vector<double> la = to_luma(original);
  std::vector<double> lb = to_luma(reconstructed);
  std::vector<double> smap = ssim_map(la, lb, w, h);
  int mw = w - kWin + 1;
  int mh = h - kWin + 1;

  struct RegionDef {
    std::string name;
    std::function<bool(int, int)> contains;
  };
  const Rect& fov = layout.fov_src;
  const Rect& mar = layout.margin_src;
  std::vector<RegionDef> regions = {
      {"full", [](int, int) { return true; }},
      {"fov", [&](int x, int y) { return in_rect(x, y, fov); }},
      {"margin_ring",
       [&](int x, int y) { return in_rect(x, y, mar) && !in_rect(x, y, fov); }},
      {"base_ring", [&](int x, int y) { return !in_rect(x, y, mar); }},
  };

  std::vector<QualityReport> out;
  for (const RegionDef& reg : regions) {
    double se = 0;
    long long npx = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!reg.contains(x, y)) continue;
        double d = la[static_cast<size_t>(y) * w + x] -
                   lb[static_cast<size_t>(y) * w + x];
        se += d * d;
        ++npx;
      }
    double ssum = 0;
    long long nwin = 0;
    for (int y = 0; y < mh; ++y)
      for (int x = 0; x < mw; ++x) {
        if (!reg.contains(x + kWin / 2, y + kWin / 2)) continue;
        ssum += smap[static_cast<size_t>(y) * mw + x];
        ++nwin;
      }
    QualityReport rep;
    rep.region = reg.name;
    rep.mse = npx ? se / npx : 0.0;
    rep.psnr = psnr_from_mse(rep.mse);
    rep.ssim = nwin ? ssum / nwin : 1.0;
    out.push_back(std::move(rep));
  }
  return out;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kEvas:
      return "evas";
    case Scheme::kNonViewport:
      return "nonviewport";
    case Scheme::kTwoLayer:
      return "twolayer";
  }
  return "?";
}

BandwidthSummary bandwidth_summary(
    const std::vector<BandwidthRecord>& records) {
  BandwidthSummary s;
  std::map<Scheme, std::vector<int>> ticks;
  for (const BandwidthRecord& r : records) {
    if (r.bytes < 0 || r.transmissions > r.recipients)
      throw std::invalid_argument("bandwidth_summary: invalid record");
    s.total_bytes[r.scheme] += r.bytes;
    s.total_transmissions[r.scheme] += r.transmissions;
    ticks[r.scheme].push_back(r.tick);
  }
  const std::vector<int>* ref = nullptr;
  for (auto& [scheme, tk] : ticks) {
    std::sort(tk.begin(), tk.end());
    if (!ref)
      ref = &tk;
    else if (tk != *ref)
      throw std::invalid_argument(
          "bandwidth_summary: schemes cover different tick ranges");
  }
  s.ticks = ref ? static_cast<int>(ref->size()) : 0;
  for (auto& [a, ba] : s.total_bytes)
    for (auto& [b, bb] : s.total_bytes)
      if (a != b && bb > 0)
        s.savings[{a, b}] = 1.0 - static_cast<double>(ba) / bb;
  return s;
}

std::map<std::string, long long> load_encoded_sizes(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open encoded-size table '" + path + "'");
  std::map<std::string, long long> out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("frame_id,bytes", 0) != 0)
    throw std::runtime_error("encoded-size table: missing frame_id,bytes header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("encoded-size table line " +
                               std::to_string(lineno) + ": expected 2 fields");
    out[line.substr(0, comma)] = std::stoll(line.substr(comma + 1));
  }
  return out;
}

}  // namespace evas
