#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evas {

// Axis-aligned pixel rectangle, origin top-left.
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Rect&) const = default;
};

// Immutable-by-convention 8-bit RGB raster, row-major, 3 bytes per pixel.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, std::uint8_t fill = 0);
  Frame(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  long long pixel_count() const { return 1LL * width_ * height_; }

  const std::uint8_t* px(int x, int y) const {
    return data_.data() + 3 * (1LL * y * width_ + x);
  }
  std::uint8_t* px(int x, int y) {
    return data_.data() + 3 * (1LL * y * width_ + x);
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  bool operator==(const Frame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Binary P6, maxval 255 only. Throws std::runtime_error with a distinct
// message for bad magic, bad header, unsupported maxval and truncated data.
Frame load_ppm(const std::string& path);
void save_ppm(const Frame& frame, const std::string& path);

// Box average over fx x fy blocks, rounded half-up. Factors must divide the
// frame dimensions exactly.
Frame downsample_box(const Frame& frame, int fx, int fy);

// Bilinear upsampling with half-pixel-center alignment and edge clamping.
Frame upsample_bilinear(const Frame& frame, int fx, int fy);

Frame crop(const Frame& frame, const Rect& r);
Frame paste(Frame dst, const Frame& src, int x0, int y0);

// Rec.601 luma, unrounded.
std::vector<double> to_luma(const Frame& frame);

}  // namespace evas
