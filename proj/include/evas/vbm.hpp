#pragma once

#include <string>

#include "evas/frame.hpp"

namespace evas {

// Geometry of the packed FOV/Base/Margin composite for a given source size.
// FOV covers the central 120x90 degrees, the margin extends coverage to
// 180x90 degrees, the base is the whole frame downsampled.
struct VbmLayout {
  int src_w = 0;
  int src_h = 0;
  Rect fov;         // in packed frame
  Rect base;        // in packed frame
  Rect margin;      // in packed frame
  Rect fov_src;     // in source frame
  Rect margin_src;  // in source frame
  int packed_w = 0;
  int packed_h = 0;
  int base_factor = 4;
  int margin_factor = 2;

  bool operator==(const VbmLayout&) const = default;
};

struct VbmFrame {
  VbmLayout layout;
  Frame packed;
};

// Requires src_w divisible by 12 and src_h divisible by 4.
VbmLayout vbm_layout(int src_w, int src_h);

// Splits a viewport-recentered frame into FOV crop, 4x-downsampled base and
// 2x-downsampled margin, packed into one raster.
VbmFrame make_vbm(const Frame& reproj);

void unpack_vbm(const VbmFrame& vbm, Frame& fov, Frame& base, Frame& margin);

// Client-side rebuild: upsampled base, margin pasted over it, FOV pasted on
// top. Output is in the same viewport-centered space as make_vbm's input.
Frame reconstruct(const VbmFrame& vbm);

// Sidecar layout record ("VBM1 src_w src_h").
void save_vbm(const VbmFrame& vbm, const std::string& ppm_path,
              const std::string& meta_path);
VbmFrame load_vbm(const std::string& ppm_path, const std::string& meta_path);

}  // namespace evas
