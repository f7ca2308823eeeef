#include "evas/vbm.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evas {

VbmLayout vbm_layout(int src_w, int src_h) {
  if (src_w < 12 || src_h < 4 || src_w % 12 != 0 || src_h % 4 != 0)
    throw std::invalid_argument(
        "vbm layout: width must be a positive multiple of 12 and height of 4, "
        "got " +
        std::to_string(src_w) + "x" + std::to_string(src_h));
  VbmLayout l;
  l.src_w = src_w;
  l.src_h = src_h;
  l.fov_src = {src_w / 3, src_h / 4, src_w / 3, src_h / 2};
  l.margin_src = {src_w / 4, src_h / 4, src_w / 2, src_h / 2};
  l.fov = {0, 0, src_w / 3, src_h / 2};
  l.base = {src_w / 3, 0, src_w / 4, src_h / 4};
  l.margin = {src_w / 3, src_h / 4, src_w / 4, src_h / 4};
  l.packed_w = src_w / 3 + src_w / 4;
  l.packed_h = src_h / 2;
  return l;
}

VbmFrame make_vbm(const Frame& reproj) {
  VbmLayout l = vbm_layout(reproj.width(), reproj.height());
  Frame fov = crop(reproj, l.fov_src);
  Frame base = downsample_box(reproj, l.base_factor, l.base_factor);
  Frame margin =
      downsample_box(crop(reproj, l.margin_src), l.margin_factor, l.margin_factor);
  Frame packed(l.packed_w, l.packed_h);
  packed = paste(std::move(packed), fov, l.fov.x0, l.fov.y0);
  packed = paste(std::move(packed), base, l.base.x0, l.base.y0);
  packed = paste(std::move(packed), margin, l.margin.x0, l.margin.y0);
  return {l, std::move(packed)};
}

void unpack_vbm(const VbmFrame& vbm, Frame& fov, Frame& base, Frame& margin) {
  const VbmLayout& l = vbm.layout;
  if (vbm.packed.width() != l.packed_w || vbm.packed.height() != l.packed_h)
    throw std::invalid_argument("vbm: packed frame does not match layout");
  fov = crop(vbm.packed, l.fov);
  base = crop(vbm.packed, l.base);
  margin = crop(vbm.packed, l.margin);
}

Frame reconstruct(const VbmFrame& vbm) {
  Frame fov, base, margin;
  unpack_vbm(vbm, fov, base, margin);
  const VbmLayout& l = vbm.layout;
  Frame out = upsample_bilinear(base, l.base_factor, l.base_factor);
  out = paste(std::move(out),
              upsample_bilinear(margin, l.margin_factor, l.margin_factor),
              l.margin_src.x0, l.margin_src.y0);
  out = paste(std::move(out), fov, l.fov_src.x0, l.fov_src.y0);
  return out;
}

void save_vbm(const VbmFrame& vbm, const std::string& ppm_path,
              const std::string& meta_path) {
  save_ppm(vbm.packed, ppm_path);
  std::ofstream out(meta_path);
  if (!out) throw std::runtime_error("vbm: cannot write '" + meta_path + "'");
  out << "VBM1 " << vbm.layout.src_w << ' ' << vbm.layout.src_h << '\n';
}

VbmFrame load_vbm(const std::string& ppm_path, const std::string& meta_path) {
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("vbm: cannot open '" + meta_path + "'");
  std::string magic;
  int w = 0, h = 0;
  if (!(in >> magic >> w >> h) || magic != "VBM1")
    throw std::runtime_error("vbm: malformed sidecar '" + meta_path + "'");
  VbmFrame vbm{vbm_layout(w, h), load_ppm(ppm_path)};
  if (vbm.packed.width() != vbm.layout.packed_w ||
      vbm.packed.height() != vbm.layout.packed_h)
    throw std::runtime_error("vbm: packed frame does not match sidecar layout");
  return vbm;
}

}  // namespace evas
