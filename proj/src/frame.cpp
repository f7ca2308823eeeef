#include "evas/frame.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace evas {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("frame dimensions must be >= 1");
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint8_t clamp_u8(int v) {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

// Reads one whitespace-delimited token, skipping '#' comments.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  do {
    tok.push_back(static_cast<char>(c));
  } while ((c = in.get()) != EOF && !std::isspace(c) && c != '#');
  if (c == '#') in.unget();
  return true;
}

int parse_dim(const std::string& tok, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("ppm: malformed ") + what + " '" +
                             tok + "'");
  }
}

}  // namespace

Frame::Frame(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), data_(3LL * width * height, fill) {
  check_dims(width, height);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  check_dims(width, height);
  if (data_.size() != static_cast<size_t>(3LL * width * height))
    throw std::invalid_argument("pixel buffer size does not match dimensions");
}

Frame load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ppm: cannot open '" + path + "'");

  std::string tok;
  if (!next_token(in, tok)) throw std::runtime_error("ppm: empty file");
  if (tok != "P6")
    throw std::runtime_error("ppm: unsupported magic '" + tok + "'");

  std::string wtok, htok, mtok;
  if (!next_token(in, wtok) || !next_token(in, htok) || !next_token(in, mtok))
    throw std::runtime_error("ppm: truncated header");
  int w = parse_dim(wtok, "width");
  int h = parse_dim(htok, "height");
  if (mtok != "255")
    throw std::runtime_error("ppm: unsupported maxval '" + mtok + "'");
  // Exactly one whitespace byte separates the header from the raster.
  std::vector<std::uint8_t> rgb(3LL * w * h);
  in.read(reinterpret_cast<char*>(rgb.data()),
          static_cast<std::streamsize>(rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(rgb.size()))
    throw std::runtime_error("ppm: truncated pixel data");
  return Frame(w, h, std::move(rgb));
}

void save_ppm(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ppm: cannot write '" + path + "'");
  out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data().data()),
            static_cast<std::streamsize>(frame.data().size()));
  if (!out) throw std::runtime_error("ppm: write failed for '" + path + "'");
}

Frame downsample_box(const Frame& frame, int fx, int fy) {
  if (fx < 1 || fy < 1) throw std::invalid_argument("factors must be >= 1");
  if (frame.width() % fx != 0 || frame.height() % fy != 0)
    throw std::invalid_argument("downsample factors must divide dimensions (" +
                                std::to_string(frame.width()) + "x" +
                                std::to_string(frame.height()) + " by " +
                                std::to_string(fx) + "x" + std::to_string(fy) +
                                ")");
  int ow = frame.width() / fx, oh = frame.height() / fy;
  Frame out(ow, oh);
  double inv = 1.0 / (fx * fy);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double acc[3] = {0, 0, 0};
      for (int dy = 0; dy < fy; ++dy) {
        const std::uint8_t* p = frame.px(ox * fx, oy * fy + dy);
        for (int dx = 0; dx < fx; ++dx)
          for (int c = 0; c < 3; ++c) acc[c] += p[3 * dx + c];
      }
      std::uint8_t* q = out.px(ox, oy);
      for (int c = 0; c < 3; ++c) q[c] = clamp_u8(round_half_up(acc[c] * inv));
    }
  }
  return out;
}

Frame upsample_bilinear(const Frame& frame, int fx, int fy) {
  if (fx < 1 || fy < 1) throw std::invalid_argument("factors must be >= 1");
  int w = frame.width(), h = frame.height();
  int ow = w * fx, oh = h * fy;
  Frame out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    double sy = (oy + 0.5) / fy - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double ty = sy - y0;
    int y0c = std::max(0, std::min(h - 1, y0));
    int y1c = std::max(0, std::min(h - 1, y0 + 1));
    for (int ox = 0; ox < ow; ++ox) {
      double sx = (ox + 0.5) / fx - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double tx = sx - x0;
      int x0c = std::max(0, std::min(w - 1, x0));
      int x1c = std::max(0, std::min(w - 1, x0 + 1));
      const std::uint8_t* p00 = frame.px(x0c, y0c);
      const std::uint8_t* p10 = frame.px(x1c, y0c);
      const std::uint8_t* p01 = frame.px(x0c, y1c);
      const std::uint8_t* p11 = frame.px(x1c, y1c);
      std::uint8_t* q = out.px(ox, oy);
      for (int c = 0; c < 3; ++c) {
        double top = p00[c] * (1 - tx) + p10[c] * tx;
        double bot = p01[c] * (1 - tx) + p11[c] * tx;
        q[c] = clamp_u8(round_half_up(top * (1 - ty) + bot * ty));
      }
    }
  }
  return out;
}

Frame crop(const Frame& frame, const Rect& r) {
  if (r.w < 1 || r.h < 1 || r.x0 < 0 || r.y0 < 0 ||
      r.x0 + r.w > frame.width() || r.y0 + r.h > frame.height())
    throw std::invalid_argument("crop rect out of bounds");
  Frame out(r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    std::copy(frame.px(r.x0, r.y0 + y), frame.px(r.x0, r.y0 + y) + 3LL * r.w,
              out.px(0, y));
  return out;
}

Frame paste(Frame dst, const Frame& src, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + src.width() > dst.width() ||
      y0 + src.height() > dst.height())
    throw std::invalid_argument("paste region out of bounds");
  for (int y = 0; y < src.height(); ++y)
    std::copy(src.px(0, y), src.px(0, y) + 3LL * src.width(),
              dst.px(x0, y0 + y));
  return dst;
}

std::vector<double> to_luma(const Frame& frame) {
  std::vector<double> luma(frame.pixel_count());
  const std::uint8_t* p = frame.data().data();
  for (size_t i = 0; i < luma.size(); ++i, p += 3)
    luma[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  return luma;
}

}  // namespace evas
