#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgpca {

// Row-major grayscale raster. On disk values are 8-bit; in memory they are
// real-valued so filtered/interpolated images can be carried without
// quantization.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("GrayImage: non-positive dimensions");
    pixels.assign(static_cast<size_t>(w) * h, fill);
  }

  double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }
  size_t size() const { return pixels.size(); }
};

// Row-major boolean raster; true = unmasked (inside the face).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("BinaryMask: non-positive dimensions");
    bits.assign(static_cast<size_t>(w) * h, fill ? 1 : 0);
  }

  bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

  size_t unmasked_count() const {
    return static_cast<size_t>(std::count(bits.begin(), bits.end(), uint8_t(1)));
  }
};

inline GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask) {
  if (img.width != mask.width || img.height != mask.height)
    throw std::invalid_argument("apply_mask: dimension mismatch");
  GrayImage out = img;
  for (size_t i = 0; i < out.pixels.size(); ++i)
    if (!mask.bits[i]) out.pixels[i] = 0.0;
  return out;
}

// Binary PGM (P5), 8-bit only.
inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 PGM: " + path);
  auto next_token = [&in, &path]() {
    // Skips whitespace and '#' comment lines.
    std::string tok;
    for (;;) {
      in >> tok;
      if (!in) throw std::runtime_error("read_pgm: truncated header: " + path);
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
  };
  int w = std::stoi(next_token());
  int h = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (w <= 0 || h <= 0) throw std::runtime_error("read_pgm: bad dimensions: " + path);
  if (maxval != 255) throw std::runtime_error("read_pgm: only 8-bit PGM supported: " + path);
  in.get();  // single whitespace after maxval
  std::vector<uint8_t> raw(static_cast<size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("read_pgm: truncated pixel data: " + path);
  GrayImage img(w, h);
  for (size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

inline void write_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<uint8_t> raw(img.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    double v = std::clamp(img.pixels[i], 0.0, 255.0);
    raw[i] = static_cast<uint8_t>(v + 0.5);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("write_pgm: write failed: " + path);
}

// Linearly rescales an arbitrary raster to [0,255] for debug export.
inline GrayImage rescale_for_export(const GrayImage& img) {
  auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  GrayImage out(img.width, img.height);
  double range = *mx - *mn;
  if (range <= 0.0) return out;
  for (size_t i = 0; i < img.pixels.size(); ++i)
    out.pixels[i] = (img.pixels[i] - *mn) / range * 255.0;
  return out;
}

}  // namespace lgpca
