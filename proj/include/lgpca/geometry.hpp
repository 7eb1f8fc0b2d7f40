#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "lgpca/image.hpp"

namespace lgpca {

// 2x3 affine transform mapping source coordinates to destination coordinates:
// dst = A * src + t. Coordinates follow the landmark convention: origin at the
// top-left pixel centre, x rightward, y downward.
struct Affine {
  // row-major [a b tx; c d ty]
  std::array<double, 6> m{1, 0, 0, 0, 1, 0};

  static Affine similarity(double scale, double angle_rad, double tx, double ty) {
    Affine a;
    double c = std::cos(angle_rad) * scale;
    double s = std::sin(angle_rad) * scale;
    a.m = {c, -s, tx, s, c, ty};
    return a;
  }

  void apply(double x, double y, double& ox, double& oy) const {
    ox = m[0] * x + m[1] * y + m[2];
    oy = m[3] * x + m[4] * y + m[5];
  }

  Affine inverse() const {
    double det = m[0] * m[4] - m[1] * m[3];
    if (det == 0.0) throw std::invalid_argument("Affine::inverse: singular transform");
    Affine r;
    r.m[0] = m[4] / det;
    r.m[1] = -m[1] / det;
    r.m[3] = -m[3] / det;
    r.m[4] = m[0] / det;
    r.m[2] = -(r.m[0] * m[2] + r.m[1] * m[5]);
    r.m[5] = -(r.m[3] * m[2] + r.m[4] * m[5]);
    return r;
  }
};

namespace detail {

// Catmull-Rom style cubic, a = -0.5.
inline double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return (((t - 5.0) * t + 8.0) * t - 4.0) * a;
  return 0.0;
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace detail

// Bicubic sample at a real-valued position, edge replication outside.
inline double sample_bicubic(const GrayImage& img, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double acc = 0.0;
  for (int j = -1; j <= 2; ++j) {
    double wy = detail::cubic_weight(y - (y0 + j));
    if (wy == 0.0) continue;
    int yy = detail::clampi(y0 + j, 0, img.height - 1);
    double row = 0.0;
    for (int i = -1; i <= 2; ++i) {
      double wx = detail::cubic_weight(x - (x0 + i));
      if (wx == 0.0) continue;
      int xx = detail::clampi(x0 + i, 0, img.width - 1);
      row += wx * img.at(xx, yy);
    }
    acc += wy * row;
  }
  return acc;
}

inline double sample_bilinear(const GrayImage& img, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0, fy = y - y0;
  auto g = [&](int xx, int yy) {
    return img.at(detail::clampi(xx, 0, img.width - 1), detail::clampi(yy, 0, img.height - 1));
  };
  return g(x0, y0) * (1 - fx) * (1 - fy) + g(x0 + 1, y0) * fx * (1 - fy) +
         g(x0, y0 + 1) * (1 - fx) * fy + g(x0 + 1, y0 + 1) * fx * fy;
}

// Resamples a dst_w x dst_h raster through the inverse of the given
// source-to-destination affine, bicubic.
inline GrayImage warp_affine(const GrayImage& img, const Affine& src_to_dst, int dst_w, int dst_h) {
  if (img.empty()) throw std::invalid_argument("warp_affine: empty image");
  Affine inv = src_to_dst.inverse();
  GrayImage out(dst_w, dst_h);
  for (int y = 0; y < dst_h; ++y)
    for (int x = 0; x < dst_w; ++x) {
      double sx, sy;
      inv.apply(x, y, sx, sy);
      out.at(x, y) = sample_bicubic(img, sx, sy);
    }
  return out;
}

// Bicubic resize with pixel-centre alignment: output pixel i samples the
// source at (i + 0.5) * srcdim/dstdim - 0.5.
inline GrayImage resize_bicubic(const GrayImage& img, int dst_w, int dst_h) {
  if (img.empty()) throw std::invalid_argument("resize_bicubic: empty image");
  if (dst_w <= 0 || dst_h <= 0) throw std::invalid_argument("resize_bicubic: bad size");
  GrayImage out(dst_w, dst_h);
  double sx = static_cast<double>(img.width) / dst_w;
  double sy = static_cast<double>(img.height) / dst_h;
  for (int y = 0; y < dst_h; ++y) {
    double v = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < dst_w; ++x)
      out.at(x, y) = sample_bicubic(img, (x + 0.5) * sx - 0.5, v);
  }
  return out;
}

// Separable Gaussian smoothing, unit-sum kernel, edge replication.
inline GrayImage gaussian_denoise(const GrayImage& img, double sigma = 0.5, int window = 5) {
  if (img.empty()) throw std::invalid_argument("gaussian_denoise: empty image");
  if (window % 2 == 0 || window < 1) throw std::invalid_argument("gaussian_denoise: window must be odd");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_denoise: sigma must be positive");
  const int r = window / 2;
  std::vector<double> k(window);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += k[i + r];
  }
  for (auto& v : k) v /= sum;

  GrayImage tmp(img.width, img.height), out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * img.at(detail::clampi(x + i, 0, img.width - 1), y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp.at(x, detail::clampi(y + i, 0, img.height - 1));
      out.at(x, y) = acc;
    }
  return out;
}

// CDF remapping over the unmasked pixels only; masked pixels are forced to 0.
// Input values are expected quantized to [0, levels-1]; the mapping is
// floor(cdf * (levels-1)), monotone with full-range output.
inline GrayImage histogram_equalize(const GrayImage& img, const BinaryMask& mask, int levels = 256) {
  if (img.width != mask.width || img.height != mask.height)
    throw std::invalid_argument("histogram_equalize: dimension mismatch");
  if (levels < 2) throw std::invalid_argument("histogram_equalize: levels < 2");
  std::vector<size_t> hist(static_cast<size_t>(levels), 0);
  size_t n = 0;
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    if (!mask.bits[i]) continue;
    double v = img.pixels[i];
    if (v < 0.0 || v > levels - 1 || v != std::floor(v))
      throw std::invalid_argument("histogram_equalize: image not quantized to [0, levels-1]");
    ++hist[static_cast<size_t>(v)];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("histogram_equalize: all pixels masked");
  std::vector<double> map(static_cast<size_t>(levels));
  size_t cum = 0;
  for (int v = 0; v < levels; ++v) {
    cum += hist[v];
    map[v] = std::floor(static_cast<double>(cum) / n * (levels - 1));
  }
  GrayImage out(img.width, img.height);
  for (size_t i = 0; i < img.pixels.size(); ++i)
    out.pixels[i] = mask.bits[i] ? map[static_cast<size_t>(img.pixels[i])] : 0.0;
  return out;
}

// Rounds to the nearest integer level and clamps to [0, levels-1].
inline GrayImage quantize(const GrayImage& img, int levels = 256) {
  GrayImage out = img;
  for (auto& v : out.pixels)
    v = std::clamp(std::floor(v + 0.5), 0.0, static_cast<double>(levels - 1));
  return out;
}

}  // namespace lgpca
