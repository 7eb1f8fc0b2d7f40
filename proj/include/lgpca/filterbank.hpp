#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lgpca/fft.hpp"
#include "lgpca/image.hpp"
#include "lgpca/normalize.hpp"

namespace lgpca {

struct FilterParams {
  double lambda0 = 5.0;      // wavelength of the smallest-scale filter, pixels
  double scale_factor = 1.6; // ratio between successive scale wavelengths
  double sigma_on_f = 0.75;  // radial bandwidth ratio
  int num_scales = 4;
  int num_orients = 6;
  double theta_scale = 1.5;  // angular sigma = orientation spacing / theta_scale

  void validate() const {
    if (lambda0 <= 0 || scale_factor <= 0 || sigma_on_f <= 0 || theta_scale <= 0 ||
        num_scales < 1 || num_orients < 1)
      throw std::invalid_argument("FilterParams: all parameters must be positive");
  }

  double wavelength(int scale_index) const {  // 1-based
    return lambda0 * std::pow(scale_factor, scale_index - 1);
  }
  double orientation(int orient_index) const {  // 1-based
    return std::numbers::pi * (orient_index - 1) / num_orients;
  }
};

// One frequency-domain transfer function, real-valued in [0,1], standard DFT
// bin order, DC bin exactly 0.
struct FrequencyFilter {
  int width = 0;
  int height = 0;
  std::vector<double> transfer;
  int scale_index = 0;
  int orient_index = 0;
};

using FilterBank = std::vector<FrequencyFilter>;

// Filtered magnitudes, one raster per (orientation, scale), orientation-major.
struct MagnitudeStack {
  int width = 0;
  int height = 0;
  int num_orients = 0;
  int num_scales = 0;
  std::vector<GrayImage> magnitudes;  // index o * num_scales + s
  BinaryMask mask;

  const GrayImage& raster(int orient_index, int scale_index) const {  // 1-based
    return magnitudes[static_cast<size_t>(orient_index - 1) * num_scales + (scale_index - 1)];
  }
};

namespace detail {

// DFT bin index to normalized frequency in cycles/pixel, wrapped to (-0.5, 0.5].
inline double bin_frequency(int k, int n) {
  double f = static_cast<double>(k) / n;
  if (f > 0.5) f -= 1.0;
  return f;
}

// Wrap-aware angular distance in (-pi, pi].
inline double angular_distance(double theta, double theta_o) {
  return std::atan2(std::sin(theta - theta_o), std::cos(theta - theta_o));
}

}  // namespace detail

inline FrequencyFilter build_filter(int width, int height, int scale_index, int orient_index,
                                    const FilterParams& p) {
  p.validate();
  if (width <= 0 || height <= 0) throw std::invalid_argument("build_filter: bad dimensions");
  if (scale_index < 1 || scale_index > p.num_scales)
    throw std::invalid_argument("build_filter: scale index out of range");
  if (orient_index < 1 || orient_index > p.num_orients)
    throw std::invalid_argument("build_filter: orientation index out of range");

  const double f0 = 1.0 / p.wavelength(scale_index);
  const double theta_o = p.orientation(orient_index);
  const double dtheta = std::numbers::pi / p.num_orients;
  const double sigma_theta = dtheta / p.theta_scale;
  const double log_sigma_f = std::log(p.sigma_on_f);

  FrequencyFilter filt;
  filt.width = width;
  filt.height = height;
  filt.scale_index = scale_index;
  filt.orient_index = orient_index;
  filt.transfer.resize(static_cast<size_t>(width) * height);
  for (int v = 0; v < height; ++v) {
    double fy = detail::bin_frequency(v, height);
    for (int u = 0; u < width; ++u) {
      double fx = detail::bin_frequency(u, width);
      double f = std::hypot(fx, fy);
      double g = 0.0;
      if (f > 0.0) {
        double lr = std::log(f / f0);
        double radial = std::exp(-(lr * lr) / (2.0 * log_sigma_f * log_sigma_f));
        double ad = detail::angular_distance(std::atan2(fy, fx), theta_o);
        double angular = std::exp(-(ad * ad) / (2.0 * sigma_theta * sigma_theta));
        g = radial * angular;
      }
      filt.transfer[static_cast<size_t>(v) * width + u] = g;
    }
  }
  return filt;
}

// Orientation-major, scale-minor ordering: (1,1), (1,2), ..., (1,Ns), (2,1), ...
inline FilterBank build_bank(int width, int height, const FilterParams& p) {
  p.validate();
  FilterBank bank;
  bank.reserve(static_cast<size_t>(p.num_orients) * p.num_scales);
  for (int o = 1; o <= p.num_orients; ++o)
    for (int s = 1; s <= p.num_scales; ++s)
      bank.push_back(build_filter(width, height, s, o, p));
  return bank;
}

// Per filter: FFT2 of the masked face, pointwise multiply by the transfer,
// inverse FFT2, complex magnitude, mask.
inline MagnitudeStack filter_magnitude(const NormalizedFace& face, const FilterBank& bank) {
  if (bank.empty()) throw std::invalid_argument("filter_magnitude: empty bank");
  const int w = face.image.width, h = face.image.height;
  for (const auto& f : bank)
    if (f.width != w || f.height != h)
      throw std::invalid_argument("filter_magnitude: filter/image dimension mismatch");

  std::vector<cplx> input(face.image.pixels.begin(), face.image.pixels.end());
  std::vector<cplx> spectrum = fft2(input, w, h);

  int no = 0, ns = 0;
  for (const auto& f : bank) {
    no = std::max(no, f.orient_index);
    ns = std::max(ns, f.scale_index);
  }

  MagnitudeStack stack;
  stack.width = w;
  stack.height = h;
  stack.num_orients = no;
  stack.num_scales = ns;
  stack.mask = face.mask;
  stack.magnitudes.assign(static_cast<size_t>(no) * ns, GrayImage(w, h));
  std::vector<cplx> prod(spectrum.size());
  for (const auto& f : bank) {
    for (size_t i = 0; i < spectrum.size(); ++i) prod[i] = spectrum[i] * f.transfer[i];
    std::vector<cplx> response = ifft2(prod, w, h);
    GrayImage& mag = stack.magnitudes[static_cast<size_t>(f.orient_index - 1) * ns +
                                      (f.scale_index - 1)];
    for (size_t i = 0; i < response.size(); ++i)
      mag.pixels[i] = face.mask.bits[i] ? std::abs(response[i]) : 0.0;
  }
  return stack;
}

}  // namespace lgpca
