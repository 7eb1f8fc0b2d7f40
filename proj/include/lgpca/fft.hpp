#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lgpca {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    cplx wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Bluestein's algorithm: FFT of arbitrary length via a power-of-two convolution.
inline void fft_bluestein(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  size_t m = 1;
  while (m < 2 * n + 1) m <<= 1;
  const double dir = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (size_t k = 0; k < n; ++k) {
    // k^2/2 mod n, computed mod 2n to avoid overflow in the angle
    uintmax_t kk = (static_cast<uintmax_t>(k) * k) % (2 * n);
    double ang = dir * std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> p(m, cplx(0.0)), q(m, cplx(0.0));
  for (size_t k = 0; k < n; ++k) p[k] = a[k] * chirp[k];
  q[0] = std::conj(chirp[0]);
  for (size_t k = 1; k < n; ++k) q[k] = q[m - k] = std::conj(chirp[k]);
  fft_pow2(p, false);
  fft_pow2(q, false);
  for (size_t k = 0; k < m; ++k) p[k] *= q[k];
  fft_pow2(p, true);
  for (size_t k = 0; k < m; ++k) p[k] /= static_cast<double>(m);
  for (size_t k = 0; k < n; ++k) a[k] = p[k] * chirp[k];
}

inline void fft_1d(std::vector<cplx>& a, bool inverse) {
  if (a.empty()) throw std::invalid_argument("fft: empty input");
  if (a.size() == 1) return;
  if (is_pow2(a.size()))
    fft_pow2(a, inverse);
  else
    fft_bluestein(a, inverse);
}

}  // namespace detail

// Forward 2-D DFT of a row-major width x height array. Unnormalized
// (the inverse carries the 1/(w*h) factor), standard DFT bin order.
inline std::vector<cplx> fft2(const std::vector<cplx>& in, int width, int height) {
  if (width <= 0 || height <= 0 || in.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("fft2: bad dimensions");
  std::vector<cplx> data = in;
  std::vector<cplx> row(static_cast<size_t>(width));
  for (int y = 0; y < height; ++y) {
    std::copy_n(data.begin() + static_cast<size_t>(y) * width, width, row.begin());
    detail::fft_1d(row, false);
    std::copy_n(row.begin(), width, data.begin() + static_cast<size_t>(y) * width);
  }
  std::vector<cplx> col(static_cast<size_t>(height));
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) col[y] = data[static_cast<size_t>(y) * width + x];
    detail::fft_1d(col, false);
    for (int y = 0; y < height; ++y) data[static_cast<size_t>(y) * width + x] = col[y];
  }
  return data;
}

inline std::vector<cplx> ifft2(const std::vector<cplx>& in, int width, int height) {
  if (width <= 0 || height <= 0 || in.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("ifft2: bad dimensions");
  std::vector<cplx> data = in;
  std::vector<cplx> row(static_cast<size_t>(width));
  for (int y = 0; y < height; ++y) {
    std::copy_n(data.begin() + static_cast<size_t>(y) * width, width, row.begin());
    detail::fft_1d(row, true);
    std::copy_n(row.begin(), width, data.begin() + static_cast<size_t>(y) * width);
  }
  std::vector<cplx> col(static_cast<size_t>(height));
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) col[y] = data[static_cast<size_t>(y) * width + x];
    detail::fft_1d(col, true);
    for (int y = 0; y < height; ++y) data[static_cast<size_t>(y) * width + x] = col[y];
  }
  const double norm = 1.0 / (static_cast<double>(width) * height);
  for (auto& v : data) v *= norm;
  return data;
}

}  // namespace lgpca
