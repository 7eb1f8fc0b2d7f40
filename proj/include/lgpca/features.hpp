#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpca/filterbank.hpp"

namespace lgpca {

struct WindowSpec {
  int size = 8;
  int step = 6;

  void validate() const {
    if (size < 1 || step < 1 || step > size)
      throw std::invalid_argument("WindowSpec: require 1 <= step <= size");
  }
};

struct Coord {
  int x = 0;
  int y = 0;
  bool operator==(const Coord&) const = default;
};

// Per-orientation lists of maximal-magnitude coordinates, window scan order.
struct FeatureLocations {
  std::vector<std::vector<Coord>> per_orientation;

  size_t total() const {
    size_t n = 0;
    for (const auto& v : per_orientation) n += v.size();
    return n;
  }
};

// Identifier binding a feature vector to its extraction geometry; vectors are
// comparable only when the tags match.
inline std::string layout_tag(const WindowSpec& w, bool use_mask, int num_orients, int num_scales,
                              size_t length) {
  return "w" + std::to_string(w.size) + "s" + std::to_string(w.step) +
         (use_mask ? "m1" : "m0") + "o" + std::to_string(num_orients) + "x" +
         std::to_string(num_scales) + "n" + std::to_string(length);
}

struct FeatureVector {
  std::vector<double> values;
  std::string layout;
};

// Sliding-window maxima over the smallest-scale raster of each orientation.
// Window origins are multiples of the step with the window fully inside the
// raster. Ties go to the pixel closest to the window centre (Euclidean),
// remaining ties row-major. With use_mask, masked pixels are excluded and
// fully-masked windows contribute nothing. One location per window; a pixel
// selected by several overlapping windows is kept once per window.
inline FeatureLocations select_locations(const MagnitudeStack& stack, const WindowSpec& w,
                                         bool use_mask) {
  w.validate();
  if (stack.magnitudes.empty()) throw std::invalid_argument("select_locations: empty stack");
  if (w.size > stack.width || w.size > stack.height)
    throw std::invalid_argument("select_locations: window larger than raster");

  const double cx = (w.size - 1) / 2.0;
  const double cy = (w.size - 1) / 2.0;
  FeatureLocations locs;
  locs.per_orientation.resize(static_cast<size_t>(stack.num_orients));
  for (int o = 1; o <= stack.num_orients; ++o) {
    const GrayImage& mag = stack.raster(o, 1);
    auto& list = locs.per_orientation[o - 1];
    for (int wy = 0; wy + w.size <= stack.height; wy += w.step) {
      for (int wx = 0; wx + w.size <= stack.width; wx += w.step) {
        bool found = false;
        double best = 0.0;
        double best_d2 = 0.0;
        Coord best_c;
        for (int dy = 0; dy < w.size; ++dy) {
          for (int dx = 0; dx < w.size; ++dx) {
            int x = wx + dx, y = wy + dy;
            if (use_mask && !stack.mask.at(x, y)) continue;
            double v = mag.at(x, y);
            double d2 = (dx - cx) * (dx - cx) + (dy - cy) * (dy - cy);
            if (!found || v > best || (v == best && d2 < best_d2)) {
              found = true;
              best = v;
              best_d2 = d2;
              best_c = {x, y};
            }
          }
        }
        if (found) list.push_back(best_c);
      }
    }
  }
  return locs;
}

// Optional per-orientation dedup of coincident maxima from overlapping
// windows (off by default: the shipped feature counts keep one value per
// window).
inline FeatureLocations dedup_locations(const FeatureLocations& locs) {
  FeatureLocations out;
  out.per_orientation.resize(locs.per_orientation.size());
  for (size_t o = 0; o < locs.per_orientation.size(); ++o) {
    auto& dst = out.per_orientation[o];
    for (const Coord& c : locs.per_orientation[o])
      if (std::find(dst.begin(), dst.end(), c) == dst.end()) dst.push_back(c);
  }
  return out;
}

// Values ordered orientation-major, then location in scan order, then scale
// 1..Ns. The same coordinates found at scale 1 are reused for every scale.
inline FeatureVector extract_features(const MagnitudeStack& stack, const FeatureLocations& locs,
                                      const WindowSpec& w, bool use_mask) {
  if (locs.per_orientation.size() != static_cast<size_t>(stack.num_orients))
    throw std::invalid_argument("extract_features: orientation count mismatch");
  FeatureVector fv;
  fv.values.reserve(locs.total() * stack.num_scales);
  for (int o = 1; o <= stack.num_orients; ++o) {
    for (const Coord& c : locs.per_orientation[o - 1]) {
      if (c.x < 0 || c.x >= stack.width || c.y < 0 || c.y >= stack.height)
        throw std::invalid_argument("extract_features: location out of bounds");
      for (int s = 1; s <= stack.num_scales; ++s) fv.values.push_back(stack.raster(o, s).at(c.x, c.y));
    }
  }
  fv.layout = layout_tag(w, use_mask, stack.num_orients, stack.num_scales, fv.values.size());
  return fv;
}

// Grayscale baseline features: the unmasked pixels of the normalized image in
// row-major order (the traditional eigenface input).
inline FeatureVector grayscale_features(const NormalizedFace& face) {
  FeatureVector fv;
  for (size_t i = 0; i < face.image.pixels.size(); ++i)
    if (face.mask.bits[i]) fv.values.push_back(face.image.pixels[i]);
  fv.layout = "gray_n" + std::to_string(fv.values.size());
  return fv;
}

}  // namespace lgpca
