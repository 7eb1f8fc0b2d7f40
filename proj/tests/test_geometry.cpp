#include <doctest.h>

#include <cmath>
#include <random>

#include "lgpca/geometry.hpp"

using namespace lgpca;

TEST_CASE("Affine similarity, apply and inverse") {
  Affine a = Affine::similarity(2.0, 3.14159265358979323846 / 2.0, 3.0, -1.0);
  double x, y;
  a.apply(1.0, 0.0, x, y);
  CHECK(x == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(y == doctest::Approx(1.0).epsilon(1e-12));

  Affine inv = a.inverse();
  double bx, by;
  inv.apply(x, y, bx, by);
  CHECK(bx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(by == doctest::Approx(0.0).epsilon(1e-12));

  Affine singular;
  singular.m = {1, 2, 0, 2, 4, 0};
  CHECK_THROWS_AS(singular.inverse(), std::invalid_argument);
}

TEST_CASE("cubic weight partition of unity") {
  // For any fractional offset the four bicubic taps sum to 1, so constant
  // images are reproduced exactly.
  for (double t = 0.0; t < 1.0; t += 0.0625) {
    double s = detail::cubic_weight(t + 1.0) + detail::cubic_weight(t) +
               detail::cubic_weight(t - 1.0) + detail::cubic_weight(t - 2.0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(detail::cubic_weight(0.0) == 1.0);
  CHECK(detail::cubic_weight(1.0) == 0.0);
  CHECK(detail::cubic_weight(2.5) == 0.0);
}

TEST_CASE("bicubic sampling: exact at grid points, constant-preserving") {
  GrayImage img(6, 6);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(0.0, 255.0);
  for (auto& v : img.pixels) v = d(rng);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x)
      CHECK(sample_bicubic(img, x, y) == doctest::Approx(img.at(x, y)).epsilon(1e-12));

  GrayImage flat(8, 8, 42.0);
  for (double y = -1.0; y < 9.0; y += 0.73)
    for (double x = -1.0; x < 9.0; x += 0.61)
      CHECK(sample_bicubic(flat, x, y) == doctest::Approx(42.0).epsilon(1e-12));
}

TEST_CASE("bicubic reproduces linear ramps in the interior") {
  GrayImage img(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) img.at(x, y) = 3.0 * x + 2.0 * y + 5.0;
  for (double y = 2.0; y <= 7.0; y += 0.37)
    for (double x = 2.0; x <= 7.0; x += 0.41)
      CHECK(sample_bicubic(img, x, y) == doctest::Approx(3.0 * x + 2.0 * y + 5.0).epsilon(1e-10));
}

TEST_CASE("bilinear sampling interpolates and replicates edges") {
  GrayImage img(2, 2);
  img.pixels = {0.0, 10.0, 20.0, 30.0};
  CHECK(sample_bilinear(img, 0.5, 0.5) == doctest::Approx(15.0));
  CHECK(sample_bilinear(img, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(sample_bilinear(img, -5.0, -5.0) == doctest::Approx(0.0));
  CHECK(sample_bilinear(img, 5.0, 5.0) == doctest::Approx(30.0));
}

TEST_CASE("warp_affine identity reproduces the image") {
  GrayImage img(9, 7);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.0, 255.0);
  for (auto& v : img.pixels) v = d(rng);
  GrayImage out = warp_affine(img, Affine{}, 9, 7);
  for (size_t i = 0; i < img.size(); ++i)
    CHECK(out.pixels[i] == doctest::Approx(img.pixels[i]).epsilon(1e-12));
}

TEST_CASE("warp_affine pure translation shifts pixels") {
  GrayImage img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = 10.0 * x + y;
  Affine t;
  t.m = {1, 0, 2, 0, 1, 1};  // dst = src + (2,1)
  GrayImage out = warp_affine(img, t, 8, 8);
  for (int y = 3; y < 8; ++y)
    for (int x = 3; x < 8; ++x)
      CHECK(out.at(x, y) == doctest::Approx(img.at(x - 2, y - 1)).epsilon(1e-10));
}

TEST_CASE("resize_bicubic: identity size, constants, dimension checks") {
  GrayImage img(12, 9);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(0.0, 255.0);
  for (auto& v : img.pixels) v = d(rng);
  GrayImage same = resize_bicubic(img, 12, 9);
  for (size_t i = 0; i < img.size(); ++i)
    CHECK(same.pixels[i] == doctest::Approx(img.pixels[i]).epsilon(1e-12));

  GrayImage flat(130, 150, 77.0);
  GrayImage small = resize_bicubic(flat, 128, 128);
  for (double v : small.pixels) CHECK(v == doctest::Approx(77.0).epsilon(1e-12));

  CHECK_THROWS_AS(resize_bicubic(img, 0, 5), std::invalid_argument);
}

TEST_CASE("gaussian_denoise: unit-sum kernel, impulse oracle") {
  GrayImage flat(16, 16, 100.0);
  GrayImage out = gaussian_denoise(flat, 0.5, 5);
  for (double v : out.pixels) CHECK(v == doctest::Approx(100.0).epsilon(1e-12));

  // Impulse response equals the separable normalized kernel product.
  GrayImage impulse(11, 11, 0.0);
  impulse.at(5, 5) = 1.0;
  GrayImage resp = gaussian_denoise(impulse, 0.5, 5);
  double k[5], sum = 0.0;
  for (int i = -2; i <= 2; ++i) {
    k[i + 2] = std::exp(-i * i / (2.0 * 0.25));
    sum += k[i + 2];
  }
  for (double& v : k) v /= sum;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx)
      CHECK(resp.at(5 + dx, 5 + dy) == doctest::Approx(k[dx + 2] * k[dy + 2]).epsilon(1e-12));
  CHECK(resp.at(1, 5) == 0.0);

  CHECK_THROWS_AS(gaussian_denoise(flat, 0.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_denoise(flat, 0.0, 5), std::invalid_argument);
}

TEST_CASE("histogram_equalize: two-level and constant examples") {
  // Half the pixels at 10, half at 200: cdf steps 0.5 then 1.0, so the output
  // levels are floor(0.5*255)=127 and 255.
  GrayImage img(4, 2);
  img.pixels = {10, 10, 10, 10, 200, 200, 200, 200};
  BinaryMask all(4, 2, true);
  GrayImage out = histogram_equalize(img, all);
  for (int x = 0; x < 4; ++x) {
    CHECK(out.at(x, 0) == 127.0);
    CHECK(out.at(x, 1) == 255.0);
  }

  GrayImage flat(3, 3, 42.0);
  GrayImage fout = histogram_equalize(flat, BinaryMask(3, 3, true));
  for (double v : fout.pixels) CHECK(v == 255.0);
}

TEST_CASE("histogram_equalize: masked pixels excluded and zeroed") {
  GrayImage img(2, 2);
  img.pixels = {5, 250, 5, 5};
  BinaryMask m(2, 2, true);
  m.set(1, 0, false);  // exclude the 250
  GrayImage out = histogram_equalize(img, m);
  CHECK(out.at(1, 0) == 0.0);  // masked forced to zero
  CHECK(out.at(0, 0) == 255.0);
  CHECK(out.at(0, 1) == 255.0);
}

TEST_CASE("histogram_equalize: monotone mapping on random quantized images") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> d(0, 255);
  GrayImage img(32, 32);
  for (auto& v : img.pixels) v = d(rng);
  BinaryMask all(32, 32, true);
  GrayImage out = histogram_equalize(img, all);
  for (size_t i = 0; i < img.size(); ++i)
    for (size_t j = 0; j < img.size(); ++j)
      if (img.pixels[i] < img.pixels[j]) CHECK(out.pixels[i] <= out.pixels[j]);
  // full-range top: the maximum input always maps to 255
  double vmax = *std::max_element(img.pixels.begin(), img.pixels.end());
  for (size_t i = 0; i < img.size(); ++i)
    if (img.pixels[i] == vmax) CHECK(out.pixels[i] == 255.0);
}

TEST_CASE("histogram_equalize errors") {
  GrayImage img(2, 2, 10.5);
  BinaryMask all(2, 2, true);
  CHECK_THROWS_AS(histogram_equalize(img, all), std::invalid_argument);  // not quantized
  GrayImage q(2, 2, 10.0);
  CHECK_THROWS_AS(histogram_equalize(q, BinaryMask(2, 2, false)), std::invalid_argument);
  CHECK_THROWS_AS(histogram_equalize(q, BinaryMask(3, 2, true)), std::invalid_argument);
}

TEST_CASE("quantize rounds half up and clamps") {
  GrayImage img(5, 1);
  img.pixels = {-3.2, 0.49, 0.5, 254.4, 300.0};
  GrayImage out = quantize(img);
  CHECK(out.pixels[0] == 0.0);
  CHECK(out.pixels[1] == 0.0);
  CHECK(out.pixels[2] == 1.0);
  CHECK(out.pixels[3] == 254.0);
  CHECK(out.pixels[4] == 255.0);
}
