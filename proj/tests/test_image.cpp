#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sparsetrack/error.hpp"
#include "sparsetrack/image.hpp"
#include "sparsetrack/rng.hpp"

using namespace sparsetrack;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  Image img(w, h);
  Rng rng(seed);
  for (double& p : img.pixels) p = rng.uniform();
  return img;
}

}  // namespace

TEST_CASE("crop at the template resolution copies pixels") {
  const Image img = random_image(30, 20, 1);
  const BoundingBox box{4, 13, 2, 9};
  const auto v = crop_vectorize(img, box, {8, 10});
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(v[y * 10 + x] == img.at(4 + x, 2 + y));
  }
}

TEST_CASE("constant frame gives a constant vector") {
  const Image img(25, 25, 0.37);
  const auto v = crop_vectorize(img, {3, 17, 5, 11}, {9, 4});
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("2x upsampled gradient matches analytic bilinear values") {
  Image img(40, 40);
  auto f = [](double x, double y) { return 0.1 + 0.01 * x + 0.005 * y; };
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 40; ++x) img.at(x, y) = f(x, y);
  }
  const BoundingBox box{5, 14, 6, 13};  // 10 x 8
  const auto v = crop_vectorize(img, box, {16, 20});
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 20; ++j) {
      // Output pixel centres map to source coordinates (j + 0.5) / 2 - 0.5,
      // held inside the crop at the borders.
      const double sx = std::clamp((j + 0.5) / 2.0 - 0.5, 0.0, 9.0);
      const double sy = std::clamp((i + 0.5) / 2.0 - 0.5, 0.0, 7.0);
      worst = std::max(worst, std::abs(v[i * 20 + j] - f(box.l + sx, box.t + sy)));
    }
  }
  CHECK(worst <= 1.0 / 255.0);
  CHECK(worst <= 1e-12);
}

TEST_CASE("crop outside the frame") {
  const Image img(10, 10, 0.5);
  CHECK_THROWS_AS(crop_vectorize(img, {20, 25, 0, 5}, {6, 6}), Error);
  // Partially outside is clamped, not rejected.
  const auto v = crop_vectorize(img, {-3, 4, -3, 4}, {8, 8});
  CHECK(v.size() == 64);
}

TEST_CASE("template resolution cap") {
  CHECK(template_resolution({0, 11, 0, 11}) == Resolution{12, 12});
  const auto r = template_resolution({56, 90, 24, 67});
  CHECK(r.size() <= 1024);
  CHECK(std::abs(double(r.cols) / r.rows - 35.0 / 44.0) < 0.05);
  const auto big = template_resolution({0, 399, 0, 99});
  CHECK(big.size() <= 1024);
  CHECK(big.cols == 4 * big.rows);
}

TEST_CASE("state and box conversions") {
  const BoundingBox box{10, 21, 5, 16};
  const auto geom = BoxGeometry::from_box(box);
  CHECK(box_from_state(state_from_box(box), geom) == box);
  const BoundingBox odd{3, 8, 4, 11};
  CHECK(box_from_state(state_from_box(odd), BoxGeometry::from_box(odd)) == odd);
  const auto tiny = box_from_state({50, 50, 0.01}, geom);
  CHECK(tiny.pixel_width() == 2);
  CHECK(tiny.pixel_height() == 2);
}

TEST_CASE("clamp to frame") {
  CHECK(clamp_to_frame({-5, 3, 2, 30}, 10, 20) == BoundingBox{0, 3, 2, 19});
  CHECK_FALSE(clamp_to_frame({10, 12, 0, 3}, 10, 20).has_value());
}
