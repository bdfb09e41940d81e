#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sparsetrack/error.hpp"
#include "sparsetrack/evaluation.hpp"
#include "sparsetrack/rng.hpp"

using namespace sparsetrack;

TEST_CASE("tracking error") {
  CHECK(tracking_error(std::array<double, 2>{1.5, 2.5}, std::array<double, 2>{1.5, 2.5}) == 0.0);
  CHECK(tracking_error(std::array<double, 2>{0, 0}, std::array<double, 2>{3, 4}) == 5.0);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const std::array<double, 2> a{rng.normal(), rng.normal()}, b{rng.normal(), rng.normal()};
    CHECK(tracking_error(a, b) == tracking_error(b, a));
  }
  CHECK(tracking_error(BoundingBox{0, 10, 0, 10}, BoundingBox{3, 13, 4, 14}) == 5.0);
}

TEST_CASE("overlap score") {
  const BoundingBox g{0, 10, 0, 10};
  CHECK(overlap_score(g, g) == 1.0);
  CHECK(overlap_score(g, {0, 20, 0, 20}) == 0.25);
  CHECK(overlap_score(g, {20, 30, 0, 10}) < 0.0);
  CHECK(overlap_score(g, {10, 20, 0, 10}) == 0.0);  // touching
  CHECK_THROWS_AS(overlap_score(g, {5, 5, 0, 3}), Error);

  Rng rng(2);
  for (int k = 0; k < 2000; ++k) {
    auto box = [&] {
      const int l = static_cast<int>(rng.uniform_int(-50, 50));
      const int t = static_cast<int>(rng.uniform_int(-50, 50));
      return BoundingBox{l, l + 1 + static_cast<int>(rng.uniform_int(0, 60)), t,
                         t + 1 + static_cast<int>(rng.uniform_int(0, 60))};
    };
    const BoundingBox a = box(), b = box();
    const double s = overlap_score(a, b);
    CHECK(s == overlap_score(b, a));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(std::abs(s - oracle::overlap_geometric(a, b)) <= 1e-12);
  }
}

TEST_CASE("tsp") {
  CHECK(tsp_from_overlap(0.25, 11.8) == doctest::Approx(0.95).epsilon(0.005 / 0.95));
  CHECK(tsp_from_overlap(0.0, 11.8) == 0.5);
  CHECK(tsp({0, 10, 0, 10}, {10, 20, 0, 10}) == 0.5);
  CHECK(tsp({3, 40, 7, 22}, {3, 40, 7, 22}) >= 0.9999);
  double previous = 0.0;
  for (double a = -1.0; a <= 1.0; a += 0.01) {
    const double p = tsp_from_overlap(a, 11.8);
    CHECK(p > previous);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    previous = p;
  }
  CHECK(tsp_from_overlap(-1e4, 11.8) >= 0.0);
  CHECK_THROWS_AS(tsp({0, 1, 0, 1}, {0, 1, 0, 1}, {0.0}), Error);
}

TEST_CASE("calibrate nu") {
  CHECK(std::abs(calibrate_nu(0.25, 0.95) - 11.8) <= 0.05);
  CHECK(calibrate_nu(0.3, 0.5) == 0.0);
  for (double a0 : {0.05, 0.25, 0.6}) {
    for (double p0 : {0.6, 0.9, 0.95, 0.999}) {
      CHECK(std::abs(tsp_from_overlap(a0, calibrate_nu(a0, p0)) - p0) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(calibrate_nu(0.0, 0.9), Error);
  CHECK_THROWS_AS(calibrate_nu(0.2, 1.0), Error);
}

TEST_CASE("fluctuate box") {
  const BoundingBox r{100, 160, 80, 120};
  CHECK(fluctuate_box(r, {1e-12, 1}, 3) == r);

  const BoundingBox wide{0, 4000, 0, 2000};
  Rng seeds(5);
  for (int k = 0; k < 200; ++k) {
    const auto f = fluctuate_box(wide, {2.0, 1}, seeds.next_u64());
    const double sw = double(f.r - f.l) / (wide.r - wide.l);
    const double sh = double(f.b - f.t) / (wide.b - wide.t);
    CHECK(std::abs(sw - sh) <= 2.0 / 2000 + 1e-12);
  }

  double mean = 0, sq = 0;
  const int n = 10000;
  std::vector<int> ls;
  for (int k = 0; k < n; ++k) ls.push_back(fluctuate_box(r, {2.0, 1}, derive_seed(9, k)).l);
  for (int l : ls) mean += l;
  mean /= n;
  for (int l : ls) sq += (l - mean) * (l - mean);
  // Rounding to integers adds variance 1/12.
  CHECK(std::abs(std::sqrt(sq / n - 1.0 / 12.0) - 2.0) <= 0.05);

  const auto clamped = fluctuate_box({0, 5, 0, 5}, {20.0, 1}, 4, std::array<int, 2>{8, 8});
  CHECK(clamped.l >= 0);
  CHECK(clamped.r <= 7);
  CHECK(clamped.valid());
}

TEST_CASE("tsp band") {
  const std::vector<std::vector<double>> same(5, std::vector<double>{0.3, 0.91, 0.77});
  const auto b = tsp_band(same);
  for (std::size_t f = 0; f < 3; ++f) CHECK(b.std[f] == 0.0);
  CHECK(b.mean[1] == 0.91);

  const auto two = tsp_band({{0.4, 1.0}, {0.6, 0.0}});
  CHECK(two.mean[0] == doctest::Approx(0.5));
  CHECK(two.std[0] == doctest::Approx(0.1));
  for (std::size_t f = 0; f < 2; ++f) CHECK(two.lo(f) <= two.mean[f]);
  for (std::size_t f = 0; f < 2; ++f) CHECK(two.mean[f] <= two.hi(f));
  CHECK_THROWS_AS(tsp_band({{0.5}}), Error);
  CHECK_THROWS_AS(tsp_band({{0.5}, {0.5, 0.2}}), Error);
}
