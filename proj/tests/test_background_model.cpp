#include <algorithm>
#include <limits>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sparsetrack/background_model.hpp"
#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

using namespace sparsetrack;

namespace {

Image random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Image img(w, h);
  Rng rng(seed);
  for (double& p : img.pixels) p = rng.uniform(lo, hi);
  return img;
}

BackgroundCandidate candidate(Image frame, int index, std::vector<BoundingBox> boxes) {
  return {std::move(frame), {index, std::move(boxes)}};
}

}  // namespace

TEST_CASE("patch_background") {
  const Image f = random_image(12, 9, 1);
  const Image donor = random_image(12, 9, 2);
  SUBCASE("full frame region") {
    CHECK(patch_background(f, donor, {0, 11, 0, 8}) == donor);
  }
  SUBCASE("single pixel") {
    const Image out = patch_background(f, donor, {4, 4, 3, 3});
    int differing = 0;
    for (std::size_t i = 0; i < f.pixels.size(); ++i) differing += out.pixels[i] != f.pixels[i];
    CHECK(differing == 1);
    CHECK(out.at(4, 3) == donor.at(4, 3));
  }
  SUBCASE("checkerboard against a hand composite") {
    Image board(16, 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) board.at(x, y) = ((x / 4 + y / 4) % 2) ? 1.0 : 0.0;
    }
    const Image flat(16, 16, 0.5);
    const BoundingBox cells{4, 11, 4, 11};
    CHECK(patch_background(board, flat, cells) == oracle::composite(board, flat, cells));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(patch_background(f, Image(5, 5), {0, 1, 0, 1}), Error);
    CHECK_THROWS_AS(patch_background(f, donor, {3, 2, 0, 1}), Error);
  }
}

TEST_CASE("k_medoids against exhaustive search") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const int n = 7, k = 3;
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(rng.normal(), rng.normal());
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) dist(i, j) = (pts[i] - pts[j]).norm();
    }
    auto cost = [&](const std::vector<int>& m) {
      double c = 0;
      for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j : m) best = std::min(best, dist(i, j));
        c += best;
      }
      return c;
    };
    double optimum = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) optimum = std::min(optimum, cost({a, b, c}));
      }
    }
    const auto res = k_medoids(dist, k, seed);
    CHECK(res.medoids.size() == 3);
    CHECK(std::is_sorted(res.medoids.begin(), res.medoids.end()));
    CHECK(res.cost == doctest::Approx(cost(res.medoids)));
    // PAM swaps reach a local optimum; on 7 points it is the global one here.
    CHECK(res.cost <= optimum * 1.05 + 1e-12);
  }
}

TEST_CASE("build_csbm") {
  SUBCASE("two separated clusters give one medoid each, matching exhaustive search") {
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 6; ++i) {
      const double level = i < 3 ? 0.2 : 0.8;
      c.push_back(candidate(random_image(20, 20, 10 + i, level - 0.05, level + 0.05), i + 1, {}));
    }
    const Csbm m = build_csbm(c, {2, 64, 3, false});
    REQUIRE(m.n_b() == 2);
    std::vector<int> src = m.source_indices;
    std::sort(src.begin(), src.end());
    CHECK(src[0] <= 3);
    CHECK(src[1] >= 4);

    // Exhaustive medoid pair on the same L2 distances.
    auto dist = [&](int a, int b) {
      double s = 0;
      for (std::size_t p = 0; p < c[0].frame.pixels.size(); ++p) {
        const double d = c[a].frame.pixels[p] - c[b].frame.pixels[p];
        s += d * d;
      }
      return std::sqrt(s);
    };
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> arg;
    for (int a = 0; a < 6; ++a) {
      for (int b = a + 1; b < 6; ++b) {
        double cost = 0;
        for (int i = 0; i < 6; ++i) cost += std::min(dist(i, a), dist(i, b));
        if (cost < best) {
          best = cost;
          arg = {a + 1, b + 1};
        }
      }
    }
    CHECK(src == std::vector<int>{arg.first, arg.second});
  }
  SUBCASE("n_b equal to the candidate count keeps everything") {
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 4; ++i) c.push_back(candidate(random_image(10, 10, i), i, {}));
    const Csbm m = build_csbm(c, {4, 64, 0, false});
    std::vector<int> src = m.source_indices;
    std::sort(src.begin(), src.end());
    CHECK(src == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("identical candidates") {
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 5; ++i) c.push_back(candidate(Image(8, 8, 0.4), i, {}));
    const Csbm m = build_csbm(c, {2, 64, 0, false});
    CHECK(m.n_b() == 2);
    CHECK(m.backgrounds[0] == m.backgrounds[1]);
  }
  SUBCASE("foreground is patched from the nearest clean donor") {
    const Image bg = random_image(30, 20, 7);
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 4; ++i) {
      Image f = bg;
      const BoundingBox box{2 + 7 * i, 6 + 7 * i, 5, 9};
      for (int y = box.t; y <= box.b; ++y) {
        for (int x = box.l; x <= box.r; ++x) f.at(x, y) = 1.0;
      }
      c.push_back(candidate(f, i, {box}));
    }
    const Csbm m = build_csbm(c, {4, 64, 0, false});
    for (const auto& g : m.backgrounds) CHECK(g == bg);
  }
  SUBCASE("unpatchable region") {
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 3; ++i) c.push_back(candidate(Image(10, 10, 0.5), i, {{2, 6, 2, 6}}));
    try {
      build_csbm(c, {2, 64, 0, false});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnpatchableRegion);
    }
    CHECK(build_csbm(c, {2, 64, 0, true}).n_b() == 2);
  }
  SUBCASE("deterministic and medoids are candidates") {
    std::vector<BackgroundCandidate> c;
    for (int i = 0; i < 9; ++i) c.push_back(candidate(random_image(16, 12, 40 + i), i, {}));
    const Csbm a = build_csbm(c, {3, 8, 5, false});
    const Csbm b = build_csbm(c, {3, 8, 5, false});
    CHECK(a.source_indices == b.source_indices);
    for (std::size_t i = 0; i < a.backgrounds.size(); ++i) {
      CHECK(a.backgrounds[i] == c[static_cast<std::size_t>(a.source_indices[i])].frame);
    }
  }
  SUBCASE("too few candidates") {
    std::vector<BackgroundCandidate> c{candidate(Image(4, 4), 0, {})};
    CHECK_THROWS_AS(build_csbm(c, {2, 64, 0, false}), Error);
  }
}

TEST_CASE("background_templates") {
  Csbm m;
  for (int i = 0; i < 3; ++i) m.backgrounds.push_back(random_image(40, 30, 60 + i));
  m.source_indices = {0, 1, 2};
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const int l = static_cast<int>(rng.uniform_int(-5, 35));
    const int t = static_cast<int>(rng.uniform_int(-5, 25));
    const BoundingBox region{l, l + 2 + static_cast<int>(rng.uniform_int(0, 15)), t,
                             t + 2 + static_cast<int>(rng.uniform_int(0, 15))};
    if (!clamp_to_frame(region, 40, 30)) continue;
    const Resolution res{7, 9};
    const Eigen::MatrixXd b = background_templates(m, region, res);
    CHECK(b.rows() == 63);
    CHECK(b.cols() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(b.col(i) == crop_vectorize(m.backgrounds[static_cast<std::size_t>(i)], region, res));
    }
  }
  SUBCASE("crop_vectorize and extract_observation share one path") {
    const BoundingBox box{5, 16, 3, 12};
    const auto geom = BoxGeometry::from_box(box);
    CHECK(crop_vectorize(m.backgrounds[0], box, {10, 12}) ==
          extract_observation(m.backgrounds[0], state_from_box(box), geom, {10, 12}));
  }
  SUBCASE("identical backgrounds give equal columns") {
    Csbm same;
    same.backgrounds.assign(4, m.backgrounds[0]);
    same.source_indices = {0, 0, 0, 0};
    const Eigen::MatrixXd b = background_templates(same, {3, 10, 3, 10}, {8, 8});
    for (int i = 1; i < 4; ++i) CHECK(b.col(i) == b.col(0));
  }
  SUBCASE("single background") {
    Csbm one;
    one.backgrounds = {Image(20, 20, 0.3)};
    one.source_indices = {0};
    const Eigen::MatrixXd b = background_templates(one, {0, 9, 0, 9}, {5, 5});
    CHECK(b.cols() == 1);
    CHECK((b.array() == 0.3).all());
  }
}
