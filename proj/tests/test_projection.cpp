#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sparsetrack/error.hpp"
#include "sparsetrack/projection.hpp"
#include "sparsetrack/rng.hpp"

using namespace sparsetrack;

TEST_CASE("gaussian projection") {
  SUBCASE("deterministic") {
    const auto a = ProjectionMatrix::random_gaussian(25, 10000, 7);
    const auto b = ProjectionMatrix::random_gaussian(25, 10000, 7);
    CHECK(a.to_dense() == b.to_dense());
    CHECK(a.to_dense() != ProjectionMatrix::random_gaussian(25, 10000, 8).to_dense());
  }
  SUBCASE("moments of 10^6 draws") {
    const Eigen::MatrixXd m = ProjectionMatrix::random_gaussian(100, 10000, 1).to_dense();
    const double mean = m.mean();
    const double var = (m.array() - mean).square().mean();
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - 1.0) <= 0.05);
  }
  SUBCASE("d > d0 is rejected") {
    CHECK_THROWS_AS(ProjectionMatrix::random_gaussian(10001, 10000, 1), Error);
  }
}

TEST_CASE("hash projection") {
  SUBCASE("single seed gives one +-1 per column") {
    const auto phi = ProjectionMatrix::hash(50, 500, 1, 3);
    const Eigen::MatrixXd m = phi.to_dense();
    for (int j = 0; j < 500; ++j) {
      CHECK((m.col(j).array() != 0.0).count() == 1);
      CHECK(m.col(j).cwiseAbs().maxCoeff() == 1.0);
    }
  }
  SUBCASE("several seeds") {
    const auto phi = ProjectionMatrix::hash(50, 4096, 3, 11);
    const Eigen::MatrixXd m = phi.to_dense();
    long total = 0;
    for (int j = 0; j < 4096; ++j) {
      const auto nnz = (m.col(j).array() != 0.0).count();
      CHECK(nnz >= 1);
      CHECK(nnz <= 3);
      total += nnz;
      for (int i = 0; i < 50; ++i) CHECK((m(i, j) == 0.0 || m(i, j) == 1.0 || m(i, j) == -1.0));
    }
    CHECK(total <= 3 * 4096);
  }
  SUBCASE("rows receive a near-uniform share of hits") {
    const auto phi = ProjectionMatrix::hash(50, 10000, 1, 5);
    std::vector<int> hits(50, 0);
    for (int j = 0; j < 10000; ++j) {
      for (const auto& e : phi.hash_column(j)) ++hits[static_cast<std::size_t>(e.row)];
    }
    for (int h : hits) {
      CHECK(h >= 160);
      CHECK(h <= 240);
    }
  }
  SUBCASE("signs are balanced and independent of the row parity") {
    const auto phi = ProjectionMatrix::hash(50, 10000, 1, 9);
    int plus_even = 0, plus_odd = 0, even = 0, odd = 0;
    for (int j = 0; j < 10000; ++j) {
      const auto& e = phi.hash_column(j).front();
      (e.row % 2 ? odd : even) += 1;
      (e.row % 2 ? plus_odd : plus_even) += e.sign > 0;
    }
    CHECK(std::abs(plus_even / double(even) - 0.5) < 0.05);
    CHECK(std::abs(plus_odd / double(odd) - 0.5) < 0.05);
  }
  SUBCASE("later seed wins on a row collision") {
    // With d = 2 and many seeds, collisions are certain; replay the kernel.
    const auto phi = ProjectionMatrix::hash(2, 64, 4, 21);
    const Eigen::MatrixXd m = phi.to_dense();
    for (int j = 0; j < 64; ++j) {
      Eigen::Vector2d expect = Eigen::Vector2d::Zero();
      for (int s = 1; s <= 4; ++s) {
        const std::uint64_t h = hash_kernel(21, s, j);
        expect(static_cast<int>(h % 2)) = (h >> 63) ? 1.0 : -1.0;
      }
      CHECK(m.col(j) == expect);
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(ProjectionMatrix::hash(1, 10, 1, 0), Error);
    CHECK_THROWS_AS(ProjectionMatrix::hash(5, 10, 0, 0), Error);
  }
}

TEST_CASE("project") {
  Rng rng(4);
  for (const auto& phi : {ProjectionMatrix::hash(20, 300, 2, 1), ProjectionMatrix::random_gaussian(20, 300, 1)}) {
    Eigen::VectorXd a(300), b(300);
    for (int i = 0; i < 300; ++i) {
      a(i) = rng.normal();
      b(i) = rng.normal();
    }
    CHECK(phi.project(Eigen::VectorXd::Zero(300)).isZero(0.0));
    CHECK((phi.project(a + b) - phi.project(a) - phi.project(b)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((phi.project(a) - phi.to_dense() * a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(phi.project(Eigen::VectorXd::Zero(299)), Error);

    Eigen::MatrixXd cols(300, 4);
    cols.setRandom();
    CHECK((phi.project_columns(cols) - phi.to_dense() * cols).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("approximate isometry") {
  Rng rng(77);
  const int d0 = 10000, d = 100, count = 100;
  Eigen::MatrixXd v(d0, count);
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < d0; ++i) v(i, j) = rng.normal();
    v.col(j).normalize();
  }
  const auto gauss = ProjectionMatrix::random_gaussian(d, d0, 2);
  const auto hash = ProjectionMatrix::hash(d, d0, 1, 2);
  for (const auto* phi : {&gauss, &hash}) {
    Eigen::MatrixXd p = phi->project_columns(v);
    if (phi->kind() == ProjectionKind::kRandomGaussian) p /= std::sqrt(static_cast<double>(d));
    std::vector<double> ratios;
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) ratios.push_back((p.col(i) - p.col(j)).norm() / (v.col(i) - v.col(j)).norm());
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios[ratios.size() / 2];
    CHECK(median >= 0.5);
    CHECK(median <= 2.0);
  }
}

TEST_CASE("normalize columns") {
  SUBCASE("hand arithmetic") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 1);
    m(0, 0) = 3;
    m(1, 0) = 4;
    const auto [n, scales] = normalize_columns(m);
    CHECK(n(0, 0) == doctest::Approx(0.6));
    CHECK(n(1, 0) == doctest::Approx(0.8));
    CHECK(scales(0) == doctest::Approx(5.0));
  }
  SUBCASE("unit columns are unchanged") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
    const auto [n, scales] = normalize_columns(eye);
    CHECK(n == eye);
    CHECK(scales == Eigen::VectorXd::Ones(5));
  }
  SUBCASE("random matrix") {
    Eigen::MatrixXd m(30, 40);
    m.setRandom();
    const auto [n, scales] = normalize_columns(m);
    for (int j = 0; j < 40; ++j) CHECK(std::abs(n.col(j).norm() - 1.0) <= 1e-10);
  }
  SUBCASE("zero column names its index") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 4);
    m.col(2).setZero();
    try {
      normalize_columns(m);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateColumn);
      CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
  }
}

TEST_CASE("text dump") {
  const auto phi = ProjectionMatrix::hash(4, 6, 1, 3);
  std::ostringstream out;
  phi.write_text(out);
  std::istringstream in(out.str());
  int d = 0, d0 = 0, s = 0;
  std::string kind;
  std::uint64_t seed = 0;
  in >> d >> d0 >> kind >> seed >> s;
  CHECK(d == 4);
  CHECK(d0 == 6);
  CHECK(seed == 3);
  CHECK(s == 1);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(4, 6);
  int row = 0, col = 0;
  double value = 0;
  while (in >> row >> col >> value) rebuilt(row, col) = value;
  CHECK(rebuilt == phi.to_dense());
}
