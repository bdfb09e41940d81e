#include "sparsetrack/projection.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "projection";

}  // namespace

std::uint64_t hash_kernel(std::uint64_t seed, int s, int j) {
  const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
                   static_cast<std::uint32_t>(j);
  return mix64(mix64(seed) ^ mix64(key));
}

ProjectionMatrix ProjectionMatrix::random_gaussian(int d, int d0, std::uint64_t seed) {
  if (d < 1 || d0 < 1) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "dimensions must be positive");
  }
  if (d > d0) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "reduced dimension " + std::to_string(d) + " exceeds " + std::to_string(d0));
  }
  ProjectionMatrix phi;
  phi.kind_ = ProjectionKind::kRandomGaussian;
  phi.rows_ = d;
  phi.cols_ = d0;
  phi.seed_ = seed;
  phi.dense_.resize(d, d0);
  Rng rng(seed);
  // Row-major fill order so the stream layout does not depend on storage.
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d0; ++j) phi.dense_(i, j) = rng.normal();
  }
  return phi;
}

ProjectionMatrix ProjectionMatrix::hash(int d, int d0, int num_seeds, std::uint64_t seed) {
  if (d < 2 || d0 < 1) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "hash projection needs d >= 2, d0 >= 1");
  }
  if (num_seeds < 1) {
    throw Error(ErrorCode::kInvalidInput, kModule, "hash projection needs S >= 1");
  }
  ProjectionMatrix phi;
  phi.kind_ = ProjectionKind::kHash;
  phi.rows_ = d;
  phi.cols_ = d0;
  phi.seed_ = seed;
  phi.num_seeds_ = num_seeds;
  phi.hash_columns_.resize(static_cast<std::size_t>(d0));
  for (int j = 0; j < d0; ++j) {
    auto& entries = phi.hash_columns_[static_cast<std::size_t>(j)];
    for (int s = 1; s <= num_seeds; ++s) {
      const std::uint64_t h = hash_kernel(seed, s, j);
      const int row = static_cast<int>(h % static_cast<std::uint64_t>(d));
      const signed char sign = (h >> 63) ? 1 : -1;
      auto it = std::find_if(entries.begin(), entries.end(),
                             [row](const HashEntry& e) { return e.row == row; });
      // A later seed landing on the same cell overwrites the sign.
      if (it != entries.end()) {
        it->sign = sign;
      } else {
        entries.push_back({row, sign});
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const HashEntry& a, const HashEntry& b) { return a.row < b.row; });
  }
  return phi;
}

Eigen::VectorXd ProjectionMatrix::project(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != cols_) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "vector length " + std::to_string(v.size()) + " != " + std::to_string(cols_));
  }
  if (kind_ == ProjectionKind::kRandomGaussian) return dense_ * v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rows_);
  for (int j = 0; j < cols_; ++j) {
    const double value = v[j];
    for (const auto& e : hash_columns_[static_cast<std::size_t>(j)]) {
      out[e.row] += e.sign * value;
    }
  }
  return out;
}

Eigen::MatrixXd ProjectionMatrix::project_columns(const Eigen::Ref<const Eigen::MatrixXd>& m) const {
  if (m.rows() != cols_) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "matrix rows " + std::to_string(m.rows()) + " != " + std::to_string(cols_));
  }
  if (kind_ == ProjectionKind::kRandomGaussian) return dense_ * m;
  Eigen::MatrixXd out(rows_, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = project(m.col(c));
  return out;
}

Eigen::MatrixXd ProjectionMatrix::to_dense() const {
  if (kind_ == ProjectionKind::kRandomGaussian) return dense_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int j = 0; j < cols_; ++j) {
    for (const auto& e : hash_columns_[static_cast<std::size_t>(j)]) out(e.row, j) = e.sign;
  }
  return out;
}

void ProjectionMatrix::write_text(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << rows_ << ' ' << cols_ << ' '
      << (kind_ == ProjectionKind::kHash ? "hash" : "random_gaussian") << ' ' << seed_ << ' '
      << num_seeds_ << '\n';
  for (int j = 0; j < cols_; ++j) {
    if (kind_ == ProjectionKind::kHash) {
      for (const auto& e : hash_columns_[static_cast<std::size_t>(j)]) {
        out << e.row << ' ' << j << ' ' << static_cast<int>(e.sign) << '\n';
      }
    } else {
      for (int i = 0; i < rows_; ++i) out << i << ' ' << j << ' ' << dense_(i, j) << '\n';
    }
  }
  out.precision(old_precision);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> normalize_columns(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  Eigen::VectorXd scales(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::kDegenerateColumn, kModule,
                  "column " + std::to_string(j) + " has zero norm");
    }
    out.col(j) /= norm;
    scales[j] = norm;
  }
  return {std::move(out), std::move(scales)};
}

}  // namespace sparsetrack
