#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sparsetrack {

enum class ProjectionKind { kRandomGaussian, kHash };

/// Dimension-reduction matrix mapping d0-dimensional vectors to d dimensions.
///
/// The Gaussian kind is stored densely. The hash kind keeps, per input
/// coordinate, the handful of (row, +-1) entries it contributes to, so
/// projecting costs O(S d0).
class ProjectionMatrix {
 public:
  struct HashEntry {
    int row;
    signed char sign;
  };

  static ProjectionMatrix random_gaussian(int d, int d0, std::uint64_t seed);
  static ProjectionMatrix hash(int d, int d0, int num_seeds, std::uint64_t seed);

  ProjectionKind kind() const noexcept { return kind_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int num_seeds() const noexcept { return num_seeds_; }

  /// Hash kind only: nonzeros of column j, ordered by row.
  const std::vector<HashEntry>& hash_column(int j) const { return hash_columns_[j]; }

  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::MatrixXd project_columns(const Eigen::Ref<const Eigen::MatrixXd>& m) const;

  Eigen::MatrixXd to_dense() const;

  /// Plain-text dump: header `d d0 kind seed S`, then one `row col value`
  /// triplet per nonzero in column-major order.
  void write_text(std::ostream& out) const;

 private:
  ProjectionMatrix() = default;

  ProjectionKind kind_ = ProjectionKind::kHash;
  int rows_ = 0;
  int cols_ = 0;
  std::uint64_t seed_ = 0;
  int num_seeds_ = 0;
  Eigen::MatrixXd dense_;
  std::vector<std::vector<HashEntry>> hash_columns_;
};

/// Pairwise-independent-style hash h_s(j) realized with a seeded mixer. The
/// row is `h mod d`; the sign uses the top bit so it stays independent of the
/// row when d is even.
std::uint64_t hash_kernel(std::uint64_t seed, int s, int j);

/// Scales every column to unit L2 norm. Returns the normalized matrix and the
/// original norms; throws kDegenerateColumn naming the first zero column.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> normalize_columns(const Eigen::MatrixXd& m);

}  // namespace sparsetrack
