#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sparsetrack {

/// Column-normalized dictionary. `columns` holds unit-norm atoms, `scales`
/// the norms the atoms had before normalization.
class Dictionary {
 public:
  Dictionary() = default;

  /// Normalizes every column of `raw`; throws kDegenerateColumn on a zero column.
  static Dictionary from_raw(const Eigen::MatrixXd& raw);

  /// Adopts already-normalized columns; throws kInvalidInput if any column
  /// deviates from unit norm by more than 1e-10.
  static Dictionary from_normalized(Eigen::MatrixXd columns);

  const Eigen::MatrixXd& columns() const noexcept { return columns_; }
  const Eigen::VectorXd& scales() const noexcept { return scales_; }
  Eigen::Index rows() const noexcept { return columns_.rows(); }
  Eigen::Index cols() const noexcept { return columns_.cols(); }

 private:
  Dictionary(Eigen::MatrixXd columns, Eigen::VectorXd scales)
      : columns_(std::move(columns)), scales_(std::move(scales)) {}

  Eigen::MatrixXd columns_;
  Eigen::VectorXd scales_;
};

enum class SelectionMode {
  kSigned,    // argmax <r, a_j>, biases coefficients towards x >= 0
  kAbsolute,  // argmax |<r, a_j>|
};

struct OmpParams {
  double epsilon = 0.01;
  int eta = 25;
  SelectionMode mode = SelectionMode::kSigned;
};

struct SparseSolution {
  Eigen::VectorXd coefficients;
  std::vector<Eigen::Index> support;  // selection order
  double residual_norm = 0.0;
  int iterations = 0;

  int nonzeros() const;
};

/// Snapshot handed to an observer after every greedy step.
struct OmpStep {
  int iteration;
  Eigen::Index selected;
  double residual_norm;
  const Eigen::VectorXd& residual;
};

using OmpObserver = std::function<void(const OmpStep&)>;

/// Least-squares solver over a growing column set. Keeps a thin QR
/// factorization (twice-orthogonalized Gram-Schmidt) so appending the t-th
/// column costs O(t d).
class IncrementalQr {
 public:
  explicit IncrementalQr(Eigen::Index dim, Eigen::Index max_columns);

  /// Columns whose component orthogonal to the current basis is shorter than
  /// this are treated as linearly dependent.
  static constexpr double kRankTolerance = 1e-10;

  /// Orthogonalizes `column` against the basis. Returns false (and leaves
  /// the factorization untouched) when the column is numerically dependent.
  bool append(const Eigen::Ref<const Eigen::VectorXd>& column);

  Eigen::Index size() const noexcept { return size_; }
  Eigen::Index dim() const noexcept { return q_.rows(); }

  /// Newest orthonormal direction.
  auto last_direction() const { return q_.col(size_ - 1); }

  /// argmin_x || basis x - y ||_2 for the columns appended so far.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  Eigen::VectorXd scratch_;
  Eigen::Index size_ = 0;
};

/// Exact least-squares fit of `y` on the columns of `basis` (t <= d).
/// Throws kRankDeficient when a column is dependent on the preceding ones.
Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& y);

/// Greedy sparse coding of `y` against `dict` with residual early stop and a
/// sparsity cap. `y` is expected to have unit norm.
///
/// Stops when ||r_t|| < epsilon or after eta selections. Ties in the
/// correlation argmax go to the lowest column index. A candidate whose
/// component outside the current span is below IncrementalQr::kRankTolerance
/// is skipped and the next-best column is tried.
SparseSolution omp_solve(const Dictionary& dict,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const OmpParams& params,
                         const OmpObserver& observer = {});

}  // namespace sparsetrack
