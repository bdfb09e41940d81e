#include "sparsetrack/sparse_recovery.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sparsetrack/error.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "sparse_recovery";

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

// Highest-scoring column not yet excluded; ties keep the lowest index.
Eigen::Index best_candidate(const Eigen::VectorXd& correlations,
                            const std::vector<char>& excluded,
                            SelectionMode mode) {
  Eigen::Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < correlations.size(); ++j) {
    if (excluded[static_cast<std::size_t>(j)]) continue;
    const double score = mode == SelectionMode::kSigned
                             ? correlations[j]
                             : std::abs(correlations[j]);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

}  // namespace

int SparseSolution::nonzeros() const {
  int count = 0;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i] != 0.0) ++count;
  }
  return count;
}

Dictionary Dictionary::from_raw(const Eigen::MatrixXd& raw) {
  if (raw.rows() < 1 || raw.cols() < 1) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "dictionary must be non-empty");
  }
  if (!all_finite(raw)) {
    throw Error(ErrorCode::kInvalidInput, kModule, "dictionary has non-finite entries");
  }
  Eigen::MatrixXd columns = raw;
  Eigen::VectorXd scales(raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double norm = raw.col(j).norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kDegenerateColumn, kModule,
                  "column " + std::to_string(j) + " has zero norm");
    }
    columns.col(j) /= norm;
    scales[j] = norm;
  }
  return Dictionary(std::move(columns), std::move(scales));
}

Dictionary Dictionary::from_normalized(Eigen::MatrixXd columns) {
  if (columns.rows() < 1 || columns.cols() < 1) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "dictionary must be non-empty");
  }
  if (!all_finite(columns)) {
    throw Error(ErrorCode::kInvalidInput, kModule, "dictionary has non-finite entries");
  }
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (std::abs(columns.col(j).norm() - 1.0) > 1e-10) {
      throw Error(ErrorCode::kInvalidInput, kModule,
                  "column " + std::to_string(j) + " is not unit-norm");
    }
  }
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(columns.cols());
  return Dictionary(std::move(columns), std::move(scales));
}

IncrementalQr::IncrementalQr(Eigen::Index dim, Eigen::Index max_columns)
    : q_(dim, max_columns), r_(max_columns, max_columns), scratch_(max_columns) {
  r_.setZero();
}

bool IncrementalQr::append(const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (size_ >= q_.cols()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "factorization is full");
  }
  const Eigen::Index t = size_;
  Eigen::VectorXd v = column;
  auto basis = q_.leftCols(t);
  auto coeffs = scratch_.head(t);
  coeffs.setZero();
  // Two Gram-Schmidt passes keep the basis orthonormal to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    if (t == 0) break;
    const Eigen::VectorXd proj = basis.transpose() * v;
    v.noalias() -= basis * proj;
    coeffs += proj;
  }
  const double norm = v.norm();
  if (!(norm >= kRankTolerance)) return false;
  q_.col(t) = v / norm;
  r_.col(t).head(t) = coeffs;
  r_(t, t) = norm;
  ++size_;
  return true;
}

Eigen::VectorXd IncrementalQr::solve(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  const Eigen::Index t = size_;
  Eigen::VectorXd rhs = q_.leftCols(t).transpose() * y;
  r_.topLeftCorner(t, t).triangularView<Eigen::Upper>().solveInPlace(rhs);
  return rhs;
}

Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (basis.rows() != y.size()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "basis/rhs row mismatch");
  }
  if (basis.cols() > basis.rows()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "more columns than rows");
  }
  IncrementalQr qr(basis.rows(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    if (!qr.append(basis.col(j))) {
      throw Error(ErrorCode::kRankDeficient, kModule,
                  "column " + std::to_string(j) + " is linearly dependent");
    }
  }
  return qr.solve(y);
}

SparseSolution omp_solve(const Dictionary& dict,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const OmpParams& params, const OmpObserver& observer) {
  const Eigen::Index d = dict.rows();
  const Eigen::Index n = dict.cols();
  if (y.size() != d) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "observation length " + std::to_string(y.size()) +
                    " != dictionary rows " + std::to_string(d));
  }
  if (!y.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, kModule, "observation has non-finite entries");
  }
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw Error(ErrorCode::kInvalidInput, kModule, "epsilon must be positive");
  }
  if (params.eta < 1 || params.eta > d) {
    throw Error(ErrorCode::kInvalidInput, kModule,
                "eta must lie in [1, d], got " + std::to_string(params.eta));
  }

  SparseSolution solution;
  solution.coefficients = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = y;
  solution.residual_norm = residual.norm();
  if (solution.residual_norm <= params.epsilon) return solution;

  const auto& atoms = dict.columns();
  IncrementalQr qr(d, params.eta);
  std::vector<char> excluded(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd correlations(n);
  solution.support.reserve(static_cast<std::size_t>(params.eta));

  for (int t = 1; t <= params.eta; ++t) {
    correlations.noalias() = atoms.transpose() * residual;
    Eigen::Index chosen = -1;
    while (true) {
      const Eigen::Index candidate = best_candidate(correlations, excluded, params.mode);
      if (candidate < 0) break;
      excluded[static_cast<std::size_t>(candidate)] = 1;
      if (qr.append(atoms.col(candidate))) {
        chosen = candidate;
        break;
      }
    }
    if (chosen < 0) break;  // every remaining atom lies in the current span

    solution.support.push_back(chosen);
    const auto q = qr.last_direction();
    residual.noalias() -= q * q.dot(residual);
    solution.residual_norm = residual.norm();
    solution.iterations = t;
    if (observer) observer(OmpStep{t, chosen, solution.residual_norm, residual});
    if (solution.residual_norm < params.epsilon) break;
  }

  if (!solution.support.empty()) {
    const Eigen::VectorXd fitted = qr.solve(y);
    for (std::size_t k = 0; k < solution.support.size(); ++k) {
      solution.coefficients[solution.support[k]] = fitted[static_cast<Eigen::Index>(k)];
    }
  }
  return solution;
}

}  // namespace sparsetrack
