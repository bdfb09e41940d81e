#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sparsetrack/image.hpp"

namespace sparsetrack {

/// A small set of clean background frames of identical size.
struct Csbm {
  std::vector<Image> backgrounds;
  std::vector<int> source_indices;  // frame index each background came from
  std::uint64_t seed = 0;

  int n_b() const noexcept { return static_cast<int>(backgrounds.size()); }
  int width() const { return backgrounds.front().width; }
  int height() const { return backgrounds.front().height; }

  /// Throws kInvalidInput unless N_b >= 1 and all frames share one size.
  void validate() const;
};

struct ForegroundAnnotation {
  int frame_index = 0;
  std::vector<BoundingBox> boxes;
};

struct BackgroundCandidate {
  Image frame;
  ForegroundAnnotation annotation;
};

/// Copy of `base` with the inclusive rectangle `region` taken from `donor`.
Image patch_background(const Image& base, const Image& donor, const BoundingBox& region);

struct CsbmOptions {
  int n_b = 10;
  int downsample = 64;
  std::uint64_t seed = 0;
  bool allow_impure = false;  // accept donors whose foreground overlaps the region
};

/// Patches every candidate's foreground from the nearest-index candidate whose
/// own foreground misses the region, then keeps the n_b k-medoids of the
/// patched frames (distances on thumbnails of at most downsample^2 pixels).
Csbm build_csbm(const std::vector<BackgroundCandidate>& candidates, const CsbmOptions& options);

struct KMedoidsResult {
  std::vector<int> medoids;  // indices into the input, ascending
  double cost = 0.0;         // sum of distances to the nearest medoid
};

/// PAM-style k-medoids on a symmetric distance matrix: seeded farthest-point
/// initialization, then best-improvement swap passes (at most `max_passes`).
KMedoidsResult k_medoids(const Eigen::MatrixXd& distances, int k, std::uint64_t seed,
                         int max_passes = 20);

/// d0 x N_b matrix whose i-th column crops background i at `region`.
Eigen::MatrixXd background_templates(const Csbm& csbm, const BoundingBox& region,
                                     Resolution resolution);

}  // namespace sparsetrack
