#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sparsetrack/image.hpp"

namespace sparsetrack {

/// Sigmoid slope of the TSP metric.
struct TspParams {
  double nu = 11.8;
};

/// Initial-box jitter for the robustness protocol: position std omega (px),
/// relative scale std omega / 25.
struct FluctuationParams {
  double omega = 2.0;
  int repeats = 100;
};

std::array<double, 2> box_centroid(const BoundingBox& box);

/// Euclidean distance between centroids.
double tracking_error(const std::array<double, 2>& c_g, const std::array<double, 2>& c_t);
double tracking_error(const BoundingBox& r_g, const BoundingBox& r_t);

/// Signed overlap ratio in [-1, 1]. For overlapping boxes this is the
/// intersection area over the area of the smallest box covering both; the
/// sign is negative when the boxes are separated along either axis.
/// Touching boxes (zero-width intersection) score exactly 0.
double overlap_score(const BoundingBox& r_g, const BoundingBox& r_t);

/// Tracking success probability: logistic(nu * overlap_score).
double tsp(const BoundingBox& r_g, const BoundingBox& r_t, const TspParams& params = {});
double tsp_from_overlap(double overlap, double nu);

/// Slope nu placing probability p0 at overlap a0: ln(p0 / (1 - p0)) / a0.
double calibrate_nu(double a0, double p0);

/// Jittered copy of `r`; rounded to integers and, when a frame size is given,
/// clamped inside it with at least 2x2 pixels.
BoundingBox fluctuate_box(const BoundingBox& r, const FluctuationParams& params, std::uint64_t rng_seed,
                          std::optional<std::array<int, 2>> frame_size = std::nullopt);

struct TspBand {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation

  double lo(std::size_t frame) const { return mean[frame] - std[frame]; }
  double hi(std::size_t frame) const { return mean[frame] + std[frame]; }
};

/// Per-frame mean and standard deviation over repeats (rows = runs).
TspBand tsp_band(const std::vector<std::vector<double>>& per_run_tsp);

}  // namespace sparsetrack
