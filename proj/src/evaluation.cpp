#include "sparsetrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "evaluation";

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

std::array<double, 2> box_centroid(const BoundingBox& box) {
  return {0.5 * (box.l + box.r), 0.5 * (box.t + box.b)};
}

double tracking_error(const std::array<double, 2>& c_g, const std::array<double, 2>& c_t) {
  return std::hypot(c_g[0] - c_t[0], c_g[1] - c_t[1]);
}

double tracking_error(const BoundingBox& r_g, const BoundingBox& r_t) {
  return tracking_error(box_centroid(r_g), box_centroid(r_t));
}

double overlap_score(const BoundingBox& g, const BoundingBox& t) {
  if (!g.valid() || !t.valid()) {
    throw Error(ErrorCode::kInvalidBox, kModule, "overlap needs boxes with l < r and t < b");
  }
  const std::array<double, 4> horizontal{double(t.r - g.l), double(g.r - t.l), double(g.r - g.l),
                                         double(t.r - t.l)};
  const std::array<double, 4> vertical{double(t.b - g.t), double(g.b - t.t), double(g.b - g.t),
                                       double(t.b - t.t)};
  const auto [h_min, h_max] = std::minmax_element(horizontal.begin(), horizontal.end());
  const auto [v_min, v_max] = std::minmax_element(vertical.begin(), vertical.end());
  const bool separate = *h_min < 0.0 || *v_min < 0.0;
  const double magnitude = std::abs((*h_min * *v_min) / (*h_max * *v_max));
  return separate ? -magnitude : magnitude;
}

double tsp_from_overlap(double overlap, double nu) {
  // exp(z) / (1 + exp(z)) evaluated without overflow.
  const double z = nu * overlap;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double tsp(const BoundingBox& r_g, const BoundingBox& r_t, const TspParams& params) {
  if (!(params.nu > 0.0)) throw Error(ErrorCode::kInvalidInput, kModule, "nu must be positive");
  return tsp_from_overlap(overlap_score(r_g, r_t), params.nu);
}

double calibrate_nu(double a0, double p0) {
  if (!(a0 > 0.0) || !(p0 > 0.0 && p0 < 1.0)) {
    throw Error(ErrorCode::kInvalidInput, kModule, "calibration needs a0 > 0 and 0 < p0 < 1");
  }
  return std::log(p0 / (1.0 - p0)) / a0;
}

BoundingBox fluctuate_box(const BoundingBox& r, const FluctuationParams& params, std::uint64_t rng_seed,
                          std::optional<std::array<int, 2>> frame_size) {
  if (!r.valid()) throw Error(ErrorCode::kInvalidBox, kModule, "cannot fluctuate an invalid box");
  if (!(params.omega > 0.0)) throw Error(ErrorCode::kInvalidInput, kModule, "omega must be positive");
  Rng rng(rng_seed);
  const double delta_l = rng.normal(0.0, params.omega);
  const double delta_t = rng.normal(0.0, params.omega);
  const double delta_s = rng.normal(0.0, params.omega / 25.0);
  const double l = r.l + delta_l;
  const double t = r.t + delta_t;
  const double rr = (1.0 + delta_s) * (r.r - r.l) + r.l + delta_l;
  const double b = (1.0 + delta_s) * (r.b - r.t) + r.t + delta_t;
  BoundingBox out{round_half_up(l), round_half_up(rr), round_half_up(t), round_half_up(b)};
  out.r = std::max(out.r, out.l + 1);
  out.b = std::max(out.b, out.t + 1);
  if (frame_size) {
    const int width = (*frame_size)[0];
    const int height = (*frame_size)[1];
    out.l = std::clamp(out.l, 0, width - 2);
    out.t = std::clamp(out.t, 0, height - 2);
    out.r = std::clamp(out.r, out.l + 1, width - 1);
    out.b = std::clamp(out.b, out.t + 1, height - 1);
  }
  return out;
}

TspBand tsp_band(const std::vector<std::vector<double>>& per_run_tsp) {
  if (per_run_tsp.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, kModule, "a TSP band needs at least 2 runs");
  }
  const std::size_t frames = per_run_tsp.front().size();
  for (const auto& run : per_run_tsp) {
    if (run.size() != frames) throw Error(ErrorCode::kInvalidDimension, kModule, "runs differ in length");
  }
  const double runs = static_cast<double>(per_run_tsp.size());
  TspBand band;
  band.mean.assign(frames, 0.0);
  band.std.assign(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    // Shifted by the first run so identical runs give exactly zero spread.
    const double pivot = per_run_tsp.front()[f];
    double shifted = 0.0;
    for (const auto& run : per_run_tsp) shifted += run[f] - pivot;
    const double mean = pivot + shifted / runs;
    double sq = 0.0;
    for (const auto& run : per_run_tsp) sq += (run[f] - mean) * (run[f] - mean);
    band.mean[f] = mean;
    band.std[f] = std::sqrt(sq / runs);
  }
  return band;
}

}  // namespace sparsetrack
