#include "sparsetrack/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsetrack/error.hpp"

namespace sparsetrack {
namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Source taps for a pixel-centre aligned resample of `src` samples onto `dst`.
std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double ratio = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double pos = (i + 0.5) * ratio - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, pos - lo};
  }
  return taps;
}

}  // namespace

std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, int width, int height) {
  BoundingBox c{std::max(box.l, 0), std::min(box.r, width - 1), std::max(box.t, 0),
                std::min(box.b, height - 1)};
  if (c.l > c.r || c.t > c.b) return std::nullopt;
  return c;
}

Resolution template_resolution(const BoundingBox& box, int max_pixels) {
  const int rows = box.pixel_height();
  const int cols = box.pixel_width();
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidBox, "tracker", "box has no pixels");
  }
  if (static_cast<long>(rows) * cols <= max_pixels) return {rows, cols};
  const double f = std::sqrt(static_cast<double>(max_pixels) / (static_cast<double>(rows) * cols));
  return {std::max(1, static_cast<int>(std::floor(rows * f))),
          std::max(1, static_cast<int>(std::floor(cols * f)))};
}

Eigen::VectorXd crop_vectorize(const Image& frame, const BoundingBox& region, Resolution resolution) {
  if (resolution.rows < 1 || resolution.cols < 1) {
    throw Error(ErrorCode::kInvalidDimension, "tracker", "template resolution must be positive");
  }
  const auto clamped = clamp_to_frame(region, frame.width, frame.height);
  if (!clamped) {
    throw Error(ErrorCode::kZeroOverlap, "tracker",
                "box [" + std::to_string(region.l) + "," + std::to_string(region.r) + "," +
                    std::to_string(region.t) + "," + std::to_string(region.b) +
                    "] lies outside the frame");
  }
  const BoundingBox& c = *clamped;
  const int crop_w = c.pixel_width();
  const int crop_h = c.pixel_height();
  Eigen::VectorXd out(resolution.size());

  if (crop_w == resolution.cols && crop_h == resolution.rows) {
    for (int y = 0; y < crop_h; ++y) {
      for (int x = 0; x < crop_w; ++x) out[y * crop_w + x] = frame.at(c.l + x, c.t + y);
    }
    return out;
  }

  const auto xs = make_taps(crop_w, resolution.cols);
  const auto ys = make_taps(crop_h, resolution.rows);
  for (int i = 0; i < resolution.rows; ++i) {
    const Tap& ty = ys[static_cast<std::size_t>(i)];
    for (int j = 0; j < resolution.cols; ++j) {
      const Tap& tx = xs[static_cast<std::size_t>(j)];
      const double top = (1.0 - tx.frac) * frame.at(c.l + tx.lo, c.t + ty.lo) +
                         tx.frac * frame.at(c.l + tx.hi, c.t + ty.lo);
      const double bottom = (1.0 - tx.frac) * frame.at(c.l + tx.lo, c.t + ty.hi) +
                            tx.frac * frame.at(c.l + tx.hi, c.t + ty.hi);
      out[i * resolution.cols + j] = (1.0 - ty.frac) * top + ty.frac * bottom;
    }
  }
  return out;
}

ParticleState state_from_box(const BoundingBox& box) {
  return {0.5 * (box.l + box.r), 0.5 * (box.t + box.b), 1.0};
}

BoundingBox box_from_state(const ParticleState& state, const BoxGeometry& geometry) {
  const int w = std::max(2, round_half_up(state.scale * geometry.base_width));
  const int h = std::max(2, round_half_up(state.scale * geometry.base_height));
  const int l = round_half_up(state.cx - 0.5 * (w - 1));
  const int t = round_half_up(state.cy - 0.5 * (h - 1));
  return {l, l + w - 1, t, t + h - 1};
}

Eigen::VectorXd extract_observation(const Image& frame, const ParticleState& state,
                                    const BoxGeometry& geometry, Resolution resolution) {
  return crop_vectorize(frame, box_from_state(state, geometry), resolution);
}

Image resize_bilinear(const Image& image, int width, int height) {
  const auto v = crop_vectorize(image, {0, image.width - 1, 0, image.height - 1}, {height, width});
  Image out(width, height);
  for (Eigen::Index i = 0; i < v.size(); ++i) out.pixels[static_cast<std::size_t>(i)] = v[i];
  return out;
}

}  // namespace sparsetrack
