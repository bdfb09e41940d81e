#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sparsetrack/particle_filter.hpp"

namespace sparsetrack {

/// Grayscale frame, intensities in [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool same_shape(const Image& other) const noexcept {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Axis-aligned rectangle [l, r, t, b] in pixel coordinates, origin top-left.
/// Bounds are inclusive: the box covers columns l..r and rows t..b.
struct BoundingBox {
  int l = 0;
  int r = 0;
  int t = 0;
  int b = 0;

  int pixel_width() const noexcept { return r - l + 1; }
  int pixel_height() const noexcept { return b - t + 1; }
  bool valid() const noexcept { return l < r && t < b; }
  bool intersects(const BoundingBox& o) const noexcept {
    return l <= o.r && o.l <= r && t <= o.b && o.t <= b;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Template raster size; rows * cols = d0.
struct Resolution {
  int rows = 0;
  int cols = 0;

  int size() const noexcept { return rows * cols; }
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Intersection of `box` with the frame, or nullopt when they do not overlap.
std::optional<BoundingBox> clamp_to_frame(const BoundingBox& box, int width, int height);

/// Aspect-preserving template raster for a box, capped at `max_pixels`.
Resolution template_resolution(const BoundingBox& box, int max_pixels = 1024);

/// Crop `region` (clamped to the frame), bilinearly resample it to
/// `resolution` and flatten row-major. Sample positions are pixel-centre
/// aligned, so a crop already at the target size is copied verbatim.
/// Throws kZeroOverlap when the region misses the frame entirely.
Eigen::VectorXd crop_vectorize(const Image& frame, const BoundingBox& region, Resolution resolution);

/// Geometry shared by particles: the initial box size in pixels.
struct BoxGeometry {
  double base_width = 0.0;
  double base_height = 0.0;

  static BoxGeometry from_box(const BoundingBox& box) {
    return {static_cast<double>(box.pixel_width()), static_cast<double>(box.pixel_height())};
  }
};

ParticleState state_from_box(const BoundingBox& box);

/// Rounds a particle state to an integer box of at least 2x2 pixels. The
/// result is not clamped.
BoundingBox box_from_state(const ParticleState& state, const BoxGeometry& geometry);

/// crop_vectorize at the box a particle state describes.
Eigen::VectorXd extract_observation(const Image& frame, const ParticleState& state,
                                    const BoxGeometry& geometry, Resolution resolution);

/// Bilinear resample of a full image to `width` x `height`.
Image resize_bilinear(const Image& image, int width, int height);

}  // namespace sparsetrack
