#include "sparsetrack/synth.hpp"

#include <algorithm>
#include <cmath>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "cli_io";

double quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

// Reflects a coordinate into [0, span] so the target bounces off the borders.
double bounce(double p, double span) {
  if (span <= 0.0) return 0.0;
  const double period = 2.0 * span;
  double m = std::fmod(p, period);
  if (m < 0.0) m += period;
  return m <= span ? m : period - m;
}

Image make_background(const SynthParams& p) {
  Image bg(p.width, p.height);
  if (p.background == SynthBackground::kUniform) {
    std::fill(bg.pixels.begin(), bg.pixels.end(), quantize(p.background_intensity));
    return bg;
  }
  // 4x4 blocks of random grey plus a diagonal stripe pattern.
  Rng rng(derive_seed(p.seed, 0xb9));
  const int bw = (p.width + 3) / 4;
  const int bh = (p.height + 3) / 4;
  std::vector<double> blocks(static_cast<std::size_t>(bw * bh));
  for (double& v : blocks) v = rng.uniform(0.05, 0.45);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double stripe = 0.1 * std::sin(0.7 * x + 0.4 * y);
      bg.at(x, y) = quantize(blocks[static_cast<std::size_t>((y / 4) * bw + x / 4)] + stripe + 0.05);
    }
  }
  return bg;
}

}  // namespace

SynthSequence synth_sequence(const SynthParams& p) {
  if (p.width < 2 || p.height < 2 || p.frames < 1) {
    throw Error(ErrorCode::kInvalidInput, kModule, "synthetic sequence needs width, height >= 2 and frames >= 1");
  }
  if (p.target_size < 2 || p.target_size > p.width || p.target_size > p.height) {
    throw Error(ErrorCode::kInvalidInput, kModule, "target size must be in [2, min(width, height)]");
  }
  if (!(p.noise_std >= 0.0)) throw Error(ErrorCode::kInvalidInput, kModule, "noise std must be non-negative");

  const double span_x = p.width - p.target_size;
  const double span_y = p.height - p.target_size;
  const double x0 = std::clamp(p.start_x, 0, p.width - p.target_size);
  const double y0 = p.start_y < 0 ? std::floor(span_y / 2.0) : std::clamp(p.start_y, 0, p.height - p.target_size);
  const double target = quantize(p.target_intensity);

  SynthSequence out;
  out.clean_background = make_background(p);
  Rng noise(derive_seed(p.seed, 0x6e));
  for (int k = 0; k < p.frames; ++k) {
    const int x = static_cast<int>(std::round(bounce(x0 + p.velocity_x * k, span_x)));
    const int y = static_cast<int>(std::round(bounce(y0 + p.velocity_y * k, span_y)));
    Image frame = out.clean_background;
    for (int v = y; v < y + p.target_size; ++v) {
      for (int u = x; u < x + p.target_size; ++u) frame.at(u, v) = target;
    }
    if (p.noise_std > 0.0) {
      for (double& px : frame.pixels) px = quantize(px + noise.normal(0.0, p.noise_std));
    }
    const int index = k + 1;
    out.sequence.frames.push_back(std::move(frame));
    out.sequence.indices.push_back(index);
    out.truth.push_back({index, BoundingBox{x, x + p.target_size - 1, y, y + p.target_size - 1}});
  }
  return out;
}

}  // namespace sparsetrack
