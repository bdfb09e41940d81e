#pragma once

#include <cstdint>
#include <vector>

#include "sparsetrack/io.hpp"

namespace sparsetrack {

enum class SynthBackground { kUniform, kTexture };

struct SynthParams {
  int width = 64;
  int height = 64;
  int frames = 50;
  int target_size = 12;
  double velocity_x = 1.0;  // px per frame; the target bounces off the borders
  double velocity_y = 0.0;
  int start_x = 2;          // top-left of the target in the first frame
  int start_y = -1;         // -1 centres vertically
  double target_intensity = 0.9;
  double background_intensity = 0.1;
  double noise_std = 5.0 / 255.0;
  SynthBackground background = SynthBackground::kUniform;
  std::uint64_t seed = 0;
};

struct SynthSequence {
  FrameSequence sequence;  // frames numbered from 1
  std::vector<FrameBox> truth;
  Image clean_background;
};

/// Moving square over a static background with seeded Gaussian pixel noise.
/// Pixels are quantized to 8-bit levels so PGM round trips are lossless.
SynthSequence synth_sequence(const SynthParams& params);

}  // namespace sparsetrack
