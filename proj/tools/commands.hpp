#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sparsetrack/image.hpp"
#include "sparsetrack/synth.hpp"

namespace sparsetrack::cli {

namespace fs = std::filesystem;

/// Parses `l,t,r,b`.
BoundingBox parse_box(const std::string& text);

struct TrackOptions {
  fs::path frames;
  std::string init;
  std::optional<fs::path> config;
  std::optional<std::string> mode;
  std::optional<fs::path> background;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> estimator;
  fs::path out;
};

/// Writes `out` plus per-frame wall times to `<out>.timing.csv`.
void run_track(const TrackOptions& options);

struct BuildBgOptions {
  fs::path frames;
  fs::path annotations;
  int num = 10;
  fs::path out;
  int downsample = 64;
  std::uint64_t seed = 0;
  bool allow_impure = false;
  int sample = 1;  // keep every sample-th annotated frame
};

void run_build_bg(const BuildBgOptions& options);

struct EvalOptions {
  fs::path results;
  fs::path truth;
  double nu = 11.8;
  fs::path out;
};

/// Returns the mean TSP over the evaluated frames.
double run_eval(const EvalOptions& options);

struct RobustnessOptions {
  fs::path frames;
  std::string init;
  fs::path truth;
  double omega = 2.0;
  int repeats = 100;
  double nu = 11.8;
  std::optional<fs::path> config;
  std::optional<std::string> mode;
  std::optional<fs::path> background;
  std::uint64_t seed = 0;
  fs::path out;
};

void run_robustness_command(const RobustnessOptions& options);

struct SynthOptions {
  SynthParams params;
  fs::path out;                  // frame directory
  std::optional<fs::path> truth;  // default: <out>/truth.csv
};

void run_synth(const SynthOptions& options);

/// Applies SPARSE_TRACK_THREADS (0 or unset = OpenMP default).
void configure_threads();

}  // namespace sparsetrack::cli
