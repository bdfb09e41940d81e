#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sparsetrack/evaluation.hpp"
#include "sparsetrack/tracker.hpp"

namespace sparsetrack {

struct SequenceRun {
  std::vector<BoundingBox> boxes;  // one per frame; frame 0 holds the initial box
  std::vector<FrameDiagnostics> diagnostics;  // one per tracked frame (frames 1..)
  int lost_at = -1;  // first frame where tracking was lost, -1 if never
};

/// Initializes on frames[0] with `box0` and tracks the rest. After a loss the
/// last valid box is repeated for the remaining frames.
SequenceRun run_sequence(const std::vector<Image>& frames, const BoundingBox& box0,
                         const TrackerConfig& config, std::shared_ptr<const Csbm> csbm = nullptr);

struct RobustnessResult {
  std::vector<BoundingBox> initial_boxes;     // fluctuated box per repeat
  std::vector<std::vector<double>> per_run_tsp;  // repeats x frames
  TspBand band;
};

/// Repeats tracking from fluctuated initial boxes and summarizes per-frame TSP.
/// Repeat i uses seeds derived from (master_seed, i) and runs independently;
/// repeats execute in parallel and are merged by repeat index.
RobustnessResult run_robustness(const std::vector<Image>& frames, const std::vector<BoundingBox>& truth,
                                const BoundingBox& box0, const TrackerConfig& config,
                                std::shared_ptr<const Csbm> csbm, const FluctuationParams& fluctuation,
                                const TspParams& tsp_params, std::uint64_t master_seed,
                                Execution execution = Execution::kParallel);

}  // namespace sparsetrack
