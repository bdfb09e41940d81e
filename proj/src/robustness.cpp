#include "sparsetrack/robustness.hpp"

#include <exception>
#include <string>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::uint64_t kFluctuationStream = 0xf1;
constexpr std::uint64_t kTrackerStream = 0x7a;

}  // namespace

SequenceRun run_sequence(const std::vector<Image>& frames, const BoundingBox& box0,
                         const TrackerConfig& config, std::shared_ptr<const Csbm> csbm) {
  if (frames.empty()) throw Error(ErrorCode::kInvalidInput, "tracker", "empty frame sequence");
  SequenceRun run;
  run.boxes.reserve(frames.size());
  run.boxes.push_back(box0);
  TrackerState state = init_tracker(frames.front(), box0, config, std::move(csbm));
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (run.lost_at >= 0) {
      run.boxes.push_back(run.boxes.back());
      continue;
    }
    try {
      FrameResult result = track_frame(state, frames[k]);
      run.boxes.push_back(result.box);
      run.diagnostics.push_back(std::move(result.diagnostics));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTrackingLost) throw;
      run.lost_at = static_cast<int>(k);
      run.boxes.push_back(run.boxes.back());
    }
  }
  return run;
}

RobustnessResult run_robustness(const std::vector<Image>& frames, const std::vector<BoundingBox>& truth,
                                const BoundingBox& box0, const TrackerConfig& config,
                                std::shared_ptr<const Csbm> csbm, const FluctuationParams& fluctuation,
                                const TspParams& tsp_params, std::uint64_t master_seed,
                                Execution execution) {
  if (truth.size() != frames.size()) {
    throw Error(ErrorCode::kInvalidDimension, "evaluation",
                "ground truth has " + std::to_string(truth.size()) + " boxes for " +
                    std::to_string(frames.size()) + " frames");
  }
  if (fluctuation.repeats < 1) throw Error(ErrorCode::kInvalidInput, "evaluation", "repeats must be positive");
  const int repeats = fluctuation.repeats;
  const std::array<int, 2> frame_size{frames.front().width, frames.front().height};

  RobustnessResult out;
  out.initial_boxes.resize(static_cast<std::size_t>(repeats));
  out.per_run_tsp.resize(static_cast<std::size_t>(repeats));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(repeats));

  auto run_one = [&](int i) {
    const auto slot = static_cast<std::size_t>(i);
    try {
      const BoundingBox start =
          fluctuate_box(box0, fluctuation, derive_seed(master_seed, static_cast<std::uint64_t>(i), kFluctuationStream),
                        frame_size);
      TrackerConfig repeat_config = config;
      repeat_config.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i), kTrackerStream);
      repeat_config.execution = Execution::kSerial;  // parallelism lives at the repeat level
      const SequenceRun run = run_sequence(frames, start, repeat_config, csbm);
      std::vector<double> scores(frames.size());
      for (std::size_t f = 0; f < frames.size(); ++f) scores[f] = tsp(truth[f], run.boxes[f], tsp_params);
      out.initial_boxes[slot] = start;
      out.per_run_tsp[slot] = std::move(scores);
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  };

  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < repeats; ++i) run_one(i);
  } else {
    for (int i = 0; i < repeats; ++i) run_one(i);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  if (repeats >= 2) out.band = tsp_band(out.per_run_tsp);
  return out;
}

}  // namespace sparsetrack
