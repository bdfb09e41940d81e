#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>

#include "sparsetrack/config.hpp"
#include "sparsetrack/error.hpp"
#include "sparsetrack/evaluation.hpp"
#include "sparsetrack/io.hpp"
#include "sparsetrack/robustness.hpp"

namespace sparsetrack::cli {
namespace {

constexpr std::string_view kModule = "cli_io";

// Strips the "module: " prefix Error adds so a message can be re-wrapped.
std::string bare_message(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = e.module() + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

RunConfig resolve_config(const std::optional<fs::path>& path, const std::optional<std::string>& mode) {
  RunConfig config = path ? load_config(*path) : RunConfig{};
  if (mode) config.tracker.mode = parse_mode(*mode);
  return config;
}

std::shared_ptr<const Csbm> resolve_background(const RunConfig& config, const std::optional<fs::path>& flag) {
  if (config.tracker.mode != TrackerMode::kRtcstB) return nullptr;
  const std::optional<fs::path> dir = flag ? flag : config.background;
  if (!dir) throw Error(ErrorCode::kMissingBackground, kModule, "rtcst-b needs --background DIR");
  return std::make_shared<const Csbm>(load_csbm(*dir));
}

std::vector<BoundingBox> truth_for(const FrameSequence& seq, const fs::path& path) {
  std::map<int, BoundingBox> by_frame;
  for (const auto& row : load_ground_truth(path)) by_frame[row.frame] = row.box;
  std::vector<BoundingBox> out;
  out.reserve(seq.indices.size());
  for (int index : seq.indices) {
    const auto it = by_frame.find(index);
    if (it == by_frame.end()) {
      throw Error(ErrorCode::kInvalidInput, kModule,
                  path.string() + ": no ground truth for frame " + std::to_string(index));
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

BoundingBox parse_box(const std::string& text) {
  std::vector<int> v;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    std::size_t used = 0;
    try {
      v.push_back(std::stoi(field, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size()) break;
  }
  if (v.size() != 4 || std::count(text.begin(), text.end(), ',') != 3) {
    throw Error(ErrorCode::kParse, kModule, "box '" + text + "' is not l,t,r,b");
  }
  const BoundingBox box{v[0], v[2], v[1], v[3]};
  if (!box.valid()) throw Error(ErrorCode::kInvalidBox, kModule, "box '" + text + "' needs l < r and t < b");
  return box;
}

void run_track(const TrackOptions& options) {
  RunConfig config = resolve_config(options.config, options.mode);
  if (options.seed) config.tracker.seed = *options.seed;
  if (options.estimator) config.tracker.estimator = parse_estimator(*options.estimator);
  const fs::path frames_dir = options.frames.empty() && config.frames ? *config.frames : options.frames;
  const FrameSequence seq = load_sequence(frames_dir);
  const BoundingBox box0 = parse_box(options.init);
  const auto csbm = resolve_background(config, options.background);

  std::vector<ResultRecord> records;
  std::vector<std::pair<int, double>> timing;
  auto clock_start = std::chrono::steady_clock::now();
  TrackerState state = init_tracker(seq.frames.front(), box0, config.tracker, csbm);
  timing.emplace_back(seq.indices.front(),
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count());
  records.push_back({seq.indices.front(), box0, config.tracker.estimator, {}, {}, {}, {}, false});

  for (std::size_t k = 1; k < seq.frames.size(); ++k) {
    clock_start = std::chrono::steady_clock::now();
    FrameResult result;
    try {
      result = track_frame(state, seq.frames[k]);
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), "frame " + std::to_string(seq.indices[k]) + ": " + bare_message(e));
    }
    timing.emplace_back(seq.indices[k],
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count());
    const FrameDiagnostics& d = result.diagnostics;
    records.push_back({seq.indices[k], result.box, config.tracker.estimator, d.mean_residual, d.mean_iterations,
                       d.solution_nonzeros, d.sci, d.replaced_template.has_value()});
  }
  write_results(options.out, records);

  fs::path timing_path = options.out;
  timing_path += ".timing.csv";
  std::ofstream out(timing_path);
  if (!out) throw Error(ErrorCode::kIo, kModule, "cannot write " + timing_path.string());
  out << "frame,seconds\n";
  for (const auto& [frame, seconds] : timing) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.6f\n", frame, seconds);
    out << buf;
  }
}

void run_build_bg(const BuildBgOptions& options) {
  if (options.sample < 1) throw Error(ErrorCode::kInvalidInput, kModule, "--sample must be >= 1");
  const FrameSequence seq = load_sequence(options.frames);
  const auto annotations = annotations_from_boxes(load_ground_truth(options.annotations));
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < seq.indices.size(); ++i) position[seq.indices[i]] = i;

  std::vector<BackgroundCandidate> candidates;
  for (std::size_t a = 0; a < annotations.size(); a += static_cast<std::size_t>(options.sample)) {
    const auto it = position.find(annotations[a].frame_index);
    if (it == position.end()) {
      throw Error(ErrorCode::kInvalidInput, kModule,
                  "annotation for frame " + std::to_string(annotations[a].frame_index) + " has no frame file");
    }
    candidates.push_back({seq.frames[it->second], annotations[a]});
  }
  const Csbm csbm =
      build_csbm(candidates, CsbmOptions{options.num, options.downsample, options.seed, options.allow_impure});
  write_csbm(options.out, csbm);
}

double run_eval(const EvalOptions& options) {
  const auto results = load_ground_truth(options.results);
  std::map<int, BoundingBox> truth;
  for (const auto& row : load_ground_truth(options.truth)) truth[row.frame] = row.box;
  const TspParams params{options.nu};
  std::vector<MetricRecord> metrics;
  double total = 0.0;
  for (const auto& row : results) {
    const auto it = truth.find(row.frame);
    if (it == truth.end()) {
      throw Error(ErrorCode::kInvalidInput, kModule, "no ground truth for frame " + std::to_string(row.frame));
    }
    const double p = tsp(it->second, row.box, params);
    metrics.push_back({row.frame, row.box, p, tracking_error(it->second, row.box)});
    total += p;
  }
  write_metrics(options.out, metrics);
  return metrics.empty() ? 0.0 : total / static_cast<double>(metrics.size());
}

void run_robustness_command(const RobustnessOptions& options) {
  if (options.repeats < 2) throw Error(ErrorCode::kInvalidInput, kModule, "--repeats must be >= 2 for a band");
  const RunConfig config = resolve_config(options.config, options.mode);
  const FrameSequence seq = load_sequence(options.frames);
  const auto truth = truth_for(seq, options.truth);
  const auto csbm = resolve_background(config, options.background);
  const RobustnessResult result =
      run_robustness(seq.frames, truth, parse_box(options.init), config.tracker, csbm,
                     FluctuationParams{options.omega, options.repeats}, TspParams{options.nu}, options.seed);
  write_band(options.out, seq.indices, result.band);
}

void run_synth(const SynthOptions& options) {
  const SynthSequence synth = synth_sequence(options.params);
  write_sequence(options.out, synth.sequence);
  write_ground_truth(options.truth ? *options.truth : options.out / "truth.csv", synth.truth);
}

void configure_threads() {
  const char* env = std::getenv("SPARSE_TRACK_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    throw Error(ErrorCode::kInvalidInput, kModule, std::string("SPARSE_TRACK_THREADS='") + env + "' is not a count");
  }
  if (n > 0) omp_set_num_threads(static_cast<int>(n));
}

}  // namespace sparsetrack::cli
