#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sparsetrack/error.hpp"

namespace cli = sparsetrack::cli;

int main(int argc, char** argv) {
  CLI::App app{"Sparse-representation visual tracking (RTCST / RTCST-B)"};
  app.require_subcommand(1);

  cli::TrackOptions track;
  auto* track_cmd = app.add_subcommand("track", "Track a target through a PGM sequence");
  track_cmd->add_option("--frames", track.frames, "Directory of frame_<N>.pgm")->required();
  track_cmd->add_option("--init", track.init, "Initial box l,t,r,b")->required();
  track_cmd->add_option("--config", track.config, "key = value config file");
  track_cmd->add_option("--mode", track.mode, "rtcst | rtcst-b");
  track_cmd->add_option("--background", track.background, "CSBM directory (rtcst-b)");
  track_cmd->add_option("--seed", track.seed, "Master seed");
  track_cmd->add_option("--estimator", track.estimator, "mse | map");
  track_cmd->add_option("--out", track.out, "Result CSV")->required();

  cli::BuildBgOptions bg;
  auto* bg_cmd = app.add_subcommand("build-bg", "Build a background model from annotated frames");
  bg_cmd->add_option("--frames", bg.frames)->required();
  bg_cmd->add_option("--annotations", bg.annotations, "CSV frame,l,t,r,b of foreground boxes")->required();
  bg_cmd->add_option("--num", bg.num, "Number of background frames N_b")->capture_default_str();
  bg_cmd->add_option("--out", bg.out, "Output directory")->required();
  bg_cmd->add_option("--downsample", bg.downsample, "Thumbnail side for clustering")->capture_default_str();
  bg_cmd->add_option("--seed", bg.seed)->capture_default_str();
  bg_cmd->add_flag("--allow-impure", bg.allow_impure, "Accept donors whose foreground overlaps the region");
  bg_cmd->add_option("--sample", bg.sample, "Use every k-th annotated frame")->capture_default_str();

  cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score tracked boxes against ground truth");
  eval_cmd->add_option("--results", eval.results)->required();
  eval_cmd->add_option("--truth", eval.truth)->required();
  eval_cmd->add_option("--nu", eval.nu)->capture_default_str();
  eval_cmd->add_option("--out", eval.out)->required();

  cli::RobustnessOptions rob;
  auto* rob_cmd = app.add_subcommand("robustness", "TSP band over fluctuated initial boxes");
  rob_cmd->add_option("--frames", rob.frames)->required();
  rob_cmd->add_option("--init", rob.init)->required();
  rob_cmd->add_option("--truth", rob.truth)->required();
  rob_cmd->add_option("--omega", rob.omega)->capture_default_str();
  rob_cmd->add_option("--repeats", rob.repeats)->capture_default_str();
  rob_cmd->add_option("--nu", rob.nu)->capture_default_str();
  rob_cmd->add_option("--config", rob.config);
  rob_cmd->add_option("--mode", rob.mode);
  rob_cmd->add_option("--background", rob.background);
  rob_cmd->add_option("--seed", rob.seed)->capture_default_str();
  rob_cmd->add_option("--out", rob.out)->required();

  cli::SynthOptions synth;
  std::string background = "uniform";
  double noise_levels = 5.0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic moving-square sequence");
  synth_cmd->add_option("--out", synth.out, "Frame directory")->required();
  synth_cmd->add_option("--truth", synth.truth, "Ground-truth CSV (default <out>/truth.csv)");
  synth_cmd->add_option("--width", synth.params.width)->capture_default_str();
  synth_cmd->add_option("--height", synth.params.height)->capture_default_str();
  synth_cmd->add_option("--frames", synth.params.frames)->capture_default_str();
  synth_cmd->add_option("--target-size", synth.params.target_size)->capture_default_str();
  synth_cmd->add_option("--vx", synth.params.velocity_x)->capture_default_str();
  synth_cmd->add_option("--vy", synth.params.velocity_y)->capture_default_str();
  synth_cmd->add_option("--noise", noise_levels, "Noise std in 8-bit levels")->capture_default_str();
  synth_cmd->add_option("--background", background, "uniform | texture")
      ->check(CLI::IsMember({"uniform", "texture"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.params.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cli::configure_threads();
    if (*track_cmd) {
      cli::run_track(track);
    } else if (*bg_cmd) {
      cli::run_build_bg(bg);
    } else if (*eval_cmd) {
      std::printf("mean_tsp %.6f\n", cli::run_eval(eval));
    } else if (*rob_cmd) {
      cli::run_robustness_command(rob);
    } else if (*synth_cmd) {
      synth.params.noise_std = noise_levels / 255.0;
      synth.params.background =
          background == "texture" ? sparsetrack::SynthBackground::kTexture : sparsetrack::SynthBackground::kUniform;
      cli::run_synth(synth);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
