#include <benchmark/benchmark.h>

#include <memory>

#include "sparsetrack/particle_filter.hpp"
#include "sparsetrack/rng.hpp"
#include "sparsetrack/sparse_recovery.hpp"
#include "sparsetrack/synth.hpp"
#include "sparsetrack/tracker.hpp"

using namespace sparsetrack;

namespace {

struct KernelFixture {
  SynthSequence synth;
  std::shared_ptr<const Csbm> csbm;
  TrackerConfig config;
  TrackerState state;
  ParticleEnsemble moved;

  KernelFixture(TrackerMode mode, int particles) : synth(synth_sequence(SynthParams{})) {
    config.mode = mode;
    config.n_s = particles;
    if (mode == TrackerMode::kRtcstB) {
      auto m = std::make_shared<Csbm>();
      m->backgrounds.assign(10, synth.clean_background);
      for (int i = 0; i < 10; ++i) m->source_indices.push_back(i);
      csbm = m;
    }
    state = init_tracker(synth.sequence.frames[0], synth.truth[0].box, config, csbm);
    moved = propagate(state.ensemble, config.transition, 17);
  }
};

template <bool Parallel>
void particle_kernel(benchmark::State& st) {
  const auto mode = st.range(0) == 0 ? TrackerMode::kRtcst : TrackerMode::kRtcstB;
  KernelFixture fx(mode, static_cast<int>(st.range(1)));
  FrameContext ctx(fx.synth.sequence.frames[1], fx.state.templates, *fx.state.phi, fx.state.geometry, fx.config,
                   fx.csbm.get());
  std::vector<BoundingBox> boxes;
  for (const auto& p : fx.moved.particles) boxes.push_back(box_from_state(p, fx.state.geometry));
  ctx.prepare_backgrounds(boxes, Parallel ? Execution::kParallel : Execution::kSerial);
  for (auto _ : st) {
    auto out = Parallel ? evaluate_particles_parallel(ctx, fx.moved.particles)
                        : evaluate_particles_serial(ctx, fx.moved.particles);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(1));
}

void omp_columns(benchmark::State& st) {
  const int d = 50, n = static_cast<int>(st.range(0));
  Rng rng(n);
  Eigen::MatrixXd raw(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) raw(i, j) = rng.normal();
  }
  const auto dict = Dictionary::from_raw(raw);
  Eigen::VectorXd y(d);
  for (int i = 0; i < d; ++i) y(i) = rng.normal();
  y.normalize();
  for (auto _ : st) benchmark::DoNotOptimize(omp_solve(dict, y, {1e-3, 15, SelectionMode::kAbsolute}));
}

void omp_epsilon(benchmark::State& st) {
  // Observation close to one template; a looser epsilon stops earlier.
  const int d = 50, n_t = 10;
  Rng rng(3);
  Eigen::MatrixXd raw(d, n_t + 2 * d);
  for (int j = 0; j < n_t; ++j) {
    for (int i = 0; i < d; ++i) raw(i, j) = 1.0 + 0.3 * rng.normal();
  }
  raw.middleCols(n_t, d) = Eigen::MatrixXd::Identity(d, d);
  raw.middleCols(n_t + d, d) = -Eigen::MatrixXd::Identity(d, d);
  const auto dict = Dictionary::from_raw(raw);
  Eigen::VectorXd y = dict.columns().col(0);
  for (int i = 0; i < d; ++i) y(i) += 0.005 * rng.normal();
  y.normalize();
  const double epsilon = 1.0 / static_cast<double>(st.range(0));
  int iterations = 0;
  for (auto _ : st) {
    const auto sol = omp_solve(dict, y, {epsilon, 25, SelectionMode::kSigned});
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.residual_norm);
  }
  st.counters["iterations"] = iterations;
}

}  // namespace

BENCHMARK(particle_kernel<false>)->Name("particles/serial")->ArgsProduct({{0, 1}, {100, 400}});
BENCHMARK(particle_kernel<true>)->Name("particles/parallel")->ArgsProduct({{0, 1}, {100, 400}});
BENCHMARK(omp_columns)->Name("omp/columns")->RangeMultiplier(10)->Range(100, 10000);
BENCHMARK(omp_epsilon)->Name("omp/inverse_epsilon")->RangeMultiplier(10)->Range(10, 10000);

BENCHMARK_MAIN();
