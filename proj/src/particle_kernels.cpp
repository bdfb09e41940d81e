#include "sparsetrack/tracker.hpp"

namespace sparsetrack {

std::vector<ParticleEvaluation> evaluate_particles_serial(const FrameContext& ctx,
                                                          const std::vector<ParticleState>& particles) {
  std::vector<ParticleEvaluation> out(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) out[i] = ctx.evaluate(particles[i]);
  return out;
}

std::vector<ParticleEvaluation> evaluate_particles_parallel(const FrameContext& ctx,
                                                            const std::vector<ParticleState>& particles) {
  std::vector<ParticleEvaluation> out(particles.size());
  const long count = static_cast<long>(particles.size());
  // Each slot is written by exactly one iteration, so the result does not
  // depend on the schedule.
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = ctx.evaluate(particles[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace sparsetrack
