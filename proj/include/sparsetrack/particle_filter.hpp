#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sparsetrack {

/// Box centre in pixels plus a multiplier on the initial box size.
struct ParticleState {
  double cx = 0.0;
  double cy = 0.0;
  double scale = 1.0;

  friend bool operator==(const ParticleState&, const ParticleState&) = default;
};

struct ParticleEnsemble {
  std::vector<ParticleState> particles;
  std::vector<double> weights;

  /// N copies of `state` with uniform weights.
  static ParticleEnsemble uniform_at(const ParticleState& state, int count);

  std::size_t size() const noexcept { return particles.size(); }
};

/// Gaussian random-walk transition.
struct TransitionParams {
  double sigma_xy = 4.0;
  double sigma_scale = 0.02;

  void validate() const;
};

ParticleEnsemble propagate(const ParticleEnsemble& ensemble, const TransitionParams& params,
                           std::uint64_t rng_seed);

struct ResampleResult {
  ParticleEnsemble ensemble;
  bool degenerate = false;  // all input weights were zero
};

/// Multinomial resampling: N i.i.d. draws with Pr(j) = w_j, output weights 1/N.
ResampleResult resample(const ParticleEnsemble& ensemble, std::uint64_t rng_seed);

/// Likelihood-weighted mean state. Throws kEstimatorDegenerate when every
/// likelihood is zero.
ParticleState estimate_mse(const ParticleEnsemble& ensemble, std::span<const double> likelihoods);

/// Particle with the largest likelihood; ties go to the lowest index.
ParticleState estimate_map(const ParticleEnsemble& ensemble, std::span<const double> likelihoods);

}  // namespace sparsetrack
