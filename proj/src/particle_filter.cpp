#include "sparsetrack/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "particle_filter";

void check_likelihoods(const ParticleEnsemble& ensemble, std::span<const double> likelihoods) {
  if (likelihoods.size() != ensemble.size() || ensemble.size() == 0) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "expected " + std::to_string(ensemble.size()) + " likelihoods, got " +
                    std::to_string(likelihoods.size()));
  }
  for (double l : likelihoods) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::kInvalidInput, kModule, "likelihoods must be finite and nonnegative");
    }
  }
}

}  // namespace

ParticleEnsemble ParticleEnsemble::uniform_at(const ParticleState& state, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalidInput, kModule, "ensemble needs N_s >= 1");
  ParticleEnsemble ensemble;
  ensemble.particles.assign(static_cast<std::size_t>(count), state);
  ensemble.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return ensemble;
}

void TransitionParams::validate() const {
  if (!(sigma_xy > 0.0) || !(sigma_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, kModule, "transition sigmas must be positive");
  }
}

ParticleEnsemble propagate(const ParticleEnsemble& ensemble, const TransitionParams& params,
                           std::uint64_t rng_seed) {
  params.validate();
  ParticleEnsemble out = ensemble;
  Rng rng(rng_seed);
  for (auto& p : out.particles) {
    p.cx += params.sigma_xy * rng.normal();
    p.cy += params.sigma_xy * rng.normal();
    p.scale *= std::max(0.1, 1.0 + params.sigma_scale * rng.normal());
  }
  return out;
}

ResampleResult resample(const ParticleEnsemble& ensemble, std::uint64_t rng_seed) {
  const std::size_t n = ensemble.size();
  if (n == 0 || ensemble.weights.size() != n) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "weights do not match particles");
  }
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ensemble.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidInput, kModule, "weights must be finite and nonnegative");
    }
    total += w;
    cumulative[i] = total;
  }

  ResampleResult result;
  if (total == 0.0) {
    result.degenerate = true;
    for (std::size_t i = 0; i < n; ++i) cumulative[i] = static_cast<double>(i + 1);
    total = static_cast<double>(n);
  }

  Rng rng(rng_seed);
  result.ensemble.particles.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    // Zero-weight entries share a cumulative value with their predecessor and
    // can never be the first element strictly above u.
    if (it == cumulative.end()) it = std::prev(it);
    result.ensemble.particles.push_back(ensemble.particles[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  result.ensemble.weights.assign(n, 1.0 / static_cast<double>(n));
  return result;
}

ParticleState estimate_mse(const ParticleEnsemble& ensemble, std::span<const double> likelihoods) {
  check_likelihoods(ensemble, likelihoods);
  const double peak = *std::max_element(likelihoods.begin(), likelihoods.end());
  if (peak == 0.0) {
    throw Error(ErrorCode::kEstimatorDegenerate, kModule, "all likelihoods are zero");
  }
  // Dividing by the peak first makes equal likelihoods exactly uniform weights.
  double total = 0.0;
  ParticleState acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double w = likelihoods[i] / peak;
    const auto& p = ensemble.particles[i];
    acc.cx += w * p.cx;
    acc.cy += w * p.cy;
    acc.scale += w * p.scale;
    total += w;
  }
  return {acc.cx / total, acc.cy / total, acc.scale / total};
}

ParticleState estimate_map(const ParticleEnsemble& ensemble, std::span<const double> likelihoods) {
  check_likelihoods(ensemble, likelihoods);
  std::size_t best = 0;
  for (std::size_t i = 1; i < likelihoods.size(); ++i) {
    if (likelihoods[i] > likelihoods[best]) best = i;
  }
  if (likelihoods[best] == 0.0) {
    throw Error(ErrorCode::kEstimatorDegenerate, kModule, "all likelihoods are zero");
  }
  return ensemble.particles[best];
}

}  // namespace sparsetrack
