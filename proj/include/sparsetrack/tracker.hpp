#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sparsetrack/background_model.hpp"
#include "sparsetrack/image.hpp"
#include "sparsetrack/particle_filter.hpp"
#include "sparsetrack/projection.hpp"
#include "sparsetrack/sparse_recovery.hpp"

namespace sparsetrack {

enum class TrackerMode {
  kRtcst,   // target templates + [I, -I] noise atoms, signed selection
  kRtcstB,  // target templates + CSBM background atoms, absolute selection
};

enum class Estimator { kMse, kMap };

/// How per-particle likelihoods are evaluated. Both paths produce identical
/// results; the serial one is the reference the OpenMP kernel is tested against.
enum class Execution { kSerial, kParallel };

struct TrackerConfig {
  TrackerMode mode = TrackerMode::kRtcst;
  int d = 50;
  int n_t = 100;
  int n_s = 100;
  double epsilon = 0.01;
  std::optional<int> eta;  // unset: floor(d/2) for RTCST, 15 for RTCST-B
  double lambda = 20.0;
  double tau = 0.7;
  ProjectionKind projection = ProjectionKind::kHash;
  int hash_seeds = 1;
  TransitionParams transition;
  Estimator estimator = Estimator::kMse;
  std::uint64_t seed = 0;
  int max_template_pixels = 1024;
  Execution execution = Execution::kParallel;

  /// Sparsity cap actually used: the configured or mode default, capped at d.
  int resolved_eta() const;
  void validate() const;
};

/// Target templates in raw pixel space plus their projected, unit-norm images.
struct TemplateSet {
  Resolution resolution;
  Eigen::MatrixXd templates;  // d0 x N_t, intensities in [0, 1]
  Eigen::MatrixXd projected;  // d x N_t, unit columns
  Eigen::VectorXd scales;     // norms of the projected columns before scaling

  int n_t() const noexcept { return static_cast<int>(templates.cols()); }

  static TemplateSet build(Eigen::MatrixXd templates, Resolution resolution,
                           const ProjectionMatrix& phi);
};

/// exp(-lambda * residual)
double likelihood(double residual, double lambda);

/// || phi_y - projected_templates * x_t ||_2
double residual_target(const Eigen::Ref<const Eigen::VectorXd>& phi_y,
                       const Eigen::Ref<const Eigen::MatrixXd>& projected_templates,
                       const Eigen::Ref<const Eigen::VectorXd>& x_t);

/// ||x[0:n_t]||_1 / ||x||_1; throws kUndefinedSci when x is zero.
double sci_target(const Eigen::Ref<const Eigen::VectorXd>& x, int n_t);

/// max(||x_t||_1, ||x_b||_1) / ||x||_1 over the split x = [x_t (n_t); x_b (n_b)].
double sci_tb(const Eigen::Ref<const Eigen::VectorXd>& x, int n_t, int n_b);

/// When sci_value < tau, overwrites the template with the smallest target
/// coefficient (lowest index on ties) by `observation` and re-projects that
/// column. Returns the replaced index, or nullopt when nothing changed.
std::optional<int> update_templates(TemplateSet& ts, const ProjectionMatrix& phi,
                                    const Eigen::Ref<const Eigen::VectorXd>& x_target,
                                    const Eigen::Ref<const Eigen::VectorXd>& observation,
                                    double sci_value, double tau);

/// Observation coded against a dictionary. `solution` is empty when the
/// particle box misses the frame or the crop projects to zero.
struct CodedObservation {
  bool valid = false;
  BoundingBox box;
  Eigen::VectorXd raw;    // d0 crop
  Eigen::VectorXd phi_y;  // projected, unit norm
  SparseSolution solution;
  int n_background = 0;   // background atoms in the dictionary (RTCST-B)
  double residual = 0.0;  // target-only residual
};

struct ParticleEvaluation {
  bool overlap = false;
  double residual = 0.0;
  double likelihood = 0.0;
  int iterations = 0;
  int nonzeros = 0;
};

/// Everything the per-particle kernel reads; immutable during a frame.
class FrameContext {
 public:
  FrameContext(const Image& frame, const TemplateSet& templates, const ProjectionMatrix& phi,
               const BoxGeometry& geometry, const TrackerConfig& config, const Csbm* csbm);

  /// Builds the background dictionaries for every distinct in-frame box of
  /// `boxes` (RTCST-B only). Crops at identical boxes are computed once.
  void prepare_backgrounds(const std::vector<BoundingBox>& boxes, Execution execution);

  CodedObservation code(const BoundingBox& box) const;

  /// Likelihood of one particle; zero when its box misses the frame.
  ParticleEvaluation evaluate(const ParticleState& particle) const;

  BoxGeometry geometry() const noexcept { return geometry_; }

 private:
  struct BoxLess {
    bool operator()(const BoundingBox& a, const BoundingBox& b) const noexcept;
  };

  Dictionary background_dictionary(const BoundingBox& box) const;

  const Image& frame_;
  const TemplateSet& templates_;
  const ProjectionMatrix& phi_;
  BoxGeometry geometry_;
  const TrackerConfig& config_;
  const Csbm* csbm_;
  OmpParams omp_;
  Dictionary noise_dictionary_;  // RTCST: shared by every particle
  std::map<BoundingBox, std::pair<Dictionary, int>, BoxLess> backgrounds_;
};

/// Reference kernel: particles evaluated one after another.
std::vector<ParticleEvaluation> evaluate_particles_serial(const FrameContext& ctx,
                                                          const std::vector<ParticleState>& particles);

/// OpenMP kernel with the same per-particle arithmetic; output order and
/// values match the serial kernel exactly.
std::vector<ParticleEvaluation> evaluate_particles_parallel(const FrameContext& ctx,
                                                            const std::vector<ParticleState>& particles);

struct TrackerState {
  TrackerConfig config;
  TemplateSet templates;
  std::shared_ptr<const ProjectionMatrix> phi;
  std::shared_ptr<const Csbm> csbm;
  BoxGeometry geometry;
  ParticleEnsemble ensemble;
  ParticleState current;
  int frame_index = 0;
  int frame_width = 0;
  int frame_height = 0;
};

struct FrameDiagnostics {
  std::vector<double> residuals;
  std::vector<double> likelihoods;
  std::vector<int> iterations;
  std::vector<int> nonzeros;
  int lost_particles = 0;
  bool resample_degenerate = false;
  double mean_residual = 0.0;
  double mean_iterations = 0.0;
  int solution_nonzeros = 0;  // sparsity of the re-solved code at the estimate
  std::optional<double> sci;
  std::optional<int> replaced_template;
};

struct FrameResult {
  ParticleState state;
  BoundingBox box;
  FrameDiagnostics diagnostics;
};

TrackerState init_tracker(const Image& frame0, const BoundingBox& box0, const TrackerConfig& config,
                          std::shared_ptr<const Csbm> csbm = nullptr);

/// One particle-filter step. Throws kTrackingLost (state left untouched)
/// when no particle overlaps the frame.
FrameResult track_frame(TrackerState& state, const Image& frame);

/// Box of a state, clamped to the frame and kept at least 2x2.
BoundingBox output_box(const ParticleState& state, const BoxGeometry& geometry, int width, int height);

}  // namespace sparsetrack
