#include "sparsetrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "tracker";

// Stream tags for derive_seed.
constexpr std::uint64_t kTemplateStream = 0x7465;
constexpr std::uint64_t kPropagateStream = 1;
constexpr std::uint64_t kResampleStream = 2;
constexpr std::uint64_t kProjectionStream = 3;

Eigen::MatrixXd signed_identity(int d) {
  Eigen::MatrixXd m(d, 2 * d);
  m.leftCols(d).setIdentity();
  m.rightCols(d) = -Eigen::MatrixXd::Identity(d, d);
  return m;
}

}  // namespace

int TrackerConfig::resolved_eta() const {
  const int fallback = mode == TrackerMode::kRtcst ? d / 2 : 15;
  return std::clamp(eta.value_or(fallback), 1, d);
}

void TrackerConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidInput, kModule, what); };
  if (d < 2) fail("d must be at least 2");
  if (n_t < 1) fail("n_t must be positive");
  if (n_s < 1) fail("n_s must be positive");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (eta && *eta < 1) fail("eta must be positive");
  if (!(lambda > 0.0)) fail("lambda must be positive");
  if (hash_seeds < 1) fail("hash_seeds must be positive");
  if (max_template_pixels < 4) fail("max_template_pixels must be at least 4");
  transition.validate();
}

TemplateSet TemplateSet::build(Eigen::MatrixXd templates, Resolution resolution,
                               const ProjectionMatrix& phi) {
  TemplateSet ts;
  ts.resolution = resolution;
  auto [projected, scales] = normalize_columns(phi.project_columns(templates));
  ts.templates = std::move(templates);
  ts.projected = std::move(projected);
  ts.scales = std::move(scales);
  return ts;
}

double likelihood(double residual, double lambda) { return std::exp(-lambda * residual); }

double residual_target(const Eigen::Ref<const Eigen::VectorXd>& phi_y,
                       const Eigen::Ref<const Eigen::MatrixXd>& projected_templates,
                       const Eigen::Ref<const Eigen::VectorXd>& x_t) {
  if (projected_templates.rows() != phi_y.size() || projected_templates.cols() != x_t.size()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "residual operands disagree in size");
  }
  return (phi_y - projected_templates * x_t).norm();
}

double sci_target(const Eigen::Ref<const Eigen::VectorXd>& x, int n_t) {
  if (n_t < 0 || n_t > x.size()) throw Error(ErrorCode::kInvalidDimension, kModule, "n_t exceeds x");
  const double target = x.head(n_t).lpNorm<1>();
  const double total = target + x.tail(x.size() - n_t).lpNorm<1>();
  if (total == 0.0) throw Error(ErrorCode::kUndefinedSci, kModule, "coefficient vector is zero");
  return target / total;
}

double sci_tb(const Eigen::Ref<const Eigen::VectorXd>& x, int n_t, int n_b) {
  if (n_t < 0 || n_b < 0 || n_t + n_b != x.size()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "x does not split into n_t + n_b");
  }
  const double target = x.head(n_t).lpNorm<1>();
  const double background = x.tail(n_b).lpNorm<1>();
  const double total = target + background;  // same sums as the numerator, so the ratio stays <= 1
  if (total == 0.0) throw Error(ErrorCode::kUndefinedSci, kModule, "coefficient vector is zero");
  return std::max(target, background) / total;
}

std::optional<int> update_templates(TemplateSet& ts, const ProjectionMatrix& phi,
                                    const Eigen::Ref<const Eigen::VectorXd>& x_target,
                                    const Eigen::Ref<const Eigen::VectorXd>& observation,
                                    double sci_value, double tau) {
  if (x_target.size() != ts.n_t() || observation.size() != ts.templates.rows()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "template update operands disagree in size");
  }
  if (!(sci_value < tau)) return std::nullopt;
  const Eigen::VectorXd projected = phi.project(observation);
  const double norm = projected.norm();
  if (!(norm > 0.0)) return std::nullopt;  // a zero atom cannot enter the dictionary
  Eigen::Index worst = 0;
  for (Eigen::Index j = 1; j < x_target.size(); ++j) {
    if (x_target[j] < x_target[worst]) worst = j;
  }
  ts.templates.col(worst) = observation;
  ts.projected.col(worst) = projected / norm;
  ts.scales[worst] = norm;
  return static_cast<int>(worst);
}

bool FrameContext::BoxLess::operator()(const BoundingBox& a, const BoundingBox& b) const noexcept {
  return std::tie(a.l, a.r, a.t, a.b) < std::tie(b.l, b.r, b.t, b.b);
}

FrameContext::FrameContext(const Image& frame, const TemplateSet& templates, const ProjectionMatrix& phi,
                           const BoxGeometry& geometry, const TrackerConfig& config, const Csbm* csbm)
    : frame_(frame),
      templates_(templates),
      phi_(phi),
      geometry_(geometry),
      config_(config),
      csbm_(csbm) {
  omp_.epsilon = config.epsilon;
  omp_.eta = config.resolved_eta();
  if (config.mode == TrackerMode::kRtcst) {
    omp_.mode = SelectionMode::kSigned;
    Eigen::MatrixXd atoms(config.d, templates.n_t() + 2 * config.d);
    atoms << templates.projected, signed_identity(config.d);
    noise_dictionary_ = Dictionary::from_normalized(std::move(atoms));
  } else {
    omp_.mode = SelectionMode::kAbsolute;
    if (csbm_ == nullptr) throw Error(ErrorCode::kMissingBackground, kModule, "RTCST-B needs a CSBM");
  }
}

Dictionary FrameContext::background_dictionary(const BoundingBox& box) const {
  const Eigen::MatrixXd raw = background_templates(*csbm_, box, templates_.resolution);
  const Eigen::MatrixXd projected = phi_.project_columns(raw);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < projected.cols(); ++j) {
    if (projected.col(j).norm() > 0.0) keep.push_back(j);
  }
  Eigen::MatrixXd atoms(config_.d, templates_.n_t() + static_cast<Eigen::Index>(keep.size()));
  atoms.leftCols(templates_.n_t()) = templates_.projected;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    atoms.col(templates_.n_t() + static_cast<Eigen::Index>(k)) = projected.col(keep[k]).normalized();
  }
  return Dictionary::from_normalized(std::move(atoms));
}

void FrameContext::prepare_backgrounds(const std::vector<BoundingBox>& boxes, Execution execution) {
  if (config_.mode != TrackerMode::kRtcstB) return;
  std::vector<BoundingBox> pending;
  for (const auto& raw : boxes) {
    const auto box = clamp_to_frame(raw, frame_.width, frame_.height);
    if (!box || backgrounds_.count(raw)) continue;
    backgrounds_.emplace(raw, std::pair<Dictionary, int>{});
    pending.push_back(raw);
  }
  std::vector<Dictionary> built(pending.size());
  const long count = static_cast<long>(pending.size());
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) built[static_cast<std::size_t>(i)] = background_dictionary(pending[static_cast<std::size_t>(i)]);
  } else {
    for (long i = 0; i < count; ++i) built[static_cast<std::size_t>(i)] = background_dictionary(pending[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const int n_background = static_cast<int>(built[i].cols()) - templates_.n_t();
    backgrounds_[pending[i]] = {std::move(built[i]), n_background};
  }
}

CodedObservation FrameContext::code(const BoundingBox& box) const {
  CodedObservation out;
  out.box = box;
  if (!clamp_to_frame(box, frame_.width, frame_.height)) return out;
  out.raw = crop_vectorize(frame_, box, templates_.resolution);
  out.phi_y = phi_.project(out.raw);
  const double norm = out.phi_y.norm();
  if (!(norm > 0.0)) return out;
  out.phi_y /= norm;

  const Dictionary* dict = &noise_dictionary_;
  Dictionary local;
  if (config_.mode == TrackerMode::kRtcstB) {
    auto it = backgrounds_.find(box);
    if (it != backgrounds_.end()) {
      dict = &it->second.first;
      out.n_background = it->second.second;
    } else {
      local = background_dictionary(box);
      out.n_background = static_cast<int>(local.cols()) - templates_.n_t();
      dict = &local;
    }
  }
  out.solution = omp_solve(*dict, out.phi_y, omp_);
  out.residual = residual_target(out.phi_y, templates_.projected,
                                 out.solution.coefficients.head(templates_.n_t()));
  out.valid = true;
  return out;
}

ParticleEvaluation FrameContext::evaluate(const ParticleState& particle) const {
  ParticleEvaluation e;
  const CodedObservation coded = code(box_from_state(particle, geometry_));
  if (!coded.valid) return e;
  e.overlap = true;
  e.residual = coded.residual;
  e.likelihood = likelihood(coded.residual, config_.lambda);
  e.iterations = coded.solution.iterations;
  e.nonzeros = coded.solution.nonzeros();
  return e;
}

BoundingBox output_box(const ParticleState& state, const BoxGeometry& geometry, int width, int height) {
  BoundingBox box = box_from_state(state, geometry);
  box.l = std::clamp(box.l, 0, width - 2);
  box.t = std::clamp(box.t, 0, height - 2);
  box.r = std::clamp(box.r, box.l + 1, width - 1);
  box.b = std::clamp(box.b, box.t + 1, height - 1);
  return box;
}

TrackerState init_tracker(const Image& frame0, const BoundingBox& box0, const TrackerConfig& config,
                          std::shared_ptr<const Csbm> csbm) {
  config.validate();
  if (!box0.valid() || box0.l < 0 || box0.t < 0 || box0.r >= frame0.width || box0.b >= frame0.height) {
    throw Error(ErrorCode::kInvalidBox, kModule,
                "initial box [" + std::to_string(box0.l) + "," + std::to_string(box0.r) + "," +
                    std::to_string(box0.t) + "," + std::to_string(box0.b) + "] is not inside the " +
                    std::to_string(frame0.width) + "x" + std::to_string(frame0.height) + " frame");
  }
  if (config.mode == TrackerMode::kRtcstB) {
    if (!csbm) throw Error(ErrorCode::kMissingBackground, kModule, "RTCST-B needs a CSBM");
    csbm->validate();
    if (csbm->width() != frame0.width || csbm->height() != frame0.height) {
      throw Error(ErrorCode::kInvalidDimension, kModule, "CSBM frames do not match the sequence size");
    }
  }

  TrackerState state;
  state.config = config;
  state.csbm = std::move(csbm);
  state.geometry = BoxGeometry::from_box(box0);
  state.frame_width = frame0.width;
  state.frame_height = frame0.height;
  const Resolution resolution = template_resolution(box0, config.max_template_pixels);
  const int d0 = resolution.size();
  if (config.d > d0 && config.projection == ProjectionKind::kRandomGaussian) {
    throw Error(ErrorCode::kInvalidDimension, kModule,
                "d = " + std::to_string(config.d) + " exceeds template size " + std::to_string(d0));
  }
  const std::uint64_t phi_seed = derive_seed(config.seed, kProjectionStream);
  state.phi = std::make_shared<const ProjectionMatrix>(
      config.projection == ProjectionKind::kHash
          ? ProjectionMatrix::hash(config.d, d0, config.hash_seeds, phi_seed)
          : ProjectionMatrix::random_gaussian(config.d, d0, phi_seed));

  const ParticleState origin = state_from_box(box0);
  Eigen::MatrixXd templates(d0, config.n_t);
  templates.col(0) = crop_vectorize(frame0, box0, resolution);
  Rng rng(derive_seed(config.seed, kTemplateStream));
  for (int k = 1; k < config.n_t; ++k) {
    const double dx = static_cast<double>(rng.uniform_int(-2, 2));
    const double dy = static_cast<double>(rng.uniform_int(-2, 2));
    const double s = rng.uniform(0.95, 1.05);
    const ParticleState perturbed{origin.cx + dx, origin.cy + dy, s};
    templates.col(k) = extract_observation(frame0, perturbed, state.geometry, resolution);
  }
  state.templates = TemplateSet::build(std::move(templates), resolution, *state.phi);
  state.ensemble = ParticleEnsemble::uniform_at(origin, config.n_s);
  state.current = origin;
  return state;
}

FrameResult track_frame(TrackerState& state, const Image& frame) {
  if (frame.width != state.frame_width || frame.height != state.frame_height) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "frame size differs from the initial frame");
  }
  const TrackerConfig& config = state.config;
  const int frame_index = state.frame_index + 1;

  ParticleEnsemble moved =
      propagate(state.ensemble, config.transition, derive_seed(config.seed, frame_index, kPropagateStream));

  FrameContext ctx(frame, state.templates, *state.phi, state.geometry, config, state.csbm.get());
  if (config.mode == TrackerMode::kRtcstB) {
    std::vector<BoundingBox> boxes;
    boxes.reserve(moved.size());
    for (const auto& p : moved.particles) boxes.push_back(box_from_state(p, state.geometry));
    ctx.prepare_backgrounds(boxes, config.execution);
  }
  const auto evaluations = config.execution == Execution::kParallel
                               ? evaluate_particles_parallel(ctx, moved.particles)
                               : evaluate_particles_serial(ctx, moved.particles);

  FrameResult result;
  auto& diag = result.diagnostics;
  const std::size_t n = evaluations.size();
  diag.residuals.resize(n);
  diag.likelihoods.resize(n);
  diag.iterations.resize(n);
  diag.nonzeros.resize(n);
  int counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = evaluations[i];
    diag.residuals[i] = e.residual;
    diag.likelihoods[i] = e.likelihood;
    diag.iterations[i] = e.iterations;
    diag.nonzeros[i] = e.nonzeros;
    if (!e.overlap) {
      ++diag.lost_particles;
      continue;
    }
    ++counted;
    diag.mean_residual += e.residual;
    diag.mean_iterations += e.iterations;
  }
  if (counted == 0 || std::all_of(diag.likelihoods.begin(), diag.likelihoods.end(),
                                  [](double l) { return l == 0.0; })) {
    throw Error(ErrorCode::kTrackingLost, kModule,
                "frame " + std::to_string(frame_index) + ": no particle overlaps the frame; last state (" +
                    std::to_string(state.current.cx) + ", " + std::to_string(state.current.cy) + ", " +
                    std::to_string(state.current.scale) + ")");
  }
  diag.mean_residual /= counted;
  diag.mean_iterations /= counted;

  // Point estimate from the pre-resampling particles.
  const ParticleState estimate = config.estimator == Estimator::kMse
                                     ? estimate_mse(moved, diag.likelihoods)
                                     : estimate_map(moved, diag.likelihoods);

  // Weights were uniform after the previous resample, so w_k is proportional to l_k.
  double total = 0.0;
  for (double l : diag.likelihoods) total += l;
  for (std::size_t i = 0; i < n; ++i) moved.weights[i] = diag.likelihoods[i] / total;
  auto resampled = resample(moved, derive_seed(config.seed, frame_index, kResampleStream));
  diag.resample_degenerate = resampled.degenerate;

  const CodedObservation coded = ctx.code(box_from_state(estimate, state.geometry));
  if (coded.valid) {
    const auto& x = coded.solution.coefficients;
    diag.solution_nonzeros = coded.solution.nonzeros();
    if (x.lpNorm<1>() > 0.0) {
      const int n_t = state.templates.n_t();
      diag.sci = config.mode == TrackerMode::kRtcst ? sci_target(x, n_t)
                                                    : sci_tb(x, n_t, coded.n_background);
      diag.replaced_template =
          update_templates(state.templates, *state.phi, x.head(n_t), coded.raw, *diag.sci, config.tau);
    }
  }

  state.ensemble = std::move(resampled.ensemble);
  state.current = estimate;
  state.frame_index = frame_index;
  result.state = estimate;
  result.box = output_box(estimate, state.geometry, frame.width, frame.height);
  return result;
}

}  // namespace sparsetrack
