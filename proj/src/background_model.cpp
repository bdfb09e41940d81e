#include "sparsetrack/background_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "sparsetrack/error.hpp"
#include "sparsetrack/rng.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "background_model";

double assignment_cost(const Eigen::MatrixXd& dist, const std::vector<int>& medoids) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int m : medoids) nearest = std::min(nearest, dist(i, m));
    cost += nearest;
  }
  return cost;
}

std::string describe(const BoundingBox& b) {
  return "[" + std::to_string(b.l) + "," + std::to_string(b.r) + "," + std::to_string(b.t) + "," +
         std::to_string(b.b) + "]";
}

}  // namespace

void Csbm::validate() const {
  if (backgrounds.empty()) throw Error(ErrorCode::kInvalidInput, kModule, "CSBM needs N_b >= 1");
  for (const auto& g : backgrounds) {
    if (!g.same_shape(backgrounds.front())) {
      throw Error(ErrorCode::kInvalidDimension, kModule, "CSBM frames differ in size");
    }
  }
}

Image patch_background(const Image& base, const Image& donor, const BoundingBox& region) {
  if (!base.same_shape(donor)) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "frame and donor differ in size");
  }
  if (!(region.l <= region.r && region.t <= region.b)) {
    throw Error(ErrorCode::kInvalidBox, kModule, "invalid region " + describe(region));
  }
  const auto c = clamp_to_frame(region, base.width, base.height);
  if (!c) throw Error(ErrorCode::kInvalidBox, kModule, "region " + describe(region) + " is outside the frame");
  Image out = base;
  for (int y = c->t; y <= c->b; ++y) {
    for (int x = c->l; x <= c->r; ++x) out.at(x, y) = donor.at(x, y);
  }
  return out;
}

KMedoidsResult k_medoids(const Eigen::MatrixXd& distances, int k, std::uint64_t seed, int max_passes) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n || n == 0) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "distance matrix must be square and non-empty");
  }
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidInput, kModule,
                "k = " + std::to_string(k) + " out of range for " + std::to_string(n) + " points");
  }

  Rng rng(seed);
  std::vector<int> medoids{static_cast<int>(rng.uniform_int(0, n - 1))};
  std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
  is_medoid[static_cast<std::size_t>(medoids[0])] = 1;
  while (static_cast<int>(medoids.size()) < k) {
    int farthest = -1;
    double farthest_dist = -1.0;
    for (int i = 0; i < n; ++i) {
      if (is_medoid[static_cast<std::size_t>(i)]) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (int m : medoids) nearest = std::min(nearest, distances(i, m));
      if (nearest > farthest_dist) {
        farthest_dist = nearest;
        farthest = i;
      }
    }
    medoids.push_back(farthest);
    is_medoid[static_cast<std::size_t>(farthest)] = 1;
  }

  double cost = assignment_cost(distances, medoids);
  for (int pass = 0; pass < max_passes; ++pass) {
    double best_cost = cost;
    int best_slot = -1;
    int best_point = -1;
    for (int slot = 0; slot < k; ++slot) {
      for (int o = 0; o < n; ++o) {
        if (is_medoid[static_cast<std::size_t>(o)]) continue;
        std::vector<int> trial = medoids;
        trial[static_cast<std::size_t>(slot)] = o;
        const double c = assignment_cost(distances, trial);
        if (c < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
          best_cost = c;
          best_slot = slot;
          best_point = o;
        }
      }
    }
    if (best_slot < 0) break;
    is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_slot)])] = 0;
    is_medoid[static_cast<std::size_t>(best_point)] = 1;
    medoids[static_cast<std::size_t>(best_slot)] = best_point;
    cost = best_cost;
  }
  std::sort(medoids.begin(), medoids.end());
  return {medoids, cost};
}

Csbm build_csbm(const std::vector<BackgroundCandidate>& candidates, const CsbmOptions& options) {
  const int count = static_cast<int>(candidates.size());
  if (options.n_b < 1) throw Error(ErrorCode::kInvalidInput, kModule, "n_b must be positive");
  if (count < options.n_b) {
    throw Error(ErrorCode::kInvalidInput, kModule,
                std::to_string(count) + " candidates cannot supply " + std::to_string(options.n_b) +
                    " backgrounds");
  }
  if (options.downsample < 1) throw Error(ErrorCode::kInvalidInput, kModule, "downsample must be positive");
  for (const auto& c : candidates) {
    if (!c.frame.same_shape(candidates.front().frame)) {
      throw Error(ErrorCode::kInvalidDimension, kModule,
                  "candidate frame " + std::to_string(c.annotation.frame_index) + " differs in size");
    }
  }

  // Donor order for each candidate: nearest frame index first, earlier frame on ties.
  std::vector<Image> patched;
  patched.reserve(candidates.size());
  for (int i = 0; i < count; ++i) {
    const auto& self = candidates[static_cast<std::size_t>(i)];
    std::vector<int> donors;
    for (int j = 0; j < count; ++j) {
      if (j != i) donors.push_back(j);
    }
    std::stable_sort(donors.begin(), donors.end(), [&](int a, int b) {
      const int da = std::abs(candidates[static_cast<std::size_t>(a)].annotation.frame_index - self.annotation.frame_index);
      const int db = std::abs(candidates[static_cast<std::size_t>(b)].annotation.frame_index - self.annotation.frame_index);
      if (da != db) return da < db;
      return candidates[static_cast<std::size_t>(a)].annotation.frame_index <
             candidates[static_cast<std::size_t>(b)].annotation.frame_index;
    });

    Image gamma = self.frame;
    for (const auto& region : self.annotation.boxes) {
      int donor = -1;
      for (int j : donors) {
        const auto& boxes = candidates[static_cast<std::size_t>(j)].annotation.boxes;
        const bool clean = std::none_of(boxes.begin(), boxes.end(),
                                        [&](const BoundingBox& b) { return b.intersects(region); });
        if (clean || options.allow_impure) {
          donor = j;
          break;
        }
      }
      if (donor < 0) {
        throw Error(ErrorCode::kUnpatchableRegion, kModule,
                    "frame " + std::to_string(self.annotation.frame_index) + ": no clean donor for region " +
                        describe(region));
      }
      gamma = patch_background(gamma, candidates[static_cast<std::size_t>(donor)].frame, region);
    }
    patched.push_back(std::move(gamma));
  }

  Csbm csbm;
  csbm.seed = options.seed;
  std::vector<int> chosen;
  if (options.n_b == count) {
    for (int i = 0; i < count; ++i) chosen.push_back(i);
  } else {
    const int tw = std::min(options.downsample, patched.front().width);
    const int th = std::min(options.downsample, patched.front().height);
    std::vector<Eigen::VectorXd> thumbs;
    thumbs.reserve(patched.size());
    for (const auto& g : patched) {
      const Image small = resize_bilinear(g, tw, th);
      thumbs.push_back(Eigen::Map<const Eigen::VectorXd>(small.pixels.data(),
                                                         static_cast<Eigen::Index>(small.pixels.size())));
    }
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(count, count);
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        dist(i, j) = dist(j, i) = (thumbs[static_cast<std::size_t>(i)] - thumbs[static_cast<std::size_t>(j)]).norm();
      }
    }
    chosen = k_medoids(dist, options.n_b, options.seed).medoids;
  }
  for (int i : chosen) {
    csbm.backgrounds.push_back(patched[static_cast<std::size_t>(i)]);
    csbm.source_indices.push_back(candidates[static_cast<std::size_t>(i)].annotation.frame_index);
  }
  return csbm;
}

Eigen::MatrixXd background_templates(const Csbm& csbm, const BoundingBox& region, Resolution resolution) {
  csbm.validate();
  Eigen::MatrixXd out(resolution.size(), csbm.n_b());
  for (int i = 0; i < csbm.n_b(); ++i) {
    out.col(i) = crop_vectorize(csbm.backgrounds[static_cast<std::size_t>(i)], region, resolution);
  }
  return out;
}

}  // namespace sparsetrack
