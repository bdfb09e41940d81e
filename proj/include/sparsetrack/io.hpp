#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsetrack/background_model.hpp"
#include "sparsetrack/evaluation.hpp"
#include "sparsetrack/image.hpp"
#include "sparsetrack/tracker.hpp"

namespace sparsetrack {

struct FrameSequence {
  std::vector<Image> frames;
  std::vector<int> indices;  // N of frame_<N>.pgm, strictly increasing
};

/// Reads a P2 or P5 PGM (8-bit or 16-bit maxval) and maps values to [0, 1].
Image read_pgm(const std::filesystem::path& path);

/// Writes binary P5 with maxval 255; intensities are rounded to the nearest level.
void write_pgm(const std::filesystem::path& path, const Image& image);

/// Loads every `frame_<N>.pgm` in `dir`, sorted by N.
FrameSequence load_sequence(const std::filesystem::path& dir);
void write_sequence(const std::filesystem::path& dir, const FrameSequence& sequence);

struct FrameBox {
  int frame = 0;
  BoundingBox box;

  friend bool operator==(const FrameBox&, const FrameBox&) = default;
};

/// Parses a CSV whose header names at least the columns frame, l, t, r, b
/// (any order, extra columns ignored). Rows with l >= r or t >= b are
/// rejected with their line number.
std::vector<FrameBox> load_ground_truth(const std::filesystem::path& path);

/// Writes `frame,l,t,r,b`.
void write_ground_truth(const std::filesystem::path& path, const std::vector<FrameBox>& boxes);

/// Groups rows by frame into foreground annotations.
std::vector<ForegroundAnnotation> annotations_from_boxes(const std::vector<FrameBox>& rows);

/// One row of the tracker result file.
struct ResultRecord {
  int frame = 0;
  BoundingBox box;
  Estimator estimator = Estimator::kMse;
  std::optional<double> mean_residual;
  std::optional<double> mean_iterations;
  std::optional<int> sparsity;
  std::optional<double> sci;
  bool template_updated = false;
};

/// Header `frame,l,t,r,b,estimator,mean_residual,mean_iterations,sparsity,sci,updated`.
void write_results(const std::filesystem::path& path, const std::vector<ResultRecord>& records);

struct MetricRecord {
  int frame = 0;
  BoundingBox box;  // tracked box
  double tsp = 0.0;
  double error = 0.0;
};

/// Header `frame,l,r,t,b,tsp,error`.
void write_metrics(const std::filesystem::path& path, const std::vector<MetricRecord>& records);

/// Header `frame,mean_tsp,std_tsp,lo,hi`.
void write_band(const std::filesystem::path& path, const std::vector<int>& frames, const TspBand& band);

/// Persists a CSBM as bg_<i>.pgm files plus manifest.txt.
void write_csbm(const std::filesystem::path& dir, const Csbm& csbm);
Csbm load_csbm(const std::filesystem::path& dir);

}  // namespace sparsetrack
