#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "sparsetrack/tracker.hpp"

namespace sparsetrack {

/// Tracker settings read from a config file. `keys` records which keys were
/// present so command-line flags can tell explicit values from defaults.
struct RunConfig {
  TrackerConfig tracker;
  std::optional<std::filesystem::path> frames;
  std::optional<std::filesystem::path> background;
  std::set<std::string> keys;
};

/// Parses `key = value` lines; `#` starts a comment. Absent keys keep their
/// defaults, unknown keys and malformed values are errors naming the key.
///
/// | key                 | default | values                      |
/// |---------------------|---------|-----------------------------|
/// | mode                | rtcst   | rtcst, rtcst-b              |
/// | d                   | 50      | int >= 1                    |
/// | n_t                 | 100     | int >= 1                    |
/// | n_s                 | 100     | int >= 1                    |
/// | epsilon             | 0.01    | real > 0                    |
/// | eta                 | mode    | int >= 1 (d/2 or 15)        |
/// | lambda              | 20      | real > 0                    |
/// | tau                 | 0.7     | real                        |
/// | projection          | hash    | hash, gaussian              |
/// | hash_seeds          | 1       | int >= 1                    |
/// | sigma_xy            | 4       | real >= 0                   |
/// | sigma_scale         | 0.02    | real >= 0                   |
/// | estimator           | mse     | mse, map                    |
/// | seed                | 0       | unsigned 64-bit             |
/// | max_template_pixels | 1024    | int >= 1                    |
/// | frames, background  | unset   | path                        |
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

TrackerMode parse_mode(const std::string& value);
Estimator parse_estimator(const std::string& value);
ProjectionKind parse_projection(const std::string& value);

}  // namespace sparsetrack
