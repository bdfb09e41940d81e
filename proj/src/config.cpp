#include "sparsetrack/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sparsetrack/error.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "cli_io";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Parser {
 public:
  Parser(std::string source, int line) : source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorCode::kParse, kModule,
                source_ + ":" + std::to_string(line_) + ": key '" + key + "': " + what);
  }

  template <typename T>
  T number(const std::string& key, const std::string& value) const {
    T out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc() || end != value.data() + value.size()) {
      fail(key, "expected a number, got '" + value + "'");
    }
    return out;
  }

 private:
  std::string source_;
  int line_;
};

}  // namespace

TrackerMode parse_mode(const std::string& value) {
  if (value == "rtcst") return TrackerMode::kRtcst;
  if (value == "rtcst-b" || value == "rtcst_b") return TrackerMode::kRtcstB;
  throw Error(ErrorCode::kInvalidInput, kModule, "unknown mode '" + value + "'");
}

Estimator parse_estimator(const std::string& value) {
  if (value == "mse") return Estimator::kMse;
  if (value == "map") return Estimator::kMap;
  throw Error(ErrorCode::kInvalidInput, kModule, "unknown estimator '" + value + "'");
}

ProjectionKind parse_projection(const std::string& value) {
  if (value == "hash") return ProjectionKind::kHash;
  if (value == "gaussian" || value == "random") return ProjectionKind::kRandomGaussian;
  throw Error(ErrorCode::kInvalidInput, kModule, "unknown projection '" + value + "'");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig config;
  TrackerConfig& t = config.tracker;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const Parser p(source, line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail(line, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto choice = [&](auto parse) {
      try {
        return parse(value);
      } catch (const Error&) {
        p.fail(key, "invalid value '" + value + "'");
      }
    };

    if (key == "mode") t.mode = choice(parse_mode);
    else if (key == "d") t.d = p.number<int>(key, value);
    else if (key == "n_t") t.n_t = p.number<int>(key, value);
    else if (key == "n_s") t.n_s = p.number<int>(key, value);
    else if (key == "epsilon") t.epsilon = p.number<double>(key, value);
    else if (key == "eta") t.eta = p.number<int>(key, value);
    else if (key == "lambda") t.lambda = p.number<double>(key, value);
    else if (key == "tau") t.tau = p.number<double>(key, value);
    else if (key == "projection") t.projection = choice(parse_projection);
    else if (key == "hash_seeds") t.hash_seeds = p.number<int>(key, value);
    else if (key == "sigma_xy") t.transition.sigma_xy = p.number<double>(key, value);
    else if (key == "sigma_scale") t.transition.sigma_scale = p.number<double>(key, value);
    else if (key == "estimator") t.estimator = choice(parse_estimator);
    else if (key == "seed") t.seed = p.number<std::uint64_t>(key, value);
    else if (key == "max_template_pixels") t.max_template_pixels = p.number<int>(key, value);
    else if (key == "frames") config.frames = value;
    else if (key == "background") config.background = value;
    else p.fail(key, "unknown key");

    if (!config.keys.insert(key).second) p.fail(key, "duplicate key");
  }
  try {
    t.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidInput, kModule, source + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, kModule, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace sparsetrack
