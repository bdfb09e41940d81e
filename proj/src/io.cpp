#include "sparsetrack/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "sparsetrack/error.hpp"

namespace sparsetrack {
namespace {

constexpr std::string_view kModule = "cli_io";

namespace fs = std::filesystem;

[[noreturn]] void parse_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kParse, kModule, path.string() + ": " + what);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, kModule, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, kModule, "cannot write " + path.string());
  return out;
}

// Cursor over PGM header tokens, skipping whitespace and '#' comments.
class HeaderReader {
 public:
  HeaderReader(const std::string& data, const fs::path& path) : data_(data), path_(path) {}

  std::string token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) parse_error(path_, "truncated PGM header");
    return data_.substr(start, pos_ - start);
  }

  int number() {
    const std::string t = token();
    int value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || end != t.data() + t.size()) parse_error(path_, "bad PGM header field '" + t + "'");
    return value;
  }

  // Consumes the single whitespace byte that separates header and raster.
  std::size_t raster_start() {
    if (pos_ >= data_.size()) parse_error(path_, "missing PGM raster");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& s, const fs::path& path, int line, const char* column) {
  int value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    parse_error(path, "line " + std::to_string(line) + ": column '" + column + "' is not an integer: '" + s + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Image read_pgm(const fs::path& path) {
  const std::string data = read_file(path);
  HeaderReader header(data, path);
  const std::string magic = header.token();
  if (magic != "P2" && magic != "P5") parse_error(path, "not a PGM file (magic '" + magic + "')");
  const int width = header.number();
  const int height = header.number();
  const int maxval = header.number();
  if (width < 1 || height < 1) parse_error(path, "non-positive image size");
  if (maxval < 1 || maxval > 65535) parse_error(path, "maxval out of range");

  Image image(width, height);
  const std::size_t count = image.pixels.size();
  if (magic == "P5") {
    const std::size_t start = header.raster_start();
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    if (data.size() < start + count * bytes) parse_error(path, "truncated PGM raster");
    for (std::size_t i = 0; i < count; ++i) {
      unsigned value = static_cast<unsigned char>(data[start + i * bytes]);
      if (bytes == 2) value = (value << 8) | static_cast<unsigned char>(data[start + i * 2 + 1]);
      if (value > static_cast<unsigned>(maxval)) parse_error(path, "pixel exceeds maxval");
      image.pixels[i] = static_cast<double>(value) / maxval;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const int value = header.number();
      if (value < 0 || value > maxval) parse_error(path, "pixel exceeds maxval");
      image.pixels[i] = static_cast<double>(value) / maxval;
    }
  }
  return image;
}

void write_pgm(const fs::path& path, const Image& image) {
  auto out = open_output(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::string raster(image.pixels.size(), '\0');
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const double v = std::clamp(image.pixels[i], 0.0, 1.0);
    raster[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::kIo, kModule, "failed writing " + path.string());
}

FrameSequence load_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, kModule, dir.string() + " is not a directory");
  static const std::regex pattern(R"(frame_(\d+)\.pgm)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      files.emplace_back(std::stoi(m[1].str()), entry.path());
    }
  }
  if (files.empty()) throw Error(ErrorCode::kIo, kModule, "no frame_<N>.pgm files in " + dir.string());
  std::sort(files.begin(), files.end());
  FrameSequence seq;
  for (const auto& [index, path] : files) {
    if (!seq.indices.empty() && seq.indices.back() == index) {
      throw Error(ErrorCode::kParse, kModule, "duplicate frame index " + std::to_string(index));
    }
    Image frame = read_pgm(path);
    if (!seq.frames.empty() && !frame.same_shape(seq.frames.front())) {
      throw Error(ErrorCode::kInvalidDimension, kModule, path.string() + " differs in size from the first frame");
    }
    seq.frames.push_back(std::move(frame));
    seq.indices.push_back(index);
  }
  return seq;
}

void write_sequence(const fs::path& dir, const FrameSequence& sequence) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < sequence.frames.size(); ++i) {
    write_pgm(dir / ("frame_" + std::to_string(sequence.indices[i]) + ".pgm"), sequence.frames[i]);
  }
}

std::vector<FrameBox> load_ground_truth(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) parse_error(path, "missing header");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
  std::array<std::size_t, 5> idx{};
  const std::array<const char*, 5> names{"frame", "l", "t", "r", "b"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = column.find(names[k]);
    if (it == column.end()) parse_error(path, std::string("header lacks column '") + names[k] + "'");
    idx[k] = it->second;
  }

  std::vector<FrameBox> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (fields.size() < header.size()) {
      parse_error(path, "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    FrameBox row;
    row.frame = parse_int(fields[idx[0]], path, line_no, names[0]);
    row.box.l = parse_int(fields[idx[1]], path, line_no, names[1]);
    row.box.t = parse_int(fields[idx[2]], path, line_no, names[2]);
    row.box.r = parse_int(fields[idx[3]], path, line_no, names[3]);
    row.box.b = parse_int(fields[idx[4]], path, line_no, names[4]);
    if (row.box.l >= row.box.r) parse_error(path, "line " + std::to_string(line_no) + ": l >= r");
    if (row.box.t >= row.box.b) parse_error(path, "line " + std::to_string(line_no) + ": t >= b");
    rows.push_back(row);
  }
  return rows;
}

void write_ground_truth(const fs::path& path, const std::vector<FrameBox>& boxes) {
  auto out = open_output(path);
  out << "frame,l,t,r,b\n";
  for (const auto& row : boxes) {
    out << row.frame << ',' << row.box.l << ',' << row.box.t << ',' << row.box.r << ',' << row.box.b << '\n';
  }
}

std::vector<ForegroundAnnotation> annotations_from_boxes(const std::vector<FrameBox>& rows) {
  std::map<int, ForegroundAnnotation> grouped;
  for (const auto& row : rows) {
    auto& a = grouped[row.frame];
    a.frame_index = row.frame;
    a.boxes.push_back(row.box);
  }
  std::vector<ForegroundAnnotation> out;
  for (auto& [frame, a] : grouped) out.push_back(std::move(a));
  return out;
}

void write_results(const fs::path& path, const std::vector<ResultRecord>& records) {
  auto out = open_output(path);
  out << "frame,l,t,r,b,estimator,mean_residual,mean_iterations,sparsity,sci,updated\n";
  for (const auto& r : records) {
    out << r.frame << ',' << r.box.l << ',' << r.box.t << ',' << r.box.r << ',' << r.box.b << ','
        << (r.estimator == Estimator::kMse ? "mse" : "map") << ','
        << (r.mean_residual ? format_double(*r.mean_residual) : "") << ','
        << (r.mean_iterations ? format_double(*r.mean_iterations) : "") << ','
        << (r.sparsity ? std::to_string(*r.sparsity) : "") << ','
        << (r.sci ? format_double(*r.sci) : "") << ',' << (r.template_updated ? 1 : 0) << '\n';
  }
}

void write_metrics(const fs::path& path, const std::vector<MetricRecord>& records) {
  auto out = open_output(path);
  out << "frame,l,r,t,b,tsp,error\n";
  for (const auto& m : records) {
    out << m.frame << ',' << m.box.l << ',' << m.box.r << ',' << m.box.t << ',' << m.box.b << ','
        << format_double(m.tsp) << ',' << format_double(m.error) << '\n';
  }
}

void write_band(const fs::path& path, const std::vector<int>& frames, const TspBand& band) {
  if (frames.size() != band.mean.size()) {
    throw Error(ErrorCode::kInvalidDimension, kModule, "band length does not match frame count");
  }
  auto out = open_output(path);
  out << "frame,mean_tsp,std_tsp,lo,hi\n";
  for (std::size_t f = 0; f < frames.size(); ++f) {
    out << frames[f] << ',' << format_double(band.mean[f]) << ',' << format_double(band.std[f]) << ','
        << format_double(band.lo(f)) << ',' << format_double(band.hi(f)) << '\n';
  }
}

void write_csbm(const fs::path& dir, const Csbm& csbm) {
  csbm.validate();
  fs::create_directories(dir);
  for (int i = 0; i < csbm.n_b(); ++i) {
    write_pgm(dir / ("bg_" + std::to_string(i) + ".pgm"), csbm.backgrounds[static_cast<std::size_t>(i)]);
  }
  auto out = open_output(dir / "manifest.txt");
  out << "n_b = " << csbm.n_b() << "\n";
  out << "sources =";
  for (int s : csbm.source_indices) out << ' ' << s;
  out << "\nseed = " << csbm.seed << "\n";
}

Csbm load_csbm(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  std::istringstream in(read_file(manifest));
  std::string line;
  Csbm csbm;
  int n_b = -1;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char c) { return std::isspace(c); }), key.end());
    std::istringstream value(line.substr(eq + 1));
    if (key == "n_b") {
      value >> n_b;
    } else if (key == "sources") {
      int s = 0;
      while (value >> s) csbm.source_indices.push_back(s);
    } else if (key == "seed") {
      value >> csbm.seed;
    }
  }
  if (n_b < 1) parse_error(manifest, "missing or invalid n_b");
  for (int i = 0; i < n_b; ++i) csbm.backgrounds.push_back(read_pgm(dir / ("bg_" + std::to_string(i) + ".pgm")));
  csbm.validate();
  return csbm;
}

}  // namespace sparsetrack
