#include "ges/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "ges/format.hpp"

namespace ges::io {

namespace {

std::string at_line(std::size_t line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

// Lines with their 1-based numbers; a trailing '\r' is dropped.
struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back({number, line});
  }
  return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

double parse_number(std::string_view tok, std::size_t line, std::string_view what) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(at_line(line, std::string(what) + ": not a number '" + std::string(tok) + "'"), line);
  }
  if (!std::isfinite(v)) throw ParseError(at_line(line, std::string(what) + ": value must be finite"), line);
  return v;
}

long parse_count(std::string_view tok, std::size_t line) {
  long v = 0;
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0) {
    throw ParseError(at_line(line, "bad splat count '" + std::string(tok) + "'"), line);
  }
  return v;
}

template <class S>
constexpr int kRotCount = std::is_same_v<S, Splat2> ? 1 : 4;

template <class S>
constexpr int kFieldCount = 2 * S::kDim + kRotCount<S> + 5;

template <class S>
void append_splat(std::string& out, const S& s) {
  std::vector<double> v;
  for (int a = 0; a < S::kDim; ++a) v.push_back(s.mu[a]);
  for (int a = 0; a < S::kDim; ++a) v.push_back(s.log_scale[a]);
  if constexpr (std::is_same_v<S, Splat2>) {
    v.push_back(s.theta);
  } else {
    for (int a = 0; a < 4; ++a) v.push_back(s.quat[a]);
  }
  v.push_back(s.opacity_logit);
  v.push_back(s.b);
  for (int a = 0; a < 3; ++a) v.push_back(s.color[a]);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  out += '\n';
}

template <class S>
std::string serialize(const Scene<S>& scene, std::string_view mode) {
  std::string out = "GES-SCENE 1 ";
  out += mode;
  out += ' ' + std::to_string(scene.size());
  for (int a = 0; a < 3; ++a) out += ' ' + format_double(scene.background[a]);
  out += '\n';
  for (const S& s : scene.splats) append_splat(out, s);
  return out;
}

template <class S>
S parse_splat(const std::vector<std::string_view>& tok, std::size_t line) {
  if (static_cast<int>(tok.size()) != kFieldCount<S>) {
    throw ParseError(at_line(line, "expected " + std::to_string(kFieldCount<S>) + " fields, got " +
                                       std::to_string(tok.size())),
                     line);
  }
  std::size_t i = 0;
  auto next = [&](std::string_view what) { return parse_number(tok[i++], line, what); };
  S s;
  for (int a = 0; a < S::kDim; ++a) s.mu[a] = next("mu");
  for (int a = 0; a < S::kDim; ++a) s.log_scale[a] = next("log_scale");
  if constexpr (std::is_same_v<S, Splat2>) {
    s.theta = next("theta");
  } else {
    for (int a = 0; a < 4; ++a) s.quat[a] = next("quat");
    if (s.quat.norm() == 0.0) throw ParseError(at_line(line, "quaternion is zero"), line);
  }
  s.opacity_logit = next("opacity_logit");
  s.b = next("b");
  for (int a = 0; a < 3; ++a) s.color[a] = next("color");
  return s;
}

struct Header {
  std::string mode;
  long count = 0;
  Vec3 background = Vec3::Zero();
  std::size_t next_line = 0;  // index into the line list
};

Header parse_header(const std::vector<Line>& lines) {
  std::size_t i = 0;
  while (i < lines.size() && blank(lines[i].text)) ++i;
  if (i == lines.size()) throw ParseError("line 1: empty scene file", 1);
  const std::size_t ln = lines[i].number;
  const auto tok = split_ws(lines[i].text);
  if (tok.empty() || tok[0] != "GES-SCENE") throw ParseError(at_line(ln, "missing GES-SCENE header"), ln);
  if (tok.size() != 7) throw ParseError(at_line(ln, "header needs: GES-SCENE 1 <2d|3d> <count> <bg r g b>"), ln);
  if (tok[1] != "1") throw ParseError(at_line(ln, "unsupported version '" + std::string(tok[1]) + "'"), ln);
  if (tok[2] != "2d" && tok[2] != "3d") throw ParseError(at_line(ln, "mode must be 2d or 3d"), ln);
  Header h;
  h.mode = std::string(tok[2]);
  h.count = parse_count(tok[3], ln);
  for (int a = 0; a < 3; ++a) h.background[a] = parse_number(tok[4 + a], ln, "background");
  h.next_line = i + 1;
  return h;
}

template <class S>
Scene<S> parse_body(const std::vector<Line>& lines, const Header& h) {
  Scene<S> scene;
  scene.background = h.background;
  std::size_t last = lines.empty() ? 0 : lines.back().number;
  for (std::size_t i = h.next_line; i < lines.size(); ++i) {
    if (blank(lines[i].text)) continue;
    const std::size_t ln = lines[i].number;
    if (static_cast<long>(scene.size()) == h.count) {
      throw ParseError(at_line(ln, "more splats than the header count " + std::to_string(h.count)), ln);
    }
    scene.add(parse_splat<S>(split_ws(lines[i].text), ln));
  }
  if (static_cast<long>(scene.size()) != h.count) {
    throw ParseError(at_line(last + 1, "expected " + std::to_string(h.count) + " splats, file ends after " +
                                           std::to_string(scene.size())),
                     last + 1);
  }
  return scene;
}

}  // namespace

std::string serialize_scene(const Scene2& scene) { return serialize(scene, "2d"); }
std::string serialize_scene(const Scene3& scene) { return serialize(scene, "3d"); }

AnyScene parse_scene(std::string_view text) {
  const auto lines = split_lines(text);
  const Header h = parse_header(lines);
  if (h.mode == "2d") return parse_body<Splat2>(lines, h);
  return parse_body<Splat3>(lines, h);
}

Scene2 parse_scene_2d(std::string_view text) {
  AnyScene s = parse_scene(text);
  if (!std::holds_alternative<Scene2>(s)) throw ParseError("line 1: expected a 2d scene", 1);
  return std::get<Scene2>(std::move(s));
}

Scene3 parse_scene_3d(std::string_view text) {
  AnyScene s = parse_scene(text);
  if (!std::holds_alternative<Scene3>(s)) throw ParseError("line 1: expected a 3d scene", 1);
  return std::get<Scene3>(std::move(s));
}

std::string serialize_camera(const Camera& cam) {
  std::string out = "CAM " + format_double(cam.fx) + ' ' + format_double(cam.fy) + ' ' + format_double(cam.cx) + ' ' +
                    format_double(cam.cy) + ' ' + format_double(cam.near) + '\n';
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out += format_double(cam.R(r, c)) + ' ';
    out += format_double(cam.t[r]) + '\n';
  }
  return out;
}

Camera parse_camera(std::string_view text) {
  std::vector<Line> lines;
  for (const Line& l : split_lines(text)) {
    if (!blank(l.text)) lines.push_back(l);
  }
  if (lines.empty()) throw ParseError("line 1: empty camera file", 1);
  const auto head = split_ws(lines[0].text);
  const std::size_t ln = lines[0].number;
  if (head.empty() || head[0] != "CAM" || (head.size() != 5 && head.size() != 6)) {
    throw ParseError(at_line(ln, "expected 'CAM fx fy cx cy [near]'"), ln);
  }
  Camera cam;
  cam.fx = parse_number(head[1], ln, "fx");
  cam.fy = parse_number(head[2], ln, "fy");
  cam.cx = parse_number(head[3], ln, "cx");
  cam.cy = parse_number(head[4], ln, "cy");
  if (head.size() == 6) cam.near = parse_number(head[5], ln, "near");
  if (lines.size() != 4) {
    const std::size_t at = lines.size() < 4 ? lines.back().number + 1 : lines[4].number;
    throw ParseError(at_line(at, "camera needs exactly three 'r0 r1 r2 t' rows"), at);
  }
  for (int r = 0; r < 3; ++r) {
    const auto tok = split_ws(lines[r + 1].text);
    const std::size_t rl = lines[r + 1].number;
    if (tok.size() != 4) throw ParseError(at_line(rl, "expected 4 numbers"), rl);
    for (int c = 0; c < 3; ++c) cam.R(r, c) = parse_number(tok[c], rl, "R");
    cam.t[r] = parse_number(tok[3], rl, "t");
  }
  try {
    cam.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(at_line(ln, e.what()), ln);
  }
  return cam;
}

void write_ppm(std::ostream& os, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw std::invalid_argument("write_ppm: expected 1 or 3 channels");
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::string bytes;
  bytes.reserve(img.pixel_count() * 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) {
      const double v = img.data[p * img.channels + (img.channels == 1 ? 0 : c)];
      // NaN maps to black; nearbyint rounds half to even.
      const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::nearbyint(clamped * 255.0))));
    }
  }
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write_ppm: write failed");
}

namespace {

class PpmReader {
 public:
  explicit PpmReader(std::istream& is) : data_(std::istreambuf_iterator<char>(is), {}) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("ppm: byte " + std::to_string(pos_) + ": " + msg);
  }

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long header_int() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '9') {
      v = v * 10 + (data_[pos_] - '0');
      if (v > (1L << 30)) fail("header value too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected a positive integer");
    return v;
  }

  Image read() {
    if (data_.size() < 2 || data_[0] != 'P' || (data_[1] != '6' && data_[1] != '5')) fail("not a P6 or P5 file");
    const int channels = data_[1] == '6' ? 3 : 1;
    pos_ = 2;
    const long w = header_int();
    const long h = header_int();
    const long maxval = header_int();
    if (w <= 0 || h <= 0) fail("width and height must be positive");
    if (maxval <= 0 || maxval > 65535) fail("maxval must be in [1, 65535]");
    if (pos_ >= data_.size() || !(data_[pos_] == ' ' || data_[pos_] == '\n' || data_[pos_] == '\t' || data_[pos_] == '\r')) {
      fail("expected whitespace after maxval");
    }
    ++pos_;
    const int bytes_per = maxval > 255 ? 2 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * h * channels * bytes_per;
    if (data_.size() - pos_ < need) {
      pos_ = data_.size();
      fail("truncated pixel data: need " + std::to_string(need) + " bytes");
    }
    Image img(static_cast<int>(w), static_cast<int>(h), channels);
    for (std::size_t i = 0; i < img.size(); ++i) {
      long v = static_cast<unsigned char>(data_[pos_++]);
      if (bytes_per == 2) v = (v << 8) | static_cast<unsigned char>(data_[pos_++]);
      if (v > maxval) fail("sample exceeds maxval");
      img.data[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

Image read_ppm(std::istream& is) { return PpmReader(is).read(); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& fields) {
    if (fields.size() != header.size()) throw std::invalid_argument("write_csv: row width differs from the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      os << csv_field(fields[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Image load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_ppm(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_ppm(const std::filesystem::path& path, const Image& img) {
  std::ostringstream ss;
  write_ppm(ss, img);
  write_text_file(path, ss.str());
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  Dataset ds;
  for (const std::string& name : names) {
    const auto cam_path = dir / (name + ".cam");
    if (!std::filesystem::exists(cam_path)) throw std::runtime_error("missing camera file " + cam_path.string());
    Camera cam;
    try {
      cam = parse_camera(read_text_file(cam_path));
    } catch (const ParseError& e) {
      throw ParseError(cam_path.string() + ": " + e.what(), e.line());
    }
    train::View view{cam, load_ppm(dir / (name + ".ppm"))};
    if (view.image.channels != 3) throw std::runtime_error(name + ".ppm: expected an RGB image");
    const bool held_out = name.rfind("test_", 0) == 0;
    (held_out ? ds.test : ds.train).push_back(std::move(view));
    (held_out ? ds.test_names : ds.train_names).push_back(name);
  }
  if (ds.train.empty()) throw std::runtime_error("dataset has no training views: " + dir.string());
  return ds;
}

void save_dataset(const std::filesystem::path& dir, const std::vector<train::View>& views,
                  const std::vector<std::string>& names) {
  if (views.size() != names.size()) throw std::invalid_argument("save_dataset: one name per view");
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < views.size(); ++i) {
    save_ppm(dir / (names[i] + ".ppm"), views[i].image);
    write_text_file(dir / (names[i] + ".cam"), serialize_camera(views[i].camera));
  }
}

std::string metrics_csv(const std::vector<train::MetricsRow>& rows) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    body.push_back({std::to_string(r.iter), format_double(r.loss), format_double(r.l1), format_double(r.ssim),
                    format_double(r.freq), format_double(r.psnr), std::to_string(r.n_splats), format_double(r.omega)});
  }
  std::ostringstream ss;
  write_csv(ss, {"iter", "loss", "l1", "ssim", "freq", "psnr", "n_splats", "omega"}, body);
  return ss.str();
}

}  // namespace ges::io
