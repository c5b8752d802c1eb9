#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ges/image.hpp"
#include "ges/project.hpp"
#include "ges/splat.hpp"
#include "ges/train.hpp"

/// Text scene and camera files, binary PPM images and CSV tables.
///
/// Scene file:
///
///     GES-SCENE 1 2d <count> <bg r> <bg g> <bg b>
///     mu.. log_scale.. rot.. opacity_logit b r g b     (one splat per line)
///
/// rot is theta in 2D and a quaternion w x y z in 3D. Numbers are written
/// with 17 significant digits so every double survives a round trip.
/// Depth keys are not stored; parsing assigns them in file order.
///
/// Camera file: `CAM fx fy cx cy [near]` followed by three rows `r0 r1 r2 t`.

namespace ges::io {

/// Malformed input. `line` is 1-based for text formats; byte offsets are
/// reported in the message for PPM.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0) : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

using AnyScene = std::variant<Scene2, Scene3>;

std::string serialize_scene(const Scene2& scene);
std::string serialize_scene(const Scene3& scene);

/// Throws ParseError naming the offending line.
AnyScene parse_scene(std::string_view text);
Scene2 parse_scene_2d(std::string_view text);
Scene3 parse_scene_3d(std::string_view text);

std::string serialize_camera(const Camera& cam);
Camera parse_camera(std::string_view text);

/// 8-bit binary PPM (P6). Values are clamped to [0, 1] and rounded half to
/// even; one-channel images are written as gray RGB.
void write_ppm(std::ostream& os, const Image& img);
/// Reads P6 or P5 with maxval up to 65535; P5 gives a one-channel image.
Image read_ppm(std::istream& is);

/// One CSV field, quoted when it contains a comma, quote or line break.
std::string csv_field(std::string_view s);
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view text);
Image load_ppm(const std::filesystem::path& path);
void save_ppm(const std::filesystem::path& path, const Image& img);

/// A 3D dataset directory: every `<name>.ppm` with a matching `<name>.cam`
/// is a view, in name order. Names starting with `test_` are held out.
struct Dataset {
  std::vector<train::View> train;
  std::vector<train::View> test;
  std::vector<std::string> train_names;
  std::vector<std::string> test_names;
};

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const std::vector<train::View>& views,
                  const std::vector<std::string>& names);

std::string metrics_csv(const std::vector<train::MetricsRow>& rows);

}  // namespace ges::io
