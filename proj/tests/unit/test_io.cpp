#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>
#include <sstream>

#include "ges/io.hpp"
#include "ges/synth.hpp"
#include "support/fd.hpp"

using namespace ges;
using namespace ges::io;

namespace {

Scene2 odd_scene_2d() {
  Scene2 s = synth::random_scene_2d(7, 30, 20, 3);
  s.background = {0.1, 1.0 / 3.0, 2e-300};
  s.splats[0].b = -1.2345678901234567;
  s.splats[1].opacity_logit = 1e-17;
  s.splats[2].theta = -0.0;
  return s;
}

std::size_t error_line(std::string_view text) {
  try {
    parse_scene(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("2d scene round-trips exactly") {
  const Scene2 s = odd_scene_2d();
  const std::string text = serialize_scene(s);
  const Scene2 back = parse_scene_2d(text);
  REQUIRE(back.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(pack(back.splats[k]) == pack(s.splats[k]));
    CHECK(back.splats[k].depth_key == k);
  }
  CHECK(back.background == s.background);
  CHECK(serialize_scene(back) == text);
}

TEST_CASE("3d scene round-trips exactly and renders identically") {
  Scene3 s = synth::random_scene_3d(20, 4);
  s.splats[3].b = 0.75;
  const std::string text = serialize_scene(s);
  const Scene3 back = parse_scene_3d(text);
  CHECK(serialize_scene(back) == text);
  const auto cams = synth::ring_cameras(2, 32, 4.0, 0.5);
  RenderConfig rc;
  rc.width = rc.height = 32;
  for (const Camera& c : cams) CHECK(render(back, c, rc).data == render(s, c, rc).data);
}

TEST_CASE("header layout") {
  Scene2 s;
  Splat2 sp;
  sp.mu = {1.5, 2};
  sp.color = {0.25, 0.5, 1};
  s.add(sp);
  CHECK(serialize_scene(s) == "GES-SCENE 1 2d 1 0 0 0\n1.5 2 0 0 0 0 0 0.25 0.5 1\n");
}

TEST_CASE("parse errors name the line") {
  const std::string good = serialize_scene(synth::random_scene_2d(3, 10, 10, 1));
  CHECK(error_line(good) == 0);
  // Truncated body: the header promises 3, the file ends after 2 on line 3.
  const std::string truncated = good.substr(0, good.rfind('\n', good.size() - 2) + 1);
  CHECK(error_line(truncated) == 4);
  // Wrong field count on the second splat.
  std::string bad = good;
  const auto l3 = bad.find('\n', bad.find('\n') + 1) + 1;
  bad.insert(l3, "7 ");
  CHECK(error_line(bad) == 3);
  CHECK(error_line("GES-SCENE 2 2d 0 0 0 0\n") == 1);
  CHECK(error_line("GES-SCENE 1 4d 0 0 0 0\n") == 1);
  CHECK(error_line("SCENE 1 2d 0 0 0 0\n") == 1);
  CHECK(error_line("GES-SCENE 1 2d 1 0 0 0\n1 2 3 4 5 6 7 8 9 x\n") == 2);
  CHECK(error_line("GES-SCENE 1 2d 1 0 0 0\n1 2 3 4 5 6 7 8 9 nan\n") == 2);
  CHECK(error_line("GES-SCENE 1 2d 0 0 0 0\n1 2 3 4 5 6 7 8 9 10\n") == 2);
  CHECK(error_line("") == 1);
  CHECK_THROWS_AS(parse_scene_3d(good), ParseError);
}

TEST_CASE("camera round-trip and validation") {
  const auto cams = synth::ring_cameras(3, 40, 3.0, 1.0);
  for (const Camera& c : cams) {
    const Camera back = parse_camera(serialize_camera(c));
    CHECK(back.R == c.R);
    CHECK(back.t == c.t);
    CHECK(back.fx == c.fx);
    CHECK(back.near == c.near);
  }
  const Camera simple = parse_camera("CAM 10 11 5 6\n1 0 0 0\n0 1 0 0\n0 0 1 2\n");
  CHECK(simple.fy == 11.0);
  CHECK(simple.near == 0.01);
  CHECK_THROWS_AS(parse_camera("CAM 10 11 5 6\n1 0 0 0\n0 1 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_camera("CAM 10 11 5 6\n2 0 0 0\n0 1 0 0\n0 0 1 0\n"), ParseError);
}

TEST_CASE("ppm round-trip, rounding and errors") {
  Image img(3, 2, 3);
  img.data = {0.0, 1.0, 0.5, 1.5 / 255, 2.5 / 255, -1.0, 2.0, 0.25, 0.75, 100.0 / 255, NAN, 1.0,
              0.2, 0.4, 0.6, 0.8, 0.9, 0.1};
  std::stringstream ss;
  write_ppm(ss, img);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 11) == "P6\n3 2\n255\n");
  // 0.5 * 255 = 127.5 and 2.5 round to even; 1.5 rounds up to 2.
  CHECK(static_cast<unsigned char>(bytes[11 + 2]) == 128);
  CHECK(static_cast<unsigned char>(bytes[11 + 3]) == 2);
  CHECK(static_cast<unsigned char>(bytes[11 + 4]) == 2);
  CHECK(static_cast<unsigned char>(bytes[11 + 5]) == 0);
  CHECK(static_cast<unsigned char>(bytes[11 + 6]) == 255);
  CHECK(static_cast<unsigned char>(bytes[11 + 10]) == 0);
  const Image back = read_ppm(ss);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  std::stringstream again;
  write_ppm(again, back);
  CHECK(again.str() == bytes);

  std::stringstream commented("P6 # comment\n1 1\n255\n\x01\x02\x03");
  const Image c = read_ppm(commented);
  CHECK(c.data[2] == doctest::Approx(3.0 / 255));
  std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_ppm(truncated), ParseError);
  std::stringstream wrong("P3\n1 1\n255\n0 0 0\n");
  CHECK_THROWS_AS(read_ppm(wrong), ParseError);
}

TEST_CASE("all-background render gives a constant ppm") {
  Scene2 s;
  s.background = {0.2, 0.4, 0.6};
  RenderConfig rc;
  rc.width = 5;
  rc.height = 4;
  std::stringstream ss;
  write_ppm(ss, render(s, rc));
  const std::string px = ss.str().substr(11);
  REQUIRE(px.size() == 60);
  for (std::size_t i = 0; i < px.size(); i += 3) CHECK(px.substr(i, 3) == px.substr(0, 3));
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  write_csv(os, {"a", "b"}, {{"1", "x,y"}});
  CHECK(os.str() == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS_AS(write_csv(os, {"a"}, {{"1", "2"}}), std::invalid_argument);
}

TEST_CASE("dataset directories split held-out views") {
  const auto dir = std::filesystem::temp_directory_path() / "ges_io_dataset_test";
  std::filesystem::remove_all(dir);
  const Scene3 gt = synth::random_scene_3d(10, 2);
  const auto cams = synth::ring_cameras(3, 16, 4.0, 0.5);
  const auto views = synth::render_views(gt, cams, 16, shape::ShapeModifier{});
  save_dataset(dir, views, {"view_000", "view_001", "test_000"});
  const Dataset ds = load_dataset(dir);
  CHECK(ds.train.size() == 2);
  CHECK(ds.test.size() == 1);
  CHECK(ds.train_names[1] == "view_001");
  CHECK(ds.test[0].camera.R == cams[2].R);
  std::filesystem::remove(dir / "view_001.cam");
  CHECK_THROWS(load_dataset(dir));
  std::filesystem::remove_all(dir);
}
