#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "ges/special.hpp"
#include "ges/synth.hpp"
#include "ges/train.hpp"

using namespace ges;
using namespace ges::train;
using doctest::Approx;

namespace {

Splat2 make_splat(double x, double y, double log_scale, double opacity, double b = 0.0) {
  Splat2 s;
  s.mu = {x, y};
  s.log_scale = {log_scale, log_scale - 0.3};
  s.theta = 0.4;
  s.opacity_logit = special::logit(opacity);
  s.color = {0.7, 0.2, 0.4};
  s.b = b;
  return s;
}

TrainConfig small_config(std::int64_t iters) {
  TrainConfig c;
  c.iterations = iters;
  c.lr_pos_max_steps = iters;
  c.densify_from = 20;
  c.densify_until = iters / 2;
  c.densify_interval = 20;
  c.densify_grad_threshold = 2e-3;
  c.opacity_reset_interval = 60;
  c.shape_reset_interval = 50;
  c.shape_prune_interval = 25;
  c.log_interval = 10;
  c.lr_pos_init = 0.05;
  c.lr_pos_final = 0.005;
  return c;
}

bool same_history(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].iter != b[i].iter || a[i].n_splats != b[i].n_splats) return false;
    for (auto [x, y] : {std::pair{a[i].loss, b[i].loss}, {a[i].l1, b[i].l1}, {a[i].ssim, b[i].ssim},
                        {a[i].freq, b[i].freq}, {a[i].psnr, b[i].psnr}}) {
      if (!(std::abs(x - y) <= tol)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("config text parsing") {
  const TrainConfig c = parse_config("# comment\niterations = 250\n\nrho=0.3   # trailing\nlearn_shape = false\n"
                                     "modifier_mode = exact\n");
  CHECK(c.iterations == 250);
  CHECK(c.rho == 0.3);
  CHECK_FALSE(c.learn_shape);
  CHECK(c.modifier_mode == shape::ModifierMode::kExactNormalized);

  auto error_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(error_of("iterations = 5\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("iterations = 5\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("\n\nrho = abc\n").find("line 3") != std::string::npos);
  CHECK(error_of("rho = 0.1\nrho = 0.2\n").find("repeated") != std::string::npos);
  CHECK(error_of("iterations\n").find("line 1") != std::string::npos);
  CHECK(error_of("iterations = 1.5\n").find("line 1") != std::string::npos);
  CHECK(error_of("learn_shape = maybe\n") != "no error");
}

TEST_CASE("config entries round-trip through the parser") {
  TrainConfig c;
  c.rho = 0.123456789012345;
  c.lambda_omega = 1.0 / 3.0;
  c.modifier_mode = shape::ModifierMode::kExactNormalized;
  c.densify = false;
  std::string text;
  for (const auto& [k, v] : config_entries(c)) text += k + " = " + v + "\n";
  const TrainConfig back = parse_config(text);
  CHECK(config_entries(back) == config_entries(c));
}

TEST_CASE("config validation names the field") {
  TrainConfig c;
  c.lambda_omega = 0.9;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  c = TrainConfig{};
  c.rho = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("baseline config switches off every shape feature") {
  const TrainConfig b = TrainConfig{}.gaussian_baseline();
  CHECK(b.rho == 0.0);
  CHECK(b.lambda_omega == 0.0);
  CHECK_FALSE(b.learn_shape);
  CHECK_FALSE(b.shape_prune);
  CHECK_FALSE(b.shape_reset);
  CHECK(b.iterations == TrainConfig{}.iterations);
}

TEST_CASE("schedules") {
  CHECK(omega_schedule(0, 100) == 0.0);
  CHECK(omega_schedule(25, 100) == 0.25);
  CHECK(omega_schedule(100, 100) == 1.0);
  CHECK_THROWS(omega_schedule(101, 100));

  TrainConfig c;
  CHECK(position_lr(c, 0) == Approx(c.lr_pos_init).epsilon(1e-14));
  CHECK(position_lr(c, c.lr_pos_max_steps) == Approx(c.lr_pos_final).epsilon(1e-14));
  CHECK(position_lr(c, c.lr_pos_max_steps * 2) == Approx(c.lr_pos_final).epsilon(1e-14));
  CHECK(position_lr(c, c.lr_pos_max_steps / 2) ==
        Approx(std::sqrt(c.lr_pos_init * c.lr_pos_final)).epsilon(1e-12));
  c.lr_delay_steps = 100;
  CHECK(position_lr(c, 0) == Approx(c.lr_delay_mult * c.lr_pos_init).epsilon(1e-12));
}

TEST_CASE("shape prune threshold") {
  TrainConfig c;
  Scene2 s;
  s.add(make_splat(1, 1, 0.0, 0.5, -12.0));
  s.add(make_splat(2, 2, 0.0, 0.5, -10.0));
  s.add(make_splat(3, 3, 0.0, 0.5, 5.0));
  s.add(make_splat(4, 4, 0.0, 0.5, -11.5));
  // 2 / (1 + exp(-0.1 b)) < 0.5  <=>  b < -10 ln 3
  const std::vector<long> kept = shape_prune(s, c);
  CHECK(kept == std::vector<long>{1, 2});
  REQUIRE(s.size() == 2);
  CHECK(s.splats[0].b == -10.0);
  CHECK(s.splats[1].depth_key == 2);
}

TEST_CASE("opacity prune, opacity reset and shape reset") {
  Scene2 s;
  s.add(make_splat(1, 1, 0.0, 0.004));
  s.add(make_splat(2, 2, 0.0, 0.9, 1.5));
  s.add(make_splat(3, 3, 0.0, 0.006, -3.0));
  CHECK(opacity_prune(s, 0.005) == std::vector<long>{1, 2});
  opacity_reset(s, 0.01);
  CHECK(s.splats[0].opacity() == Approx(0.01).epsilon(1e-12));
  CHECK(s.splats[1].opacity() == Approx(0.006).epsilon(1e-12));
  shape_reset(s);
  CHECK(s.splats[0].b == 0.0);
  CHECK(s.splats[1].b == 0.0);
}

TEST_CASE("densify clones small and splits large splats") {
  TrainConfig c;
  c.densify_grad_threshold = 1e-3;
  c.percent_dense = 0.01;
  const double extent = 100.0;  // size limit 1 pixel
  Scene2 s;
  s.add(make_splat(10, 10, std::log(0.5), 0.5));  // small, hot -> clone
  s.add(make_splat(20, 20, std::log(4.0), 0.5));  // large, hot -> split
  s.add(make_splat(30, 30, std::log(4.0), 0.5));  // cold -> untouched
  DensifyStats st;
  st.resize(3);
  st.grad_accum = {0.02, 0.03, 0.0001};
  st.denom = {10, 10, 10};
  st.pos_grad_accum[0] = Vec3(3.0, -4.0, 0.0);
  const DensifyOutcome out = densify(s, st, c, extent, 0.5, 7);
  CHECK(out.clones == 1);
  CHECK(out.splits == 1);
  REQUIRE(s.size() == 5);
  CHECK(out.source == std::vector<long>{0, -1, -1, -1, 2});
  CHECK(s.splats[1].mu.x() == Approx(10.0 - 0.5 * 0.6));
  CHECK(s.splats[1].mu.y() == Approx(10.0 + 0.5 * 0.8));
  CHECK(s.splats[2].log_scale.x() == Approx(std::log(4.0 / 1.6)));
  CHECK(s.splats[3].log_scale.y() == Approx(std::log(4.0) - 0.3 - std::log(1.6)));
  CHECK_NOTHROW(s.validate());
  CHECK(s.splats[4].depth_key == 2);

  DensifyStats wrong;
  wrong.resize(2);
  CHECK_THROWS(densify(s, wrong, c, extent, 0.5, 7));
}

TEST_CASE("camera extent") {
  const auto cams = synth::ring_cameras(6, 16, 4.0, 0.0);
  std::vector<View> views;
  for (const Camera& cam : cams) views.push_back({cam, Image(16, 16, 3)});
  CHECK(camera_extent(views) == Approx(4.4).epsilon(1e-12));
}

TEST_CASE("training reduces the loss and is deterministic across thread counts") {
  const Image target = synth::checker_disk_image(24);
  const Scene2 init = synth::random_scene_2d(30, 24, 24, 3);
  TrainConfig c = small_config(200);
  const TrainResult2 one = train_2d(init, target, c);
  c.threads = 4;
  const TrainResult2 four = train_2d(init, target, c);
  REQUIRE(one.history.size() == 20);
  CHECK(one.history.back().loss < one.history.front().loss);
  CHECK(same_history(one.history, four.history, 0.0));
  REQUIRE(one.scene.size() == four.scene.size());
  for (std::size_t i = 0; i < one.scene.size(); ++i) {
    CHECK(one.scene.splats[i].mu == four.scene.splats[i].mu);
    CHECK(one.scene.splats[i].b == four.scene.splats[i].b);
  }
  CHECK(one.stats.densify_events > 0);
  CHECK(one.stats.shape_resets > 0);
  CHECK(one.stats.opacity_resets > 0);
}

TEST_CASE("zero rho and zero frequency weight follow the gaussian baseline") {
  const Image target = synth::checker_disk_image(24);
  Scene2 init = synth::random_scene_2d(25, 24, 24, 5);
  for (std::size_t i = 0; i < init.size(); ++i) init.splats[i].b = 0.3 * static_cast<double>(i % 5) - 0.6;
  TrainConfig ges = small_config(150);
  ges.rho = 0.0;
  ges.lambda_omega = 0.0;
  const TrainResult2 a = train_2d(init, target, ges);
  const TrainResult2 b = train_2d(init, target, ges.gaussian_baseline());
  CHECK(same_history(a.history, b.history, 1e-10));
  CHECK(a.scene.size() == b.scene.size());
  CHECK(a.stats.shape_pruned == 0);
}

TEST_CASE("3D training runs on a tiny synthetic scene") {
  const Scene3 gt = synth::random_scene_3d(8, 1);
  const auto cams = synth::ring_cameras(3, 20, 4.0, 1.0);
  const std::vector<View> views = synth::render_views(gt, cams, 20, shape::ShapeModifier{0.1});
  TrainConfig c = small_config(60);
  c.densify = false;
  const TrainResult3 r = train_3d(synth::perturb(gt, 0.1, 2), views, c);
  REQUIRE(!r.history.empty());
  CHECK(std::isfinite(r.history.back().loss));
  CHECK(r.history.back().loss <= r.history.front().loss);
  CHECK_THROWS(train_3d(gt, std::span<const View>{}, c));
}
