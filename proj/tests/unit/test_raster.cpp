#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ges/raster.hpp"
#include "ges/special.hpp"
#include "ges/synth.hpp"
#include "support/fd.hpp"

using namespace ges;
using ges::testing::kink_free;
using ges::testing::random_image;
using ges::testing::random_small_scene_2d;
using ges::testing::rel_err;
using ges::testing::weighted_sum;

namespace {

RenderConfig small_cfg(int size, double rho = 0.1) {
  RenderConfig cfg;
  cfg.width = cfg.height = size;
  cfg.mod = {rho, shape::ModifierMode::kApproximate};
  return cfg;
}

// Straightforward per-pixel compositor with no binning, for cross-checks.
Image reference_render(const Scene2& scene, const RenderConfig& cfg) {
  Image img(cfg.width, cfg.height, 3);
  for (int i = 0; i < cfg.height; ++i) {
    for (int j = 0; j < cfg.width; ++j) {
      Vec3 c = Vec3::Zero();
      double t = 1.0;
      for (const Splat2& s : scene.splats) {
        const Mat2 cov = covariance(s);
        const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
        Mat2 a;
        a << cov(1, 1) / det, -cov(0, 1) / det, -cov(0, 1) / det, cov(0, 0) / det;
        const Vec2 d = Vec2(j + 0.5, i + 0.5) - s.mu;
        const double q = d.dot(a * d);
        if (!(q <= cfg.cutoff * cfg.cutoff)) continue;
        const double alpha = std::min(s.opacity() * std::exp(-0.5 * q), cfg.alpha_clip);
        c += alpha * t * s.color;
        t *= 1.0 - alpha;
      }
      c += t * scene.background;
      for (int ch = 0; ch < 3; ++ch) img.at(i, j, ch) = c[ch];
    }
  }
  return img;
}

}  // namespace

TEST_CASE("empty scene renders the background") {
  Scene2 scene;
  scene.background = {0.2, 0.4, 0.6};
  const Image img = render(scene, small_cfg(8));
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(img.at(i, j, 0) == 0.2);
      CHECK(img.at(i, j, 1) == 0.4);
      CHECK(img.at(i, j, 2) == 0.6);
    }
  }
}

TEST_CASE("pixel at the mean composites 0.9 c + 0.1 bg") {
  Scene2 scene;
  scene.background = {0.0, 0.5, 1.0};
  Splat2 s;
  s.mu = {3.5, 2.5};
  s.opacity_logit = special::logit(0.9);
  s.color = {1.0, 0.25, 0.0};
  scene.add(s);
  const Image img = render(scene, small_cfg(8));
  CHECK(img.at(2, 3, 0) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(img.at(2, 3, 1) == doctest::Approx(0.9 * 0.25 + 0.05).epsilon(1e-14));
  CHECK(img.at(2, 3, 2) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("beta = 2 scenes match a plain Gaussian compositor bit for bit") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Scene2 scene = random_small_scene_2d(6, 24, rng);
    for (Splat2& s : scene.splats) s.b = 0.0;
    const RenderConfig cfg = small_cfg(24);
    const Image got = render(scene, cfg);
    RenderConfig gauss = cfg;
    gauss.mod = shape::ShapeModifier::gaussian();
    const Image base = render(scene, gauss);
    const Image ref = reference_render(scene, cfg);
    CHECK(got.data == base.data);
    for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(std::abs(got.data[i] - ref.data[i]) <= 1e-15);
  }
}

TEST_CASE("rho = 0 renders identically for any b") {
  std::mt19937_64 rng(5);
  Scene2 scene = random_small_scene_2d(5, 16, rng);
  Scene2 flat = scene;
  for (Splat2& s : flat.splats) s.b = 0.0;
  const RenderConfig cfg = small_cfg(16, 0.0);
  CHECK(render(scene, cfg).data == render(flat, cfg).data);
}

TEST_CASE("output stays within [0, 1] and is deterministic across thread counts") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Scene2 scene = random_small_scene_2d(12, 40, rng);
    RenderConfig cfg = small_cfg(40);
    const Image a = render(scene, cfg);
    for (double v : a.data) REQUIRE((v >= 0.0 && v <= 1.0));
    cfg.threads = 4;
    CHECK(render(scene, cfg).data == a.data);
    const Image w = random_image(40, 40, 3, rng, -1.0, 1.0);
    cfg.threads = 1;
    const auto g1 = render_backward(scene, cfg, w);
    cfg.threads = 3;
    const auto g3 = render_backward(scene, cfg, w);
    CHECK(g1.grads == g3.grads);
  }
}

TEST_CASE("singular covariances are skipped and counted") {
  Scene2 scene;
  Splat2 s;
  s.mu = {4, 4};
  s.log_scale = {0.0, -20.0};
  s.color = {1, 1, 1};
  scene.add(s);
  RenderDiagnostics diag;
  const Image img = render(scene, small_cfg(8), &diag);
  CHECK(diag.skipped_singular == 1);
  for (double v : img.data) CHECK(v == 0.0);
}

TEST_CASE("disjoint splats commute") {
  Scene2 scene;
  Splat2 a;
  a.mu = {4, 4};
  a.color = {1, 0, 0};
  a.opacity_logit = 1.0;
  Splat2 b = a;
  b.mu = {20, 20};
  b.color = {0, 1, 0};
  scene.add(a);
  scene.add(b);
  Scene2 swapped = scene;
  std::swap(swapped.splats[0], swapped.splats[1]);
  const RenderConfig cfg = small_cfg(24);
  CHECK(render(scene, cfg).data == render(swapped, cfg).data);
}

TEST_CASE("larger b enlarges the footprint") {
  Scene2 scene;
  Splat2 s;
  s.mu = {16, 16};
  s.log_scale = {std::log(3.0), std::log(2.0)};
  s.opacity_logit = 2.0;
  s.color = {1, 1, 1};
  scene.add(s);
  const RenderConfig cfg = small_cfg(32);
  auto covered = [&](double b) {
    scene.splats[0].b = b;
    const Image img = render(scene, cfg);
    int n = 0;
    for (std::size_t p = 0; p < img.pixel_count(); ++p) n += img.data[3 * p] > 0.0;
    return n;
  };
  CHECK(covered(-3.0) < covered(0.0));
  CHECK(covered(0.0) < covered(5.0));
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  std::mt19937_64 rng(2);
  Scene2 scene = random_small_scene_2d(4, 16, rng);
  const auto r = render_backward(scene, small_cfg(16), Image(16, 16, 3, 0.0));
  for (const auto& g : r.grads) {
    for (double v : g) CHECK(v == 0.0);
  }
}

TEST_CASE("analytic gradients match central differences for every parameter group") {
  std::mt19937_64 rng(2024);
  constexpr double kStep = 1e-4;
  int instances = 0;
  double worst = 0.0;
  while (instances < 100) {
    const int n = 1 + static_cast<int>(rng() % 5);
    Scene2 scene = random_small_scene_2d(n, 16, rng);
    RenderConfig cfg = small_cfg(16, instances % 2 ? 0.5 : 0.1);
    if (instances % 5 == 4) cfg.mod.mode = shape::ModifierMode::kExactNormalized;
    if (!kink_free(to_screen(scene, cfg.mod), cfg, 2e-3)) continue;
    ++instances;
    const Image w = random_image(16, 16, 3, rng, -1.0, 1.0);
    const auto analytic = render_backward(scene, cfg, w);
    for (std::size_t k = 0; k < scene.size(); ++k) {
      const ParamArray<Splat2> base = pack(scene.splats[k]);
      for (int i = 0; i < SplatLayout<Splat2>::kCount; ++i) {
        auto eval = [&](double delta) {
          Scene2 sc = scene;
          ParamArray<Splat2> p = base;
          p[i] += delta;
          unpack(p, sc.splats[k]);
          return weighted_sum(render(sc, cfg), w);
        };
        const double numeric = (eval(kStep) - eval(-kStep)) / (2 * kStep);
        const double e = rel_err(analytic.grads[k][i], numeric);
        worst = std::max(worst, e);
        INFO("instance " << instances << " splat " << k << " param " << i << " analytic " << analytic.grads[k][i]
                         << " numeric " << numeric);
        CHECK(e < 1e-4);
      }
    }
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("b gradient at beta = 2 carries the rho / 2 factor") {
  Scene2 scene;
  Splat2 s;
  s.mu = {7.3, 8.1};
  s.log_scale = {std::log(2.0), std::log(1.5)};
  s.theta = 0.4;
  s.opacity_logit = 0.3;
  s.color = {0.9, 0.2, 0.4};
  scene.add(s);
  RenderConfig cfg = small_cfg(16, 0.1);
  std::mt19937_64 rng(9);
  const Image w = random_image(16, 16, 3, rng, -1.0, 1.0);
  const auto g = render_backward(scene, cfg, w);
  // d/db through Sigma_eff = phi Sigma equals phi'(2) = rho / 2 times the
  // derivative with respect to a pure variance scale at scale 1.
  auto eval_scale = [&](double c) {
    Scene2 sc = scene;
    sc.splats[0].log_scale.array() += 0.5 * std::log(c);
    return weighted_sum(render(sc, cfg), w);
  };
  const double d_scale = (eval_scale(1 + 1e-5) - eval_scale(1 - 1e-5)) / 2e-5;
  CHECK(rel_err(g.grads[0][9], 0.05 * d_scale) < 1e-4);
}

TEST_CASE("backward from a forward trace equals the re-walked backward") {
  const Scene2 scene = synth::random_scene_2d(80, 40, 30, 5);
  RenderConfig rc;
  rc.width = 40;
  rc.height = 30;
  rc.mod = {0.3, shape::ModifierMode::kApproximate};
  std::mt19937_64 rng(6);
  const Image w = random_image(40, 30, 3, rng, -1.0, 1.0);
  RenderTrace trace;
  const Image a = render(scene, rc, nullptr, &trace);
  CHECK(a.data == render(scene, rc).data);
  const auto with = render_backward(scene, rc, w, &trace);
  const auto without = render_backward(scene, rc, w);
  CHECK(with.grads == without.grads);
  rc.width = 41;
  CHECK_THROWS_AS(render_backward(scene, rc, random_image(41, 30, 3, rng), &trace), std::invalid_argument);
}
