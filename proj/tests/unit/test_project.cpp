#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numbers>
#include <random>

#include "ges/project.hpp"
#include "ges/special.hpp"
#include "ges/synth.hpp"
#include "support/fd.hpp"

using namespace ges;
using ges::testing::kink_free;
using ges::testing::random_image;
using ges::testing::rel_err;
using ges::testing::weighted_sum;

namespace {

Camera axis_camera(double f = 100.0, double c = 32.0) {
  Camera cam;
  cam.fx = cam.fy = f;
  cam.cx = cam.cy = c;
  return cam;
}

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

}  // namespace

TEST_CASE("on-axis splat projects to the principal point") {
  Splat3 s;
  s.mu = {0, 0, 5};
  const auto p = project_splat(s, axis_camera(), shape::ShapeModifier{});
  REQUIRE(p.has_value());
  CHECK(p->mean.x() == 32.0);
  CHECK(p->mean.y() == 32.0);
  CHECK(p->depth == 5.0);
}

TEST_CASE("isotropic covariance projects to (f sigma / z)^2") {
  Camera cam = axis_camera(120.0, 10.0);
  cam.fy = 80.0;
  Splat3 s;
  s.mu = {0, 0, 4};
  const double sigma = 0.3;
  s.log_scale = Vec3::Constant(std::log(sigma));
  const auto p = project_splat(s, cam, shape::ShapeModifier{});
  REQUIRE(p.has_value());
  CHECK(p->cov(0, 0) == doctest::Approx(std::pow(120 * sigma / 4, 2)).epsilon(1e-12));
  CHECK(p->cov(1, 1) == doctest::Approx(std::pow(80 * sigma / 4, 2)).epsilon(1e-12));
  CHECK(std::abs(p->cov(0, 1)) < 1e-12);
  // Twice as deep, half the standard deviation.
  s.mu.z() = 8;
  const auto q = project_splat(s, cam, shape::ShapeModifier{});
  CHECK(std::sqrt(q->cov(0, 0)) == doctest::Approx(0.5 * std::sqrt(p->cov(0, 0))).epsilon(1e-8));
}

TEST_CASE("beta = 2 leaves the projected covariance unmodified") {
  Splat3 s;
  s.mu = {0.3, -0.2, 3};
  s.log_scale = {-1.0, -1.5, -0.7};
  s.quat = {0.9, 0.1, 0.3, -0.2};
  const auto p = project_splat(s, axis_camera(), shape::ShapeModifier{});
  CHECK(p->cov_eff == p->cov);
}

TEST_CASE("splats at or before the near plane are culled") {
  Camera cam = axis_camera();
  cam.near = 0.5;
  Splat3 s;
  s.mu = {0, 0, 0.5};
  CHECK_FALSE(project_splat(s, cam, shape::ShapeModifier{}).has_value());
  s.mu = {0, 0, -2};
  CHECK_FALSE(project_splat(s, cam, shape::ShapeModifier{}).has_value());
}

TEST_CASE("camera validation") {
  Camera cam = axis_camera();
  CHECK_NOTHROW(cam.validate());
  cam.R(0, 1) = 1e-6;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
  cam = axis_camera();
  cam.fx = 0;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
}

TEST_CASE("sort_by_depth orders by depth then key") {
  std::vector<DepthEntry> e{{2.0, 5, 0}, {1.0, 7, 1}, {1.0, 3, 2}, {2.0, 1, 3}};
  const auto s = sort_by_depth(e);
  CHECK(s[0].index == 2);
  CHECK(s[1].index == 1);
  CHECK(s[2].index == 3);
  CHECK(s[3].index == 0);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(0, 5);
  std::vector<DepthEntry> many;
  for (int i = 0; i < 300; ++i) many.push_back({static_cast<double>(d(rng)), static_cast<std::uint64_t>(i), i});
  std::shuffle(many.begin(), many.end(), rng);
  auto ref = many;
  std::sort(ref.begin(), ref.end(), [](auto& a, auto& b) { return std::tie(a.depth, a.key) < std::tie(b.depth, b.key); });
  const auto got = sort_by_depth(many);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].index == ref[i].index);
}

TEST_CASE("isotropic footprint is invariant under camera roll") {
  Scene3 scene;
  Splat3 s;
  s.mu = {0, 0, 4};
  s.log_scale = Vec3::Constant(std::log(0.4));
  s.opacity_logit = 1.0;
  s.color = {0.8, 0.5, 0.2};
  scene.add(s);
  RenderConfig rc;
  rc.width = rc.height = 64;
  const Camera cam = axis_camera(100.0, 32.0);
  const Image base = render(scene, cam, rc);
  for (double a : {0.3, 1.1, 2.5}) {
    Camera rolled = cam;
    rolled.R = rot_z(a);
    CHECK(std::sqrt(mse(base, render(scene, rolled, rc))) < 1e-6);
  }
}

TEST_CASE("3D render with all beta = 2 equals the Gaussian path") {
  Scene3 scene = synth::random_scene_3d(30, 8);
  const auto cams = synth::ring_cameras(3, 48, 4.0, 0.5);
  RenderConfig rc;
  rc.width = rc.height = 48;
  RenderConfig gauss = rc;
  gauss.mod = shape::ShapeModifier::gaussian();
  for (const Camera& c : cams) CHECK(render(scene, c, rc).data == render(scene, c, gauss).data);
}

TEST_CASE("3D gradients match central differences") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr double kStep = 1e-4;
  int instances = 0;
  double worst = 0.0;
  while (instances < 100) {
    const int n = 1 + static_cast<int>(rng() % 4);
    Scene3 scene;
    scene.background = {u01(rng), u01(rng), u01(rng)};
    for (int k = 0; k < n; ++k) {
      Splat3 s;
      s.mu = {u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5};
      for (int a = 0; a < 3; ++a) s.log_scale[a] = std::log(0.15 + 0.2 * u01(rng));
      s.quat = {u01(rng) + 0.2, u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5};
      s.opacity_logit = -1.0 + 2.5 * u01(rng);
      s.color = {u01(rng), u01(rng), u01(rng)};
      s.b = -1.5 + 3 * u01(rng);
      scene.add(s);
    }
    Camera cam;
    cam.fx = 20.0 + 5 * u01(rng);
    cam.fy = 20.0 + 5 * u01(rng);
    cam.cx = cam.cy = 8.0;
    cam.R = Eigen::AngleAxisd(0.3 * u01(rng), Vec3(u01(rng), u01(rng), 1).normalized()).toRotationMatrix();
    cam.t = {0.1 * u01(rng), 0.1 * u01(rng), 3.0};
    RenderConfig rc;
    rc.width = rc.height = 16;
    rc.mod = {instances % 2 ? 0.5 : 0.1, shape::ModifierMode::kApproximate};
    if (!kink_free(prepare_frame(scene, cam, rc.mod).screen, rc, 2e-3)) continue;
    ++instances;
    const Image w = random_image(16, 16, 3, rng, -1.0, 1.0);
    const auto analytic = render_backward(scene, cam, rc, w);
    for (std::size_t k = 0; k < scene.size(); ++k) {
      const ParamArray<Splat3> base = pack(scene.splats[k]);
      for (int i = 0; i < SplatLayout<Splat3>::kCount; ++i) {
        auto eval = [&](double delta) {
          Scene3 sc = scene;
          ParamArray<Splat3> p = base;
          p[i] += delta;
          unpack(p, sc.splats[k]);
          return weighted_sum(render(sc, cam, rc), w);
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

TEST_CASE("project_backward matches finite differences of the projection") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Splat3 s;
    s.mu = {0.5 * u(rng), 0.5 * u(rng), 2.0 + u(rng)};
    s.log_scale = {0.3 * u(rng) - 1, 0.3 * u(rng) - 1, 0.3 * u(rng) - 1};
    s.quat = {1 + 0.2 * u(rng), u(rng), u(rng), u(rng)};
    s.b = u(rng);
    Camera cam = axis_camera(50.0, 0.0);
    cam.R = Eigen::AngleAxisd(0.5 * u(rng), Vec3(u(rng), u(rng), 1).normalized()).toRotationMatrix();
    const shape::ShapeModifier mod{0.3, shape::ModifierMode::kApproximate};
    const Vec2 dm(u(rng), u(rng));
    Mat2 dc;
    dc << u(rng), u(rng), u(rng), u(rng);
    auto loss = [&](const Splat3& t) {
      const auto p = project_splat(t, cam, mod);
      return dm.dot(p->mean) + dc.cwiseProduct(p->cov_eff).sum();
    };
    const ProjectionGrad g = project_backward(s, cam, mod, dm, dc);
    for (int a = 0; a < 3; ++a) {
      Splat3 p = s, m = s;
      p.mu[a] += 1e-6;
      m.mu[a] -= 1e-6;
      CHECK(rel_err(g.mu[a], (loss(p) - loss(m)) / 2e-6) < 1e-5);
    }
    Splat3 p = s, m = s;
    p.b += 1e-6;
    m.b -= 1e-6;
    CHECK(rel_err(g.b, (loss(p) - loss(m)) / 2e-6) < 1e-5);
  }
}
