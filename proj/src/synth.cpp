#include "ges/synth.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "ges/special.hpp"

namespace ges::synth {

Image square_image(int size) {
  if (size <= 0) throw std::invalid_argument("square_image: size must be positive");
  Image img(size, size, 3, 0.0);
  const int lo = size / 4, hi = size - size / 4;
  for (int i = lo; i < hi; ++i) {
    for (int j = lo; j < hi; ++j) {
      for (int c = 0; c < 3; ++c) img.at(i, j, c) = 1.0;
    }
  }
  return img;
}

Image checker_disk_image(int size) {
  if (size < 8) throw std::invalid_argument("checker_disk_image: size must be >= 8");
  Image img(size, size, 3);
  const int cell = size / 8;
  const double r = size / 4.0;
  const double c0 = size / 2.0;
  const Vec3 light(0.85, 0.85, 0.8), dark(0.15, 0.2, 0.25), disk(0.9, 0.3, 0.1);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double dx = j + 0.5 - c0, dy = i + 0.5 - c0;
      Vec3 v = ((i / cell + j / cell) % 2 == 0) ? light : dark;
      if (dx * dx + dy * dy <= r * r) v = disk;
      for (int c = 0; c < 3; ++c) img.at(i, j, c) = v[c];
    }
  }
  return img;
}

Scene2 random_scene_2d(int n, int width, int height, std::uint64_t seed) {
  if (n <= 0 || width <= 0 || height <= 0) throw std::invalid_argument("random_scene_2d: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Scene2 scene;
  const double s = 0.5 * std::max(width, height) / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    Splat2 sp;
    sp.mu = {u01(rng) * width, u01(rng) * height};
    sp.log_scale = Vec2::Constant(std::log(s));
    sp.theta = u01(rng) * std::numbers::pi;
    sp.opacity_logit = 0.0;
    sp.color = {u01(rng), u01(rng), u01(rng)};
    scene.add(sp);
  }
  return scene;
}

namespace {

Vec4 random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vec4 q(n01(rng), n01(rng), n01(rng), n01(rng));
  return q.normalized();
}

}  // namespace

Scene3 random_scene_3d(int n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("random_scene_3d: n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Scene3 scene;
  for (int k = 0; k < n; ++k) {
    Splat3 sp;
    sp.mu = {u(rng), u(rng), u(rng)};
    for (int a = 0; a < 3; ++a) sp.log_scale[a] = std::log(0.08 + 0.17 * u01(rng));
    sp.quat = random_quat(rng);
    sp.opacity_logit = special::logit(0.6 + 0.35 * u01(rng));
    sp.color = {u01(rng), u01(rng), u01(rng)};
    scene.add(sp);
  }
  return scene;
}

std::vector<Camera> ring_cameras(int count, int size, double radius, double height, double fov_deg) {
  if (count <= 0 || size <= 0 || !(radius > 0.0)) throw std::invalid_argument("ring_cameras: bad arguments");
  std::vector<Camera> cams;
  const double f = 0.5 * size / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    const Vec3 center(radius * std::cos(a), height, radius * std::sin(a));
    // Camera looks along +z toward the origin, y down in the image.
    const Vec3 forward = (-center).normalized();
    const Vec3 world_up(0.0, 1.0, 0.0);
    const Vec3 right = forward.cross(world_up).normalized();
    const Vec3 down = forward.cross(right);
    Camera cam;
    cam.fx = cam.fy = f;
    cam.cx = cam.cy = 0.5 * size;
    cam.R.row(0) = right.transpose();
    cam.R.row(1) = down.transpose();
    cam.R.row(2) = forward.transpose();
    cam.t = -cam.R * center;
    cam.near = 0.01;
    cams.push_back(cam);
  }
  return cams;
}

Scene3 perturb(const Scene3& scene, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Scene3 out = scene;
  for (Splat3& s : out.splats) {
    for (int a = 0; a < 3; ++a) {
      s.mu[a] += amount * n01(rng);
      s.log_scale[a] += amount * n01(rng);
      s.color[a] = std::clamp(s.color[a] + amount * n01(rng), 0.0, 1.0);
    }
    s.opacity_logit += amount * n01(rng);
  }
  return out;
}

std::vector<train::View> render_views(const Scene3& scene, const std::vector<Camera>& cams, int size,
                                      const shape::ShapeModifier& mod) {
  RenderConfig rc;
  rc.width = rc.height = size;
  rc.mod = mod;
  std::vector<train::View> views;
  for (const Camera& c : cams) views.push_back({c, render(scene, c, rc)});
  return views;
}

}  // namespace ges::synth
