#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ges/image.hpp"
#include "ges/raster.hpp"
#include "ges/splat.hpp"

/// Pinhole camera, EWA covariance projection and depth ordering for 3D scenes.

namespace ges {

struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  /// World-to-camera: x_cam = R x_world + t.
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  double near = 0.01;

  /// Throws std::invalid_argument on non-positive focal lengths or near
  /// plane, or when R is not orthonormal within 1e-10.
  void validate() const;

  Vec3 to_camera(const Vec3& world) const { return R * world + t; }
};

struct Projected {
  Vec2 mean = Vec2::Zero();
  /// J W Sigma W^T J^T before the shape modifier.
  Mat2 cov = Mat2::Zero();
  /// Modifier-scaled covariance used for rasterization.
  Mat2 cov_eff = Mat2::Zero();
  double depth = 0.0;
  Vec3 cam = Vec3::Zero();
};

/// Nothing when the camera-space depth is at or before the near plane.
std::optional<Projected> project_splat(const Splat3& s, const Camera& cam, const shape::ShapeModifier& mod);

/// 2x3 Jacobian of (fx x / z + cx, fy y / z + cy) at camera-space point p.
Eigen::Matrix<double, 2, 3> projection_jacobian(const Camera& cam, const Vec3& p);

struct ProjectionGrad {
  Vec3 mu = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
  double b = 0.0;
};

/// Pulls screen-space gradients (mean, effective covariance) back to the
/// world mean, world covariance and the shape offset b.
ProjectionGrad project_backward(const Splat3& s, const Camera& cam, const shape::ShapeModifier& mod,
                                const Vec2& d_mean, const Mat2& d_cov_eff);

struct DepthEntry {
  double depth = 0.0;
  std::uint64_t key = 0;
  int index = 0;
};

/// Ascending depth, ties by key. Stable.
std::vector<DepthEntry> sort_by_depth(std::vector<DepthEntry> entries);

struct FrameSplats {
  std::vector<ScreenSplat> screen;
  /// Scene index of each screen splat, in compositing order.
  std::vector<int> order;
  int culled = 0;
};

FrameSplats prepare_frame(const Scene3& scene, const Camera& cam, const shape::ShapeModifier& mod);

Image render(const Scene3& scene, const Camera& cam, const RenderConfig& cfg, RenderDiagnostics* diag = nullptr,
             RenderTrace* trace = nullptr);

struct BackwardResult3 {
  std::vector<ParamArray<Splat3>> grads;
  /// Gradient with respect to the projected mean (zero for culled splats).
  std::vector<Vec2> screen_mean_grads;
  /// False for splats culled in this view.
  std::vector<bool> visible;
};

BackwardResult3 render_backward(const Scene3& scene, const Camera& cam, const RenderConfig& cfg,
                                const Image& dL_dimage, const RenderTrace* trace = nullptr);

}  // namespace ges
