#include "ges/project.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ges {

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("Camera: focal lengths must be positive");
  if (!(near > 0.0)) throw std::invalid_argument("Camera: near must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy) || !t.allFinite()) throw std::invalid_argument("Camera: non-finite value");
  const double err = (R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) throw std::invalid_argument("Camera: rotation is not orthonormal");
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const Camera& cam, const Vec3& p) {
  const double iz = 1.0 / p.z();
  Eigen::Matrix<double, 2, 3> j;
  j << cam.fx * iz, 0.0, -cam.fx * p.x() * iz * iz,
       0.0, cam.fy * iz, -cam.fy * p.y() * iz * iz;
  return j;
}

std::optional<Projected> project_splat(const Splat3& s, const Camera& cam, const shape::ShapeModifier& mod) {
  const Vec3 p = cam.to_camera(s.mu);
  if (!(p.z() > cam.near)) return std::nullopt;
  Projected out;
  out.cam = p;
  out.depth = p.z();
  out.mean = {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
  const Eigen::Matrix<double, 2, 3> T = projection_jacobian(cam, p) * cam.R;
  out.cov = T * covariance(s) * T.transpose();
  out.cov_eff = mod.value(s.beta()) * out.cov;
  return out;
}

ProjectionGrad project_backward(const Splat3& s, const Camera& cam, const shape::ShapeModifier& mod,
                                const Vec2& d_mean, const Mat2& d_cov_eff) {
  ProjectionGrad out;
  const Vec3 p = cam.to_camera(s.mu);
  const double z = p.z();
  const double iz = 1.0 / z;
  const double iz2 = iz * iz;
  const Eigen::Matrix<double, 2, 3> J = projection_jacobian(cam, p);
  const Eigen::Matrix<double, 2, 3> T = J * cam.R;
  const Mat3 sigma = covariance(s);
  const Mat2 cov2 = T * sigma * T.transpose();
  const double phi = mod.value(s.beta());

  const Mat2 g = 0.5 * phi * (d_cov_eff + d_cov_eff.transpose());
  out.b = mod.derivative(s.beta()) * d_cov_eff.cwiseProduct(cov2).sum();
  out.cov = T.transpose() * g * T;

  const Eigen::Matrix<double, 2, 3> dT = 2.0 * g * T * sigma;
  const Eigen::Matrix<double, 2, 3> dJ = dT * cam.R.transpose();

  Vec3 dp = Vec3::Zero();
  // Mean.
  dp.x() += d_mean.x() * cam.fx * iz;
  dp.y() += d_mean.y() * cam.fy * iz;
  dp.z() += -d_mean.x() * cam.fx * p.x() * iz2 - d_mean.y() * cam.fy * p.y() * iz2;
  // Jacobian entries.
  dp.x() += dJ(0, 2) * (-cam.fx * iz2);
  dp.y() += dJ(1, 2) * (-cam.fy * iz2);
  dp.z() += dJ(0, 0) * (-cam.fx * iz2) + dJ(0, 2) * (2.0 * cam.fx * p.x() * iz2 * iz) +
            dJ(1, 1) * (-cam.fy * iz2) + dJ(1, 2) * (2.0 * cam.fy * p.y() * iz2 * iz);
  out.mu = cam.R.transpose() * dp;
  return out;
}

std::vector<DepthEntry> sort_by_depth(std::vector<DepthEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const DepthEntry& a, const DepthEntry& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.key < b.key;
  });
  return entries;
}

FrameSplats prepare_frame(const Scene3& scene, const Camera& cam, const shape::ShapeModifier& mod) {
  cam.validate();
  FrameSplats frame;
  std::vector<DepthEntry> entries;
  std::vector<Projected> proj(scene.size());
  for (std::size_t k = 0; k < scene.size(); ++k) {
    auto pr = project_splat(scene.splats[k], cam, mod);
    if (!pr) {
      ++frame.culled;
      continue;
    }
    proj[k] = *pr;
    entries.push_back({pr->depth, scene.splats[k].depth_key, static_cast<int>(k)});
  }
  for (const DepthEntry& e : sort_by_depth(std::move(entries))) {
    const Splat3& s = scene.splats[e.index];
    frame.screen.push_back({proj[e.index].mean, proj[e.index].cov_eff, s.opacity(), s.color});
    frame.order.push_back(e.index);
  }
  return frame;
}

Image render(const Scene3& scene, const Camera& cam, const RenderConfig& cfg, RenderDiagnostics* diag,
             RenderTrace* trace) {
  const FrameSplats frame = prepare_frame(scene, cam, cfg.mod);
  return render_screen(frame.screen, scene.background, cfg, diag, trace);
}

BackwardResult3 render_backward(const Scene3& scene, const Camera& cam, const RenderConfig& cfg,
                                const Image& dL_dimage, const RenderTrace* trace) {
  const FrameSplats frame = prepare_frame(scene, cam, cfg.mod);
  const auto sg = render_screen_backward(frame.screen, scene.background, cfg, dL_dimage, trace);
  BackwardResult3 out;
  out.grads.assign(scene.size(), ParamArray<Splat3>{});
  out.screen_mean_grads.assign(scene.size(), Vec2::Zero());
  out.visible.assign(scene.size(), false);
  for (std::size_t m = 0; m < frame.order.size(); ++m) {
    const int k = frame.order[m];
    const Splat3& s = scene.splats[k];
    const ScreenGrad& g = sg[m];
    const ProjectionGrad pg = project_backward(s, cam, cfg.mod, g.mean, g.cov);
    Vec4 d_quat;
    Vec3 d_log_scale;
    covariance_backward(s, pg.cov, d_quat, d_log_scale);
    const double kappa = frame.screen[m].opacity;
    Splat3 d;
    d.mu = pg.mu;
    d.log_scale = d_log_scale;
    d.quat = d_quat;
    d.opacity_logit = g.opacity * kappa * (1.0 - kappa);
    d.color = g.color;
    d.b = pg.b;
    out.grads[k] = pack(d);
    out.screen_mean_grads[k] = g.mean;
    out.visible[k] = true;
  }
  return out;
}

}  // namespace ges
