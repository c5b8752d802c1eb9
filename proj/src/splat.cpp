#include "ges/splat.hpp"

#include <cmath>

#include "ges/special.hpp"

namespace ges {

double Splat2::opacity() const { return special::sigmoid(opacity_logit); }
double Splat3::opacity() const { return special::sigmoid(opacity_logit); }

ParamArray<Splat2> pack(const Splat2& s) {
  return {s.mu.x(), s.mu.y(), s.log_scale.x(), s.log_scale.y(), s.theta, s.opacity_logit,
          s.color.x(), s.color.y(), s.color.z(), s.b};
}

ParamArray<Splat3> pack(const Splat3& s) {
  return {s.mu.x(),    s.mu.y(),    s.mu.z(),    s.log_scale.x(), s.log_scale.y(),
          s.log_scale.z(), s.quat[0], s.quat[1], s.quat[2],      s.quat[3],
          s.opacity_logit, s.color.x(), s.color.y(), s.color.z(), s.b};
}

void unpack(const ParamArray<Splat2>& p, Splat2& s) {
  s.mu = {p[0], p[1]};
  s.log_scale = {p[2], p[3]};
  s.theta = p[4];
  s.opacity_logit = p[5];
  s.color = {p[6], p[7], p[8]};
  s.b = p[9];
}

void unpack(const ParamArray<Splat3>& p, Splat3& s) {
  s.mu = {p[0], p[1], p[2]};
  s.log_scale = {p[3], p[4], p[5]};
  s.quat = {p[6], p[7], p[8], p[9]};
  s.opacity_logit = p[10];
  s.color = {p[11], p[12], p[13]};
  s.b = p[14];
}

Mat2 rotation_matrix(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

namespace {

Vec4 normalized_quat(const Vec4& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("quaternion must be finite and non-zero");
  return q / n;
}

Mat3 rotation_unit(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace

Mat3 rotation_matrix(const Vec4& quat) { return rotation_unit(normalized_quat(quat)); }

Mat2 covariance(const Splat2& s) {
  const Mat2 r = rotation_matrix(s.theta);
  const Vec2 var = (2.0 * s.log_scale).array().exp();
  return r * var.asDiagonal() * r.transpose();
}

Mat3 covariance(const Splat3& s) {
  const Mat3 r = rotation_matrix(s.quat);
  const Vec3 var = (2.0 * s.log_scale).array().exp();
  return r * var.asDiagonal() * r.transpose();
}

Mat2 effective_covariance(const Splat2& s, const shape::ShapeModifier& mod) {
  return mod.value(s.beta()) * covariance(s);
}

Mat3 effective_covariance(const Splat3& s, const shape::ShapeModifier& mod) {
  return mod.value(s.beta()) * covariance(s);
}

void covariance_backward(const Splat2& s, const Mat2& dL_dsigma, double& d_theta, Vec2& d_log_scale) {
  const Mat2 g = 0.5 * (dL_dsigma + dL_dsigma.transpose());
  const Mat2 r = rotation_matrix(s.theta);
  Mat2 dr;
  dr << -std::sin(s.theta), -std::cos(s.theta), std::cos(s.theta), -std::sin(s.theta);
  const Vec2 var = (2.0 * s.log_scale).array().exp();
  const Mat2 d = var.asDiagonal();
  d_theta = 2.0 * (g.cwiseProduct(dr * d * r.transpose())).sum();
  const Mat2 rgr = r.transpose() * g * r;
  d_log_scale = {2.0 * var.x() * rgr(0, 0), 2.0 * var.y() * rgr(1, 1)};
}

void covariance_backward(const Splat3& s, const Mat3& dL_dsigma, Vec4& d_quat, Vec3& d_log_scale) {
  const Mat3 g = 0.5 * (dL_dsigma + dL_dsigma.transpose());
  const double qn = s.quat.norm();
  const Vec4 q = normalized_quat(s.quat);
  const Mat3 r = rotation_unit(q);
  const Vec3 sc = s.log_scale.array().exp();
  const Mat3 m = r * sc.asDiagonal();
  // Sigma = M M^T.
  const Mat3 dm = 2.0 * g * m;
  const Mat3 dr = dm * sc.asDiagonal();
  const Mat3 rdm = r.transpose() * dm;
  for (int k = 0; k < 3; ++k) d_log_scale[k] = rdm(k, k) * sc[k];

  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Vec4 dq;
  dq[0] = 2 * (-z * dr(0, 1) + y * dr(0, 2) + z * dr(1, 0) - x * dr(1, 2) - y * dr(2, 0) + x * dr(2, 1));
  dq[1] = 2 * (y * dr(0, 1) + z * dr(0, 2) + y * dr(1, 0) - 2 * x * dr(1, 1) - w * dr(1, 2) +
               z * dr(2, 0) + w * dr(2, 1) - 2 * x * dr(2, 2));
  dq[2] = 2 * (-2 * y * dr(0, 0) + x * dr(0, 1) + w * dr(0, 2) + x * dr(1, 0) + z * dr(1, 2) -
               w * dr(2, 0) + z * dr(2, 1) - 2 * y * dr(2, 2));
  dq[3] = 2 * (-2 * z * dr(0, 0) - w * dr(0, 1) + x * dr(0, 2) + w * dr(1, 0) - 2 * z * dr(1, 1) +
               y * dr(1, 2) + x * dr(2, 0) + y * dr(2, 1));
  // Through q / |q|.
  d_quat = (dq - q * q.dot(dq)) / qn;
}

}  // namespace ges
