#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ges/shape.hpp"

/// Splat primitives shared by the 2D and 3D paths.
///
/// Scales are stored as logs, opacity as a logit and the shape as the offset
/// b = beta - 2, so b = 0 is a plain Gaussian splat.

namespace ges {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct Splat2 {
  static constexpr int kDim = 2;

  Vec2 mu = Vec2::Zero();
  Vec2 log_scale = Vec2::Zero();
  double theta = 0.0;
  double opacity_logit = 0.0;
  Vec3 color = Vec3::Zero();
  double b = 0.0;
  std::uint64_t depth_key = 0;

  double beta() const { return b + 2.0; }
  double opacity() const;
};

struct Splat3 {
  static constexpr int kDim = 3;

  Vec3 mu = Vec3::Zero();
  Vec3 log_scale = Vec3::Zero();
  /// (w, x, y, z); normalized before use.
  Vec4 quat{1.0, 0.0, 0.0, 0.0};
  double opacity_logit = 0.0;
  Vec3 color = Vec3::Zero();
  double b = 0.0;
  std::uint64_t depth_key = 0;

  double beta() const { return b + 2.0; }
  double opacity() const;
};

enum class ParamGroup { kPosition = 0, kScale, kRotation, kOpacity, kColor, kShape };
inline constexpr int kParamGroupCount = 6;

/// Flat parameter layout: position, log-scale, rotation, opacity logit, color, b.
template <class S>
struct SplatLayout;

template <>
struct SplatLayout<Splat2> {
  static constexpr int kCount = 10;
  static constexpr std::array<int, kParamGroupCount + 1> kOffsets{0, 2, 4, 5, 6, 9, 10};
};

template <>
struct SplatLayout<Splat3> {
  static constexpr int kCount = 15;
  static constexpr std::array<int, kParamGroupCount + 1> kOffsets{0, 3, 6, 10, 11, 14, 15};
};

template <class S>
using ParamArray = std::array<double, SplatLayout<S>::kCount>;

template <class S>
constexpr ParamGroup param_group_of(int index) {
  for (int g = 0; g < kParamGroupCount; ++g) {
    if (index < SplatLayout<S>::kOffsets[g + 1]) return static_cast<ParamGroup>(g);
  }
  return ParamGroup::kShape;
}

ParamArray<Splat2> pack(const Splat2& s);
ParamArray<Splat3> pack(const Splat3& s);
void unpack(const ParamArray<Splat2>& p, Splat2& s);
void unpack(const ParamArray<Splat3>& p, Splat3& s);

Mat2 rotation_matrix(double theta);
/// Rotation of the normalized quaternion (w, x, y, z).
Mat3 rotation_matrix(const Vec4& quat);

/// Sigma = R diag(exp(2 log_scale)) R^T.
Mat2 covariance(const Splat2& s);
Mat3 covariance(const Splat3& s);

/// phi(beta) * Sigma: the modifier scales variances, so standard deviations
/// scale by sqrt(phi).
Mat2 effective_covariance(const Splat2& s, const shape::ShapeModifier& mod);
Mat3 effective_covariance(const Splat3& s, const shape::ShapeModifier& mod);

/// Pulls dL/dSigma back to the rotation and log-scale parameters.
/// dL_dsigma is treated as symmetric.
void covariance_backward(const Splat2& s, const Mat2& dL_dsigma, double& d_theta, Vec2& d_log_scale);
void covariance_backward(const Splat3& s, const Mat3& dL_dsigma, Vec4& d_quat, Vec3& d_log_scale);

/// Ordered splat collection. In 2D the list order is the compositing order.
template <class S>
struct Scene {
  std::vector<S> splats;
  Vec3 background = Vec3::Zero();
  std::uint64_t next_key = 0;

  static constexpr int kDim = S::kDim;

  std::size_t size() const { return splats.size(); }
  bool empty() const { return splats.empty(); }

  /// Appends a splat and assigns it a fresh depth key.
  S& add(S s) {
    s.depth_key = next_key++;
    splats.push_back(std::move(s));
    return splats.back();
  }

  /// Throws std::invalid_argument on duplicate depth keys.
  void validate() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(splats.size());
    for (const S& s : splats) keys.push_back(s.depth_key);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
      throw std::invalid_argument("Scene: duplicate depth keys");
    }
  }
};

using Scene2 = Scene<Splat2>;
using Scene3 = Scene<Splat3>;

}  // namespace ges
