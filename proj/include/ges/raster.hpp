#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ges/image.hpp"
#include "ges/shape.hpp"
#include "ges/splat.hpp"

/// Front-to-back alpha compositing of screen-space splats with an analytic
/// backward pass.
///
/// Pixel (row i, column j) samples the continuous point (j + 0.5, i + 0.5).
/// Splats composite in the order given; in 2D that is the scene list order.

namespace ges {

struct RenderConfig {
  int width = 0;
  int height = 0;
  double alpha_clip = 0.99;
  /// Mahalanobis radius under the effective covariance.
  double cutoff = 3.0;
  shape::ShapeModifier mod{};
  int threads = 1;

  void validate() const;
};

/// A splat after projection: mean in pixel space and effective covariance.
struct ScreenSplat {
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Identity();
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
};

struct ScreenGrad {
  Vec2 mean = Vec2::Zero();
  /// Symmetric gradient with respect to the effective covariance.
  Mat2 cov = Mat2::Zero();
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
};

struct RenderDiagnostics {
  /// Splats skipped because the covariance was singular or too badly conditioned.
  int skipped_singular = 0;
};

/// Condition number above which a covariance is treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// Per-pixel compositing record of a forward pass. Handing it to the
/// backward pass skips a second walk over every pixel; the splats and config
/// must be the ones the forward pass saw. Results are identical either way.
struct RenderTrace {
  struct Entry {
    int index;
    bool clamped;
    double alpha;
    double g;
    double dx;
    double dy;
    double transmittance;  // before this splat composites
  };
  int width = 0;
  int height = 0;
  std::size_t splat_count = 0;
  /// Entries of image row i; pixel j owns [starts[i][j], starts[i][j + 1]).
  std::vector<std::vector<Entry>> rows;
  std::vector<std::vector<std::uint32_t>> starts;
  std::vector<double> final_transmittance;
};

Image render_screen(std::span<const ScreenSplat> splats, const Vec3& background,
                    const RenderConfig& cfg, RenderDiagnostics* diag = nullptr, RenderTrace* trace = nullptr);

/// Gradients of sum(dL_dimage * image) for each screen splat.
std::vector<ScreenGrad> render_screen_backward(std::span<const ScreenSplat> splats,
                                               const Vec3& background, const RenderConfig& cfg,
                                               const Image& dL_dimage, const RenderTrace* trace = nullptr);

/// True when the cutoff ellipse's bounding box covers at least one pixel
/// center and the covariance is usable.
bool footprint_visible(const ScreenSplat& s, const RenderConfig& cfg);

/// Screen splats for a 2D scene, covariance already scaled by the modifier.
std::vector<ScreenSplat> to_screen(const Scene2& scene, const shape::ShapeModifier& mod);

Image render(const Scene2& scene, const RenderConfig& cfg, RenderDiagnostics* diag = nullptr,
             RenderTrace* trace = nullptr);

struct BackwardResult2 {
  std::vector<ParamArray<Splat2>> grads;
  /// Per-splat gradient with respect to the screen mean, for densification.
  std::vector<Vec2> screen_mean_grads;
};

BackwardResult2 render_backward(const Scene2& scene, const RenderConfig& cfg, const Image& dL_dimage,
                                const RenderTrace* trace = nullptr);

}  // namespace ges
