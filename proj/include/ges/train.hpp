#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ges/freqloss.hpp"
#include "ges/image.hpp"
#include "ges/project.hpp"
#include "ges/raster.hpp"
#include "ges/shape.hpp"
#include "ges/splat.hpp"

/// Optimization loop for 2D images and multi-view 3D scenes: per-group Adam,
/// position learning-rate decay, densification, opacity and shape resets and
/// pruning.

namespace ges::train {

struct TrainConfig {
  std::int64_t iterations = 40000;

  double lr_pos_init = 1.6e-4;
  double lr_pos_final = 1.6e-6;
  double lr_delay_mult = 0.01;
  std::int64_t lr_delay_steps = 0;
  std::int64_t lr_pos_max_steps = 30000;
  double lr_feature = 2.5e-3;
  double lr_opacity = 0.05;
  double lr_shape = 1.5e-3;
  double lr_rotation = 1e-3;
  double lr_scaling = 5e-3;

  double percent_dense = 0.01;
  double densify_grad_threshold = 3e-4;
  std::int64_t densify_from = 500;
  std::int64_t densify_until = 15000;
  std::int64_t densify_interval = 100;
  std::int64_t opacity_reset_interval = 3000;
  std::int64_t shape_reset_interval = 1000;
  std::int64_t shape_prune_interval = 100;
  double opacity_prune_threshold = 0.005;
  double shape_prune_threshold = 0.5;
  double opacity_reset_value = 0.01;

  double rho = 0.1;
  shape::ModifierMode modifier_mode = shape::ModifierMode::kApproximate;
  /// When false b never moves (fixed-shape Gaussian runs).
  bool learn_shape = true;
  bool densify = true;
  bool shape_prune = true;
  bool shape_reset = true;

  double lambda_ssim = 0.2;
  double lambda_omega = 0.5;
  double epsilon_omega = 0.5;
  double mask_downsample = 0.2;

  double alpha_clip = 0.99;
  double cutoff = 3.0;
  double adam_eps = 1e-15;
  std::int64_t log_interval = 100;
  std::uint64_t seed = 0;
  int threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  shape::ShapeModifier modifier() const { return {rho, modifier_mode}; }
  freq::LossWeights weights() const { return {lambda_ssim, lambda_omega}; }
  freq::FreqMaskConfig mask_config() const { return {epsilon_omega, mask_downsample}; }
  RenderConfig render_config(int width, int height) const;

  /// Same schedule with every shape-related feature off: rho = 0, no
  /// frequency loss, b frozen, no shape reset or prune.
  TrainConfig gaussian_baseline() const;
};

/// Calls f(name, field) for every config field, in a fixed order.
template <class C, class F>
void visit_fields(C& c, F&& f) {
  f("iterations", c.iterations);
  f("lr_pos_init", c.lr_pos_init);
  f("lr_pos_final", c.lr_pos_final);
  f("lr_delay_mult", c.lr_delay_mult);
  f("lr_delay_steps", c.lr_delay_steps);
  f("lr_pos_max_steps", c.lr_pos_max_steps);
  f("lr_feature", c.lr_feature);
  f("lr_opacity", c.lr_opacity);
  f("lr_shape", c.lr_shape);
  f("lr_rotation", c.lr_rotation);
  f("lr_scaling", c.lr_scaling);
  f("percent_dense", c.percent_dense);
  f("densify_grad_threshold", c.densify_grad_threshold);
  f("densify_from", c.densify_from);
  f("densify_until", c.densify_until);
  f("densify_interval", c.densify_interval);
  f("opacity_reset_interval", c.opacity_reset_interval);
  f("shape_reset_interval", c.shape_reset_interval);
  f("shape_prune_interval", c.shape_prune_interval);
  f("opacity_prune_threshold", c.opacity_prune_threshold);
  f("shape_prune_threshold", c.shape_prune_threshold);
  f("opacity_reset_value", c.opacity_reset_value);
  f("rho", c.rho);
  f("modifier_mode", c.modifier_mode);
  f("learn_shape", c.learn_shape);
  f("densify", c.densify);
  f("shape_prune", c.shape_prune);
  f("shape_reset", c.shape_reset);
  f("lambda_ssim", c.lambda_ssim);
  f("lambda_omega", c.lambda_omega);
  f("epsilon_omega", c.epsilon_omega);
  f("mask_downsample", c.mask_downsample);
  f("alpha_clip", c.alpha_clip);
  f("cutoff", c.cutoff);
  f("adam_eps", c.adam_eps);
  f("log_interval", c.log_interval);
  f("seed", c.seed);
  f("threads", c.threads);
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `key = value` lines to `base`. '#' starts a comment. Unknown keys,
/// repeated keys and unparsable values throw ConfigError with the line number.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});

/// Sets one field by name; throws ConfigError for unknown keys or bad values.
void set_field(TrainConfig& cfg, std::string_view key, std::string_view value);

/// (name, value) pairs for every field, values formatted to round-trip.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg);

/// iter / total.
double omega_schedule(std::int64_t iter, std::int64_t total);

/// Log-linear decay from lr_pos_init to lr_pos_final over lr_pos_max_steps,
/// with the sine warmup from lr_delay_mult when lr_delay_steps > 0.
double position_lr(const TrainConfig& cfg, std::int64_t step);

struct MetricsRow {
  std::int64_t iter = 0;
  double loss = 0.0;
  double l1 = 0.0;
  double ssim = 0.0;
  double freq = 0.0;
  double psnr = 0.0;
  std::size_t n_splats = 0;
  double omega = 0.0;
};

struct TrainStats {
  std::size_t peak_splats = 0;
  std::size_t clones = 0;
  std::size_t splits = 0;
  std::size_t opacity_pruned = 0;
  std::size_t shape_pruned = 0;
  std::size_t opacity_resets = 0;
  std::size_t shape_resets = 0;
  std::size_t densify_events = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct TrainResult {
  Scene<S> scene;
  std::vector<MetricsRow> history;
  TrainStats stats;
};

using TrainResult2 = TrainResult<Splat2>;
using TrainResult3 = TrainResult<Splat3>;

struct View {
  Camera camera;
  Image image;
};

/// Fits a 2D scene to one image. Splat positions are in pixel units.
TrainResult2 train_2d(Scene2 init, const Image& target, const TrainConfig& cfg);

/// Fits a 3D scene to views visited round-robin in the given order.
TrainResult3 train_3d(Scene3 init, std::span<const View> views, const TrainConfig& cfg);

/// Spatial extent used to scale the position learning rate and the clone /
/// split size test: 1.1 times the largest camera distance from their centroid.
double camera_extent(std::span<const View> views);

// Interval hooks, exposed for testing.

struct DensifyStats {
  /// Accumulated screen-mean gradient norms and visible-iteration counts.
  std::vector<double> grad_accum;
  std::vector<double> denom;
  /// Accumulated positional gradient (unused trailing components are 0),
  /// giving the direction clones are moved along.
  std::vector<Vec3> pos_grad_accum;

  void resize(std::size_t n);
  void clear();
};

struct DensifyOutcome {
  std::size_t clones = 0;
  std::size_t splits = 0;
  /// For every splat in the new scene, its index in the old scene when it is
  /// an untouched survivor, or -1 for a new child.
  std::vector<long> source;
};

/// Clone small splats and split large ones whose mean gradient exceeds the
/// threshold. Children land next to their parent and take fresh depth keys.
template <class S>
DensifyOutcome densify(Scene<S>& scene, const DensifyStats& stats, const TrainConfig& cfg, double extent,
                       double pos_lr, std::uint64_t rng_seed);

/// Sets every b to 0.
template <class S>
void shape_reset(Scene<S>& scene);

/// Removes splats with modifier value below the threshold, preserving order.
/// Returns the kept old indices.
template <class S>
std::vector<long> shape_prune(Scene<S>& scene, const TrainConfig& cfg);

/// Removes splats with opacity below the threshold. Returns kept old indices.
template <class S>
std::vector<long> opacity_prune(Scene<S>& scene, double threshold);

/// Lowers opacities to at most `value`.
template <class S>
void opacity_reset(Scene<S>& scene, double value);

}  // namespace ges::train
