#include "ges/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ges/adam.hpp"
#include "ges/format.hpp"
#include "ges/special.hpp"

namespace ges::train {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_value(std::string_view text, double& out) {
  // from_chars for double rejects a leading '+'; accept it for convenience.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  return parse_number(text, out);
}
bool parse_value(std::string_view text, std::int64_t& out) { return parse_number(text, out); }
bool parse_value(std::string_view text, std::uint64_t& out) { return parse_number(text, out); }
bool parse_value(std::string_view text, int& out) { return parse_number(text, out); }
bool parse_value(std::string_view text, bool& out) {
  if (text == "true" || text == "1") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0") {
    out = false;
    return true;
  }
  return false;
}
bool parse_value(std::string_view text, shape::ModifierMode& out) {
  try {
    out = shape::modifier_mode_from_string(text);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::string show(double v) { return format_double(v); }
std::string show(std::int64_t v) { return std::to_string(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(int v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(shape::ModifierMode v) { return std::string(shape::to_string(v)); }

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string("TrainConfig: ") + field + " " + rule);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void TrainConfig::validate() const {
  require(iterations >= 1, "iterations", "must be >= 1");
  for (auto [v, name] : {std::pair{lr_pos_init, "lr_pos_init"}, {lr_pos_final, "lr_pos_final"},
                         {lr_feature, "lr_feature"}, {lr_opacity, "lr_opacity"}, {lr_shape, "lr_shape"},
                         {lr_rotation, "lr_rotation"}, {lr_scaling, "lr_scaling"}}) {
    require(v >= 0.0 && std::isfinite(v), name, "must be a finite value >= 0");
  }
  require(lr_delay_mult > 0.0 && lr_delay_mult <= 1.0, "lr_delay_mult", "must be in (0, 1]");
  require(lr_delay_steps >= 0, "lr_delay_steps", "must be >= 0");
  require(lr_pos_max_steps >= 1, "lr_pos_max_steps", "must be >= 1");
  require(percent_dense > 0.0, "percent_dense", "must be positive");
  require(densify_grad_threshold >= 0.0, "densify_grad_threshold", "must be >= 0");
  require(densify_from >= 0, "densify_from", "must be >= 0");
  require(densify_until >= densify_from, "densify_until", "must be >= densify_from");
  require(densify_interval >= 1, "densify_interval", "must be >= 1");
  require(opacity_reset_interval >= 1, "opacity_reset_interval", "must be >= 1");
  require(shape_reset_interval >= 1, "shape_reset_interval", "must be >= 1");
  require(shape_prune_interval >= 1, "shape_prune_interval", "must be >= 1");
  require(log_interval >= 1, "log_interval", "must be >= 1");
  require(opacity_prune_threshold >= 0.0 && opacity_prune_threshold < 1.0, "opacity_prune_threshold", "must be in [0, 1)");
  require(shape_prune_threshold >= 0.0 && shape_prune_threshold < 2.0, "shape_prune_threshold", "must be in [0, 2)");
  require(opacity_reset_value > 0.0 && opacity_reset_value < 1.0, "opacity_reset_value", "must be in (0, 1)");
  require(rho >= 0.0 && std::isfinite(rho), "rho", "must be a finite value >= 0");
  require(lambda_ssim >= 0.0 && lambda_omega >= 0.0 && lambda_ssim + lambda_omega <= 1.0, "lambda_ssim/lambda_omega",
          "must be >= 0 with sum <= 1");
  require(epsilon_omega >= 0.0 && epsilon_omega <= 1.0, "epsilon_omega", "must be in [0, 1]");
  require(mask_downsample > 0.0 && mask_downsample <= 1.0, "mask_downsample", "must be in (0, 1]");
  require(alpha_clip > 0.0 && alpha_clip < 1.0, "alpha_clip", "must be in (0, 1)");
  require(cutoff > 0.0, "cutoff", "must be positive");
  require(adam_eps > 0.0, "adam_eps", "must be positive");
  require(threads >= 1, "threads", "must be >= 1");
}

RenderConfig TrainConfig::render_config(int width, int height) const {
  RenderConfig r;
  r.width = width;
  r.height = height;
  r.alpha_clip = alpha_clip;
  r.cutoff = cutoff;
  r.mod = modifier();
  r.threads = threads;
  return r;
}

TrainConfig TrainConfig::gaussian_baseline() const {
  TrainConfig c = *this;
  c.rho = 0.0;
  c.lambda_omega = 0.0;
  c.learn_shape = false;
  c.shape_reset = false;
  c.shape_prune = false;
  return c;
}

void set_field(TrainConfig& cfg, std::string_view key, std::string_view value) {
  bool found = false;
  visit_fields(cfg, [&](std::string_view name, auto& field) {
    if (name != key) return;
    found = true;
    if (!parse_value(value, field)) {
      throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
    }
  });
  if (!found) throw ConfigError("unknown config key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig cfg) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + std::string(key) + "'");
    }
    try {
      set_field(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  visit_fields(cfg, [&](std::string_view name, const auto& field) { out.emplace_back(std::string(name), show(field)); });
  return out;
}

double omega_schedule(std::int64_t iter, std::int64_t total) {
  if (total <= 0 || iter < 0 || iter > total) throw std::invalid_argument("omega_schedule: need 0 <= iter <= total");
  return static_cast<double>(iter) / static_cast<double>(total);
}

double position_lr(const TrainConfig& cfg, std::int64_t step) {
  if (step < 0 || (cfg.lr_pos_init == 0.0 && cfg.lr_pos_final == 0.0)) return 0.0;
  double delay = 1.0;
  if (cfg.lr_delay_steps > 0) {
    const double u = std::clamp(static_cast<double>(step) / cfg.lr_delay_steps, 0.0, 1.0);
    delay = cfg.lr_delay_mult + (1.0 - cfg.lr_delay_mult) * std::sin(0.5 * std::numbers::pi * u);
  }
  const double t = std::clamp(static_cast<double>(step) / cfg.lr_pos_max_steps, 0.0, 1.0);
  return delay * std::exp(std::log(cfg.lr_pos_init) * (1.0 - t) + std::log(cfg.lr_pos_final) * t);
}

double camera_extent(std::span<const View> views) {
  if (views.empty()) throw std::invalid_argument("camera_extent: no views");
  std::vector<Vec3> centers;
  Vec3 mean = Vec3::Zero();
  for (const View& v : views) {
    centers.push_back(-v.camera.R.transpose() * v.camera.t);
    mean += centers.back();
  }
  mean /= static_cast<double>(centers.size());
  double diag = 0.0;
  for (const Vec3& c : centers) diag = std::max(diag, (c - mean).norm());
  // A single camera (or coincident ones) still needs a usable scale.
  if (diag == 0.0) diag = 1.0;
  return 1.1 * diag;
}

void DensifyStats::resize(std::size_t n) {
  grad_accum.assign(n, 0.0);
  denom.assign(n, 0.0);
  pos_grad_accum.assign(n, Vec3::Zero());
}

void DensifyStats::clear() { resize(grad_accum.size()); }

namespace {

Vec3 position_of(const Splat2& s) { return {s.mu.x(), s.mu.y(), 0.0}; }
Vec3 position_of(const Splat3& s) { return s.mu; }
void set_position(Splat2& s, const Vec3& p) { s.mu = p.head<2>(); }
void set_position(Splat3& s, const Vec3& p) { s.mu = p; }

Vec3 axis_offset(const Splat2& s, double std_scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  const double z0 = n01(rng);
  const double z1 = n01(rng);
  const Vec2 sc = s.log_scale.array().exp() * std_scale;
  const Vec2 off = rotation_matrix(s.theta) * Vec2(sc.x() * z0, sc.y() * z1);
  return {off.x(), off.y(), 0.0};
}

Vec3 axis_offset(const Splat3& s, double std_scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vec3 z;
  for (int k = 0; k < 3; ++k) z[k] = n01(rng);
  const Vec3 sc = s.log_scale.array().exp() * std_scale;
  return rotation_matrix(s.quat) * sc.cwiseProduct(z);
}

template <class T>
void remap(std::vector<T>& v, const std::vector<long>& source, const T& fresh) {
  std::vector<T> out;
  out.reserve(source.size());
  for (long s : source) out.push_back(s >= 0 ? v[static_cast<std::size_t>(s)] : fresh);
  v = std::move(out);
}

template <class S>
std::vector<long> keep_if(Scene<S>& scene, auto&& keep) {
  std::vector<long> kept;
  std::vector<S> out;
  for (std::size_t k = 0; k < scene.size(); ++k) {
    if (keep(scene.splats[k])) {
      kept.push_back(static_cast<long>(k));
      out.push_back(scene.splats[k]);
    }
  }
  scene.splats = std::move(out);
  return kept;
}

}  // namespace

template <class S>
DensifyOutcome densify(Scene<S>& scene, const DensifyStats& stats, const TrainConfig& cfg, double extent,
                       double pos_lr, std::uint64_t rng_seed) {
  const std::size_t n = scene.size();
  if (stats.grad_accum.size() != n || stats.denom.size() != n || stats.pos_grad_accum.size() != n) {
    throw std::invalid_argument("densify: statistics do not match the scene");
  }
  std::mt19937_64 rng(rng_seed);
  const shape::ShapeModifier mod = cfg.modifier();
  const double size_limit = cfg.percent_dense * extent;
  const double split_shrink = std::log(1.6);
  DensifyOutcome out;
  std::vector<S> next;
  next.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const S& parent = scene.splats[k];
    const double avg = stats.denom[k] > 0.0 ? stats.grad_accum[k] / stats.denom[k] : 0.0;
    if (!(avg >= cfg.densify_grad_threshold) || avg == 0.0) {
      next.push_back(parent);
      out.source.push_back(static_cast<long>(k));
      continue;
    }
    const double max_scale = parent.log_scale.array().exp().maxCoeff();
    if (max_scale <= size_limit) {
      // Clone: keep the parent, add a copy moved one nominal step against
      // the accumulated positional gradient.
      next.push_back(parent);
      out.source.push_back(static_cast<long>(k));
      S child = parent;
      const Vec3 g = stats.pos_grad_accum[k];
      if (g.norm() > 0.0) set_position(child, position_of(parent) - pos_lr * g.normalized());
      child.depth_key = scene.next_key++;
      next.push_back(child);
      out.source.push_back(-1);
      ++out.clones;
    } else {
      const double std_scale = std::sqrt(mod.value(parent.beta()));
      for (int c = 0; c < 2; ++c) {
        S child = parent;
        set_position(child, position_of(parent) + axis_offset(parent, std_scale, rng));
        child.log_scale = parent.log_scale.array() - split_shrink;
        child.depth_key = scene.next_key++;
        next.push_back(child);
        out.source.push_back(-1);
      }
      ++out.splits;
    }
  }
  scene.splats = std::move(next);
  return out;
}

template <class S>
void shape_reset(Scene<S>& scene) {
  for (S& s : scene.splats) s.b = 0.0;
}

template <class S>
std::vector<long> shape_prune(Scene<S>& scene, const TrainConfig& cfg) {
  const shape::ShapeModifier mod = cfg.modifier();
  return keep_if(scene, [&](const S& s) { return !(mod.value(s.beta()) < cfg.shape_prune_threshold); });
}

template <class S>
std::vector<long> opacity_prune(Scene<S>& scene, double threshold) {
  return keep_if(scene, [&](const S& s) { return !(s.opacity() < threshold); });
}

template <class S>
void opacity_reset(Scene<S>& scene, double value) {
  const double cap = special::logit(value);
  for (S& s : scene.splats) s.opacity_logit = std::min(s.opacity_logit, cap);
}

template DensifyOutcome densify(Scene2&, const DensifyStats&, const TrainConfig&, double, double, std::uint64_t);
template DensifyOutcome densify(Scene3&, const DensifyStats&, const TrainConfig&, double, double, std::uint64_t);
template void shape_reset(Scene2&);
template void shape_reset(Scene3&);
template std::vector<long> shape_prune(Scene2&, const TrainConfig&);
template std::vector<long> shape_prune(Scene3&, const TrainConfig&);
template std::vector<long> opacity_prune(Scene2&, double);
template std::vector<long> opacity_prune(Scene3&, double);
template void opacity_reset(Scene2&, double);
template void opacity_reset(Scene3&, double);

namespace {

// Renders one view and returns per-splat gradients given dL/dimage.
class Backend2 {
 public:
  Backend2(const Image& target, const TrainConfig& cfg)
      : target_(target), rcfg_(cfg.render_config(target.width, target.height)) {}

  double extent() const { return std::max(target_.width, target_.height); }
  std::size_t view_count() const { return 1; }
  const Image& target(std::size_t) const { return target_; }

  Image forward(const Scene2& scene, std::size_t) const { return render(scene, rcfg_, nullptr, &trace_); }

  void backward(const Scene2& scene, std::size_t, const Image& grad, std::vector<ParamArray<Splat2>>& grads,
                std::vector<Vec2>& screen, std::vector<bool>& visible) const {
    BackwardResult2 r = render_backward(scene, rcfg_, grad, &trace_);
    grads = std::move(r.grads);
    screen = std::move(r.screen_mean_grads);
    const auto ss = to_screen(scene, rcfg_.mod);
    visible.resize(scene.size());
    for (std::size_t k = 0; k < scene.size(); ++k) visible[k] = footprint_visible(ss[k], rcfg_);
  }

 private:
  const Image& target_;
  RenderConfig rcfg_;
  // Filled by forward() and consumed by the backward() that follows it.
  mutable RenderTrace trace_;
};

class Backend3 {
 public:
  Backend3(std::span<const View> views, const TrainConfig& cfg) : views_(views), cfg_(cfg) {
    if (views.empty()) throw std::invalid_argument("train_3d: no views");
    extent_ = camera_extent(views);
  }

  double extent() const { return extent_; }
  std::size_t view_count() const { return views_.size(); }
  const Image& target(std::size_t v) const { return views_[v].image; }

  Image forward(const Scene3& scene, std::size_t v) const {
    return render(scene, views_[v].camera, rcfg(v), nullptr, &trace_);
  }

  void backward(const Scene3& scene, std::size_t v, const Image& grad, std::vector<ParamArray<Splat3>>& grads,
                std::vector<Vec2>& screen, std::vector<bool>& visible) const {
    const RenderConfig rc = rcfg(v);
    BackwardResult3 r = render_backward(scene, views_[v].camera, rc, grad, &trace_);
    grads = std::move(r.grads);
    screen = std::move(r.screen_mean_grads);
    visible.assign(scene.size(), false);
    const FrameSplats frame = prepare_frame(scene, views_[v].camera, rc.mod);
    for (std::size_t m = 0; m < frame.order.size(); ++m) {
      visible[frame.order[m]] = footprint_visible(frame.screen[m], rc);
    }
  }

 private:
  RenderConfig rcfg(std::size_t v) const {
    return cfg_.render_config(views_[v].image.width, views_[v].image.height);
  }

  std::span<const View> views_;
  const TrainConfig& cfg_;
  double extent_ = 1.0;
  mutable RenderTrace trace_;
};

template <class S>
void zero_group(std::vector<ParamArray<S>>& state, ParamGroup g) {
  const int lo = SplatLayout<S>::kOffsets[static_cast<int>(g)];
  const int hi = SplatLayout<S>::kOffsets[static_cast<int>(g) + 1];
  for (auto& p : state) {
    for (int i = lo; i < hi; ++i) p[i] = 0.0;
  }
}

template <class S, class Backend>
TrainResult<S> run(Scene<S> scene, const Backend& backend, const TrainConfig& cfg) {
  cfg.validate();
  if (scene.empty()) throw TrainingError("initial scene is empty");
  scene.validate();
  for (const S& s : scene.splats) scene.next_key = std::max(scene.next_key, s.depth_key + 1);
  for (std::size_t v = 0; v < backend.view_count(); ++v) {
    if (backend.target(v).channels != 3 || backend.target(v).size() == 0) {
      throw std::invalid_argument("training images must be non-empty RGB");
    }
  }

  using Params = ParamArray<S>;
  constexpr int kCount = SplatLayout<S>::kCount;
  const Params zero{};
  std::vector<Params> m(scene.size(), zero), v(scene.size(), zero);
  DensifyStats stats;
  stats.resize(scene.size());

  const freq::LossWeights weights = cfg.weights();
  const freq::FreqMaskConfig mcfg = cfg.mask_config();
  const double extent = backend.extent();
  AdamOptions aopt;
  aopt.eps = cfg.adam_eps;

  TrainResult<S> result;
  result.stats.peak_splats = scene.size();

  std::vector<Params> grads;
  std::vector<Vec2> screen;
  std::vector<bool> visible;
  std::array<double, kParamGroupCount> lr{};

  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    const std::int64_t step = it + 1;
    const double omega = omega_schedule(it, cfg.iterations);
    const std::size_t view = static_cast<std::size_t>(it) % backend.view_count();
    const Image& target = backend.target(view);

    const Image img = backend.forward(scene, view);
    const Image mask = freq::dog_mask(target, omega, mcfg);
    const freq::TotalLoss loss = freq::total_loss(img, target, omega, weights, mcfg, &mask);
    if (!std::isfinite(loss.total)) {
      throw TrainingError("non-finite loss at iteration " + std::to_string(step));
    }

    if (step % cfg.log_interval == 0 || step == cfg.iterations) {
      MetricsRow row;
      row.iter = step;
      row.loss = loss.total;
      row.l1 = loss.l1;
      row.ssim = loss.ssim;
      row.freq = loss.freq;
      row.psnr = psnr(img, target);
      row.n_splats = scene.size();
      row.omega = omega;
      result.history.push_back(row);
    }

    backend.backward(scene, view, loss.grad, grads, screen, visible);

    lr[static_cast<int>(ParamGroup::kPosition)] = position_lr(cfg, step) * extent;
    lr[static_cast<int>(ParamGroup::kScale)] = cfg.lr_scaling;
    lr[static_cast<int>(ParamGroup::kRotation)] = cfg.lr_rotation;
    lr[static_cast<int>(ParamGroup::kOpacity)] = cfg.lr_opacity;
    lr[static_cast<int>(ParamGroup::kColor)] = cfg.lr_feature;
    lr[static_cast<int>(ParamGroup::kShape)] = cfg.lr_shape;
    const int param_end = cfg.learn_shape ? kCount : SplatLayout<S>::kOffsets[static_cast<int>(ParamGroup::kShape)];
    const AdamBias bias = AdamBias::at(step, aopt);
    for (std::size_t k = 0; k < scene.size(); ++k) {
      Params p = pack(scene.splats[k]);
      for (int i = 0; i < param_end; ++i) {
        const double g = grads[k][i];
        if (!std::isfinite(g)) throw TrainingError("non-finite gradient at iteration " + std::to_string(step));
        adam_update(p[i], m[k][i], v[k][i], g, lr[static_cast<int>(param_group_of<S>(i))], bias, aopt);
      }
      S& s = scene.splats[k];
      const std::uint64_t key = s.depth_key;
      unpack(p, s);
      s.depth_key = key;
      s.color = s.color.cwiseMax(0.0).cwiseMin(1.0);
    }

    // Densification statistics in normalized device units.
    const double half_w = 0.5 * target.width;
    const double half_h = 0.5 * target.height;
    for (std::size_t k = 0; k < scene.size(); ++k) {
      if (!visible[k]) continue;
      stats.grad_accum[k] += Vec2(screen[k].x() * half_w, screen[k].y() * half_h).norm();
      stats.denom[k] += 1.0;
      Vec3 pg = Vec3::Zero();
      for (int d = 0; d < S::kDim; ++d) pg[d] = grads[k][d];
      stats.pos_grad_accum[k] += pg;
    }

    auto apply = [&](const std::vector<long>& source) {
      remap(m, source, zero);
      remap(v, source, zero);
      remap(stats.grad_accum, source, 0.0);
      remap(stats.denom, source, 0.0);
      remap(stats.pos_grad_accum, source, Vec3(Vec3::Zero()));
    };

    if (cfg.densify && step >= cfg.densify_from && step <= cfg.densify_until && step % cfg.densify_interval == 0) {
      const DensifyOutcome d = densify(scene, stats, cfg, extent, lr[0], mix_seed(cfg.seed, static_cast<std::uint64_t>(step)));
      apply(d.source);
      result.stats.clones += d.clones;
      result.stats.splits += d.splits;
      ++result.stats.densify_events;
      result.stats.peak_splats = std::max(result.stats.peak_splats, scene.size());
      const std::size_t before = scene.size();
      apply(opacity_prune(scene, cfg.opacity_prune_threshold));
      result.stats.opacity_pruned += before - scene.size();
      stats.clear();
    }
    // Resets only run while densification is still active.
    if (step < cfg.densify_until && step % cfg.opacity_reset_interval == 0) {
      opacity_reset(scene, cfg.opacity_reset_value);
      zero_group<S>(m, ParamGroup::kOpacity);
      zero_group<S>(v, ParamGroup::kOpacity);
      ++result.stats.opacity_resets;
    }
    if (cfg.shape_reset && step < cfg.densify_until && step % cfg.shape_reset_interval == 0) {
      shape_reset(scene);
      zero_group<S>(m, ParamGroup::kShape);
      zero_group<S>(v, ParamGroup::kShape);
      ++result.stats.shape_resets;
    }
    if (cfg.shape_prune && step % cfg.shape_prune_interval == 0) {
      const std::size_t before = scene.size();
      apply(shape_prune(scene, cfg));
      result.stats.shape_pruned += before - scene.size();
    }
    if (scene.empty()) {
      throw TrainingError("scene emptied by pruning at iteration " + std::to_string(step));
    }
  }
  result.scene = std::move(scene);
  return result;
}

}  // namespace

TrainResult2 train_2d(Scene2 init, const Image& target, const TrainConfig& cfg) {
  if (target.channels != 3 || target.size() == 0) throw std::invalid_argument("train_2d: target must be a non-empty RGB image");
  return run<Splat2>(std::move(init), Backend2(target, cfg), cfg);
}

TrainResult3 train_3d(Scene3 init, std::span<const View> views, const TrainConfig& cfg) {
  return run<Splat3>(std::move(init), Backend3(views, cfg), cfg);
}

}  // namespace ges::train
