#include "ges/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ges/parallel.hpp"
#include "ges/special.hpp"

namespace ges {

void RenderConfig::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("RenderConfig: width and height must be positive");
  if (!(alpha_clip > 0.0 && alpha_clip < 1.0)) throw std::invalid_argument("RenderConfig: alpha_clip must be in (0, 1)");
  if (!(cutoff > 0.0)) throw std::invalid_argument("RenderConfig: cutoff must be positive");
  mod.validate();
}

namespace {

constexpr int kTile = 8;

struct Prepared {
  Mat2 conic;  // inverse covariance
  bool valid = false;
};

// Per-tile copy of what the pixel loop reads, contiguous in list order.
struct TileEntry {
  double mx, my;
  double ca, cb, cc;  // conic entries (a, b; b, c)
  double opacity;
  int index;
};

struct Binning {
  std::vector<Prepared> prep;
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<int>> tiles;
  std::vector<std::vector<TileEntry>> packed;
  int skipped = 0;
};

bool invert_checked(const Mat2& cov, Mat2& conic) {
  const double a = cov(0, 0);
  const double b = 0.5 * (cov(0, 1) + cov(1, 0));
  const double c = cov(1, 1);
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return false;
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double lmax = mid + rad;
  const double lmin = mid - rad;
  if (!(lmin > 0.0) || lmax > kMaxCondition * lmin) return false;
  const double det = a * c - b * b;
  if (!(det > 0.0)) return false;
  conic << c / det, -b / det, -b / det, a / det;
  return true;
}

Binning bin_splats(std::span<const ScreenSplat> splats, const RenderConfig& cfg) {
  Binning bin;
  bin.tiles_x = (cfg.width + kTile - 1) / kTile;
  bin.tiles_y = (cfg.height + kTile - 1) / kTile;
  bin.tiles.resize(static_cast<std::size_t>(bin.tiles_x) * bin.tiles_y);
  bin.prep.resize(splats.size());
  for (std::size_t k = 0; k < splats.size(); ++k) {
    const ScreenSplat& s = splats[k];
    Prepared& p = bin.prep[k];
    p.valid = invert_checked(s.cov, p.conic);
    if (!p.valid) {
      ++bin.skipped;
      continue;
    }
    if (!s.mean.allFinite()) continue;
    const double rx = cfg.cutoff * std::sqrt(s.cov(0, 0));
    const double ry = cfg.cutoff * std::sqrt(s.cov(1, 1));
    // Pixel centers j + 0.5 inside [mean - r, mean + r].
    const double jlo = std::ceil(s.mean.x() - rx - 0.5);
    const double jhi = std::floor(s.mean.x() + rx - 0.5);
    const double ilo = std::ceil(s.mean.y() - ry - 0.5);
    const double ihi = std::floor(s.mean.y() + ry - 0.5);
    if (jhi < 0 || ihi < 0 || jlo > cfg.width - 1 || ilo > cfg.height - 1 || jlo > jhi || ilo > ihi) continue;
    const int j0 = static_cast<int>(std::max(0.0, jlo)) / kTile;
    const int j1 = static_cast<int>(std::min<double>(cfg.width - 1, jhi)) / kTile;
    const int i0 = static_cast<int>(std::max(0.0, ilo)) / kTile;
    const int i1 = static_cast<int>(std::min<double>(cfg.height - 1, ihi)) / kTile;
    for (int ty = i0; ty <= i1; ++ty) {
      for (int tx = j0; tx <= j1; ++tx) bin.tiles[static_cast<std::size_t>(ty) * bin.tiles_x + tx].push_back(static_cast<int>(k));
    }
  }
  bin.packed.resize(bin.tiles.size());
  for (std::size_t t = 0; t < bin.tiles.size(); ++t) {
    bin.packed[t].reserve(bin.tiles[t].size());
    for (int k : bin.tiles[t]) {
      const Mat2& a = bin.prep[k].conic;
      const ScreenSplat& s = splats[k];
      bin.packed[t].push_back({s.mean.x(), s.mean.y(), a(0, 0), a(0, 1), a(1, 1), s.opacity, k});
    }
  }
  return bin;
}

struct Contribution {
  int index;
  double alpha;
  double g;
  Vec2 d;
  bool clamped;
};

// Walks the splats covering pixel (row, col) front to back. Returns the final
// transmittance; `emit` sees every contributing splat with its transmittance
// before compositing.
template <class Emit>
double composite_pixel(const Binning& bin, const RenderConfig& cfg, int row, int col, Emit&& emit) {
  const std::vector<TileEntry>& list = bin.packed[static_cast<std::size_t>(row / kTile) * bin.tiles_x + col / kTile];
  const double px = col + 0.5, py = row + 0.5;
  const double cutoff_sq = cfg.cutoff * cfg.cutoff;
  double t = 1.0;
  for (const TileEntry& e : list) {
    const double dx = px - e.mx, dy = py - e.my;
    const double q = e.ca * dx * dx + 2.0 * e.cb * dx * dy + e.cc * dy * dy;
    if (!(q <= cutoff_sq)) continue;
    const double g = std::exp(-0.5 * q);
    const double raw = e.opacity * g;
    const bool clamped = raw > cfg.alpha_clip;
    const double alpha = clamped ? cfg.alpha_clip : raw;
    emit(Contribution{e.index, alpha, g, Vec2(dx, dy), clamped}, t);
    t *= 1.0 - alpha;
  }
  return t;
}

}  // namespace

Image render_screen(std::span<const ScreenSplat> splats, const Vec3& background, const RenderConfig& cfg,
                    RenderDiagnostics* diag, RenderTrace* trace) {
  cfg.validate();
  const Binning bin = bin_splats(splats, cfg);
  if (diag) diag->skipped_singular = bin.skipped;
  if (trace) {
    trace->width = cfg.width;
    trace->height = cfg.height;
    trace->splat_count = splats.size();
    trace->rows.resize(static_cast<std::size_t>(cfg.height));
    trace->starts.resize(static_cast<std::size_t>(cfg.height));
    trace->final_transmittance.assign(static_cast<std::size_t>(cfg.width) * cfg.height, 0.0);
  }
  Image img(cfg.width, cfg.height, 3);
  parallel_for(static_cast<std::size_t>(cfg.height), cfg.threads, [&](std::size_t r) {
    const int row = static_cast<int>(r);
    std::vector<RenderTrace::Entry>* entries = trace ? &trace->rows[r] : nullptr;
    if (trace) {
      entries->clear();
      trace->starts[r].assign(1, 0);
    }
    for (int col = 0; col < cfg.width; ++col) {
      Vec3 c = Vec3::Zero();
      const double t = composite_pixel(bin, cfg, row, col, [&](const Contribution& ct, double tr) {
        c += (ct.alpha * tr) * splats[ct.index].color;
        if (entries) entries->push_back({ct.index, ct.clamped, ct.alpha, ct.g, ct.d.x(), ct.d.y(), tr});
      });
      c += t * background;
      for (int ch = 0; ch < 3; ++ch) img.at(row, col, ch) = c[ch];
      if (trace) {
        trace->starts[r].push_back(static_cast<std::uint32_t>(entries->size()));
        trace->final_transmittance[r * cfg.width + col] = t;
      }
    }
  });
  return img;
}

std::vector<ScreenGrad> render_screen_backward(std::span<const ScreenSplat> splats, const Vec3& background,
                                               const RenderConfig& cfg, const Image& dL_dimage,
                                               const RenderTrace* trace) {
  cfg.validate();
  if (dL_dimage.width != cfg.width || dL_dimage.height != cfg.height || dL_dimage.channels != 3) {
    throw std::invalid_argument("render_screen_backward: gradient image does not match the render size");
  }
  if (trace && (trace->width != cfg.width || trace->height != cfg.height || trace->splat_count != splats.size())) {
    throw std::invalid_argument("render_screen_backward: trace does not match the splats or render size");
  }
  const Binning bin = bin_splats(splats, cfg);
  const std::size_t n = splats.size();
  // Accumulators are compact: `touched` lists the splats binned into the
  // row's tiles in first-seen order and `acc` is parallel to it.
  struct Partial {
    std::vector<int> touched;
    std::vector<ScreenGrad> acc;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(bin.tiles_y));
  parallel_for(partial.size(), cfg.threads, [&](std::size_t block) {
    Partial& part = partial[block];
    std::vector<int> slot(n, -1);
    for (int tx = 0; tx < bin.tiles_x; ++tx) {
      for (int k : bin.tiles[block * bin.tiles_x + tx]) {
        if (slot[k] >= 0) continue;
        slot[k] = static_cast<int>(part.touched.size());
        part.touched.push_back(k);
      }
    }
    part.acc.assign(part.touched.size(), ScreenGrad{});
    std::vector<RenderTrace::Entry> walked;
    const int row_end = std::min(cfg.height, static_cast<int>(block + 1) * kTile);
    for (int row = static_cast<int>(block) * kTile; row < row_end; ++row) {
      for (int col = 0; col < cfg.width; ++col) {
        const Vec3 gc(dL_dimage.at(row, col, 0), dL_dimage.at(row, col, 1), dL_dimage.at(row, col, 2));
        if (gc.isZero(0.0)) continue;
        const RenderTrace::Entry* list = nullptr;
        std::size_t count = 0;
        double t_final = 0.0;
        if (trace) {
          const auto& starts = trace->starts[row];
          list = trace->rows[row].data() + starts[col];
          count = starts[col + 1] - starts[col];
          t_final = trace->final_transmittance[static_cast<std::size_t>(row) * cfg.width + col];
        } else {
          walked.clear();
          t_final = composite_pixel(bin, cfg, row, col, [&](const Contribution& ct, double tr) {
            walked.push_back({ct.index, ct.clamped, ct.alpha, ct.g, ct.d.x(), ct.d.y(), tr});
          });
          list = walked.data();
          count = walked.size();
        }
        // suffix = color contributed by everything behind the current splat.
        Vec3 suffix = t_final * background;
        for (std::size_t m = count; m-- > 0;) {
          const RenderTrace::Entry& ct = list[m];
          const ScreenSplat& s = splats[ct.index];
          ScreenGrad& g = part.acc[slot[ct.index]];
          const double tr = ct.transmittance;
          g.color += (ct.alpha * tr) * gc;
          const double dl_dalpha = gc.dot(tr * s.color - suffix / (1.0 - ct.alpha));
          suffix += (ct.alpha * tr) * s.color;
          if (ct.clamped) continue;
          g.opacity += dl_dalpha * ct.g;
          const double dl_dg = dl_dalpha * s.opacity;
          const Vec2 ad = bin.prep[ct.index].conic * Vec2(ct.dx, ct.dy);
          g.mean += (dl_dg * ct.g) * ad;
          g.cov += (0.5 * dl_dg * ct.g) * (ad * ad.transpose());
        }
      }
    }
  });
  std::vector<ScreenGrad> out(n);
  for (const Partial& part : partial) {
    for (std::size_t m = 0; m < part.touched.size(); ++m) {
      ScreenGrad& o = out[part.touched[m]];
      const ScreenGrad& a = part.acc[m];
      o.mean += a.mean;
      o.cov += a.cov;
      o.opacity += a.opacity;
      o.color += a.color;
    }
  }
  return out;
}

bool footprint_visible(const ScreenSplat& s, const RenderConfig& cfg) {
  Mat2 conic;
  if (!invert_checked(s.cov, conic) || !s.mean.allFinite()) return false;
  const double rx = cfg.cutoff * std::sqrt(s.cov(0, 0));
  const double ry = cfg.cutoff * std::sqrt(s.cov(1, 1));
  const double jlo = std::ceil(s.mean.x() - rx - 0.5);
  const double jhi = std::floor(s.mean.x() + rx - 0.5);
  const double ilo = std::ceil(s.mean.y() - ry - 0.5);
  const double ihi = std::floor(s.mean.y() + ry - 0.5);
  return !(jhi < 0 || ihi < 0 || jlo > cfg.width - 1 || ilo > cfg.height - 1 || jlo > jhi || ilo > ihi);
}

std::vector<ScreenSplat> to_screen(const Scene2& scene, const shape::ShapeModifier& mod) {
  std::vector<ScreenSplat> out;
  out.reserve(scene.size());
  for (const Splat2& s : scene.splats) {
    out.push_back({s.mu, effective_covariance(s, mod), s.opacity(), s.color});
  }
  return out;
}

Image render(const Scene2& scene, const RenderConfig& cfg, RenderDiagnostics* diag, RenderTrace* trace) {
  const auto screen = to_screen(scene, cfg.mod);
  return render_screen(screen, scene.background, cfg, diag, trace);
}

BackwardResult2 render_backward(const Scene2& scene, const RenderConfig& cfg, const Image& dL_dimage,
                                const RenderTrace* trace) {
  const auto screen = to_screen(scene, cfg.mod);
  const auto sg = render_screen_backward(screen, scene.background, cfg, dL_dimage, trace);
  BackwardResult2 out;
  out.grads.resize(scene.size());
  out.screen_mean_grads.resize(scene.size());
  for (std::size_t k = 0; k < scene.size(); ++k) {
    const Splat2& s = scene.splats[k];
    const ScreenGrad& g = sg[k];
    const double phi = cfg.mod.value(s.beta());
    const Mat2 sigma = covariance(s);
    double d_theta = 0.0;
    Vec2 d_log_scale;
    covariance_backward(s, phi * g.cov, d_theta, d_log_scale);
    const double kappa = screen[k].opacity;
    Splat2 d;
    d.mu = g.mean;
    d.log_scale = d_log_scale;
    d.theta = d_theta;
    d.opacity_logit = g.opacity * kappa * (1.0 - kappa);
    d.color = g.color;
    d.b = cfg.mod.derivative(s.beta()) * g.cov.cwiseProduct(sigma).sum();
    out.grads[k] = pack(d);
    out.screen_mean_grads[k] = g.mean;
  }
  return out;
}

}  // namespace ges
