#include "ges/freqloss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ges::freq {

void FreqMaskConfig::validate() const {
  if (!(epsilon_omega >= 0.0 && epsilon_omega <= 1.0)) throw std::invalid_argument("FreqMaskConfig: epsilon_omega must be in [0, 1]");
  if (!(downsample > 0.0 && downsample <= 1.0)) throw std::invalid_argument("FreqMaskConfig: downsample must be in (0, 1]");
}

void LossWeights::validate() const {
  if (!(lambda_ssim >= 0.0) || !(lambda_omega >= 0.0)) throw std::invalid_argument("LossWeights: weights must be non-negative");
  if (lambda_l1() < -1e-12) throw std::invalid_argument("LossWeights: lambda_ssim + lambda_omega exceeds 1");
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian_kernel: sigma must be >= 0");
  if (sigma == 0.0) return {1.0};
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

// Symmetric reflection (edge sample repeated), valid for any offset.
int reflect(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

enum class Pad { kReflect, kZero };

// Source index for offset position `i` in [0, n), or -1 for a zero tap.
int border_index(int i, int n, Pad pad) {
  if (i >= 0 && i < n) return i;
  return pad == Pad::kZero ? -1 : reflect(i, n);
}

// One 1D pass along rows (stride = channels) or columns (stride = row size).
// Taps are summed in kernel order on every path so border and interior
// pixels round the same way.
void convolve_pass(const double* src, double* dst, int lines, int len, std::ptrdiff_t line_stride,
                   std::ptrdiff_t step, int channels, const std::vector<double>& k, Pad pad) {
  const int r = static_cast<int>(k.size() / 2);
  const double* kp = k.data();
  for (int line = 0; line < lines; ++line) {
    const double* in = src + line * line_stride;
    double* out = dst + line * line_stride;
    for (int x = 0; x < len; ++x) {
      const bool interior = x - r >= 0 && x + r < len;
      for (int ch = 0; ch < channels; ++ch) {
        double s = 0.0;
        if (interior) {
          const double* base = in + (x - r) * step + ch;
          for (int t = 0; t <= 2 * r; ++t) s += kp[t] * base[t * step];
        } else {
          for (int t = -r; t <= r; ++t) {
            const int xi = border_index(x + t, len, pad);
            if (xi < 0) continue;
            s += kp[t + r] * in[xi * step + ch];
          }
        }
        out[x * step + ch] = s;
      }
    }
  }
}

Image convolve_separable(const Image& img, const std::vector<double>& k, Pad pad) {
  const int w = img.width, h = img.height, c = img.channels;
  Image tmp(w, h, c);
  Image out(w, h, c);
  const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(w) * c;
  // Horizontal: one line per image row, samples `c` apart.
  convolve_pass(img.data.data(), tmp.data.data(), h, w, row, c, c, k, pad);
  // Vertical: treat each (column, channel) pair as a line with stride `row`.
  convolve_pass(tmp.data.data(), out.data.data(), 1, h, 0, row, static_cast<int>(row), k, pad);
  return out;
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0 || img.size() == 0) return img;
  return convolve_separable(img, gaussian_kernel(sigma), Pad::kReflect);
}

Image resize_bilinear(const Image& img, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize_bilinear: bad target size");
  if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("resize_bilinear: empty source");
  Image out(width, height, img.channels);
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int i = 0; i < height; ++i) {
    const double y = std::clamp((i + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(std::floor(y));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = y - y0;
    for (int j = 0; j < width; ++j) {
      const double x = std::clamp((j + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(std::floor(x));
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = x - x0;
      for (int ch = 0; ch < img.channels; ++ch) {
        const double top = (1 - fx) * img.at(y0, x0, ch) + fx * img.at(y0, x1, ch);
        const double bot = (1 - fx) * img.at(y1, x0, ch) + fx * img.at(y1, x1, ch);
        out.at(i, j, ch) = (1 - fy) * top + fy * bot;
      }
    }
  }
  return out;
}

Image resize_nearest(const Image& img, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize_nearest: bad target size");
  Image out(width, height, img.channels);
  for (int i = 0; i < height; ++i) {
    const int si = std::min(img.height - 1, static_cast<int>((i + 0.5) * img.height / height));
    for (int j = 0; j < width; ++j) {
      const int sj = std::min(img.width - 1, static_cast<int>((j + 0.5) * img.width / width));
      for (int ch = 0; ch < img.channels; ++ch) out.at(i, j, ch) = img.at(si, sj, ch);
    }
  }
  return out;
}

Image dog_response(const Image& target, double omega, const FreqMaskConfig& cfg) {
  cfg.validate();
  if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("dog_response: omega must be in [0, 1]");
  const Image lum = luminance(target);
  const int w = std::max(1, static_cast<int>(std::lround(target.width * cfg.downsample)));
  const int h = std::max(1, static_cast<int>(std::lround(target.height * cfg.downsample)));
  const Image small = resize_bilinear(lum, w, h);
  const Image wide = gaussian_blur(small, FreqMaskConfig::sigma1_of(omega));
  const Image narrow = gaussian_blur(small, FreqMaskConfig::sigma2_of(omega));
  Image out(w, h, 1);
  for (std::size_t p = 0; p < out.size(); ++p) out.data[p] = std::abs(wide.data[p] - narrow.data[p]);
  const auto [lo, hi] = std::minmax_element(out.data.begin(), out.data.end());
  const double mn = *lo, mx = *hi;
  // Treat a response flat to rounding noise as degenerate.
  if (!(mx - mn > 1e-12)) {
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  for (double& v : out.data) v = (v - mn) / (mx - mn);
  return out;
}

Image raw_mask(const Image& target, double omega, const FreqMaskConfig& cfg) {
  Image resp = dog_response(target, omega, cfg);
  for (double& v : resp.data) v = v > cfg.epsilon_omega ? 1.0 : 0.0;
  return resize_nearest(resp, target.width, target.height);
}

Image dog_mask(const Image& target, double omega, const FreqMaskConfig& cfg) {
  Image m = raw_mask(target, omega, cfg);
  if (omega <= 0.5) {
    for (double& v : m.data) v = 1.0 - v;
  }
  return m;
}

LossValue freq_loss(const Image& img, const Image& target, const Image& mask) {
  require_same_shape(img, target, "freq_loss");
  if (mask.width != img.width || mask.height != img.height || mask.channels != 1) {
    throw std::invalid_argument("freq_loss: mask must be a single-channel image of the same size");
  }
  LossValue out;
  out.grad = Image(img.width, img.height, img.channels);
  const double n = static_cast<double>(img.size());
  double s = 0.0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const double m = mask.data[p];
    for (int ch = 0; ch < img.channels; ++ch) {
      const std::size_t i = p * img.channels + ch;
      const double d = img.data[i] - target.data[i];
      s += std::abs(d) * m;
      out.grad.data[i] = (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) * m / n;
    }
  }
  out.value = n > 0 ? s / n : 0.0;
  return out;
}

LossValue freq_loss(const Image& img, const Image& target, double omega, const FreqMaskConfig& cfg) {
  require_same_shape(img, target, "freq_loss");
  return freq_loss(img, target, dog_mask(target, omega, cfg));
}

LossValue l1_loss(const Image& img, const Image& target) {
  require_same_shape(img, target, "l1_loss");
  LossValue out;
  out.grad = Image(img.width, img.height, img.channels);
  const double n = static_cast<double>(img.size());
  double s = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double d = img.data[i] - target.data[i];
    s += std::abs(d);
    out.grad.data[i] = (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) / n;
  }
  out.value = n > 0 ? s / n : 0.0;
  return out;
}

namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& ssim_window() {
  static const std::vector<double> w = [] {
    std::vector<double> k(11);
    double sum = 0.0;
    for (int i = -5; i <= 5; ++i) {
      k[i + 5] = std::exp(-(i * i) / (2.0 * 1.5 * 1.5));
      sum += k[i + 5];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return w;
}

}  // namespace

LossValue ssim(const Image& img, const Image& target) {
  require_same_shape(img, target, "ssim");
  const auto& win = ssim_window();
  const Image& x = img;
  const Image& y = target;
  Image xx = x, yy = y, xy = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx.data[i] = x.data[i] * x.data[i];
    yy.data[i] = y.data[i] * y.data[i];
    xy.data[i] = x.data[i] * y.data[i];
  }
  const Image mx = convolve_separable(x, win, Pad::kZero);
  const Image my = convolve_separable(y, win, Pad::kZero);
  const Image mxx = convolve_separable(xx, win, Pad::kZero);
  const Image myy = convolve_separable(yy, win, Pad::kZero);
  const Image mxy = convolve_separable(xy, win, Pad::kZero);

  const double n = static_cast<double>(x.size());
  Image g_mx(x.width, x.height, x.channels);
  Image g_mxx = g_mx, g_mxy = g_mx;
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ux = mx.data[i], uy = my.data[i];
    const double vx = mxx.data[i] - ux * ux;
    const double vy = myy.data[i] - uy * uy;
    const double cxy = mxy.data[i] - ux * uy;
    const double a1 = 2 * ux * uy + kC1;
    const double a2 = 2 * cxy + kC2;
    const double b1 = ux * ux + uy * uy + kC1;
    const double b2 = vx + vy + kC2;
    const double s = a1 * a2 / (b1 * b2);
    total += s;
    g_mx.data[i] = s * (2 * uy / a1 - 2 * uy / a2 - 2 * ux / b1 + 2 * ux / b2) / n;
    g_mxx.data[i] = -s / b2 / n;
    g_mxy.data[i] = 2 * s / a2 / n;
  }
  // The window is symmetric, so the adjoint of the zero-padded convolution is itself.
  const Image c_mx = convolve_separable(g_mx, win, Pad::kZero);
  const Image c_mxx = convolve_separable(g_mxx, win, Pad::kZero);
  const Image c_mxy = convolve_separable(g_mxy, win, Pad::kZero);
  LossValue out;
  out.value = n > 0 ? total / n : 1.0;
  out.grad = Image(x.width, x.height, x.channels);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.grad.data[i] = c_mx.data[i] + 2 * x.data[i] * c_mxx.data[i] + y.data[i] * c_mxy.data[i];
  }
  return out;
}

TotalLoss total_loss(const Image& img, const Image& target, double omega, const LossWeights& w,
                     const FreqMaskConfig& cfg, const Image* mask) {
  w.validate();
  require_same_shape(img, target, "total_loss");
  const LossValue l1 = l1_loss(img, target);
  const LossValue ss = ssim(img, target);
  const LossValue fq = mask ? freq_loss(img, target, *mask) : freq_loss(img, target, omega, cfg);
  TotalLoss out;
  out.l1 = l1.value;
  out.ssim = ss.value;
  out.freq = fq.value;
  const double wl1 = std::max(0.0, w.lambda_l1());
  out.total = wl1 * l1.value + w.lambda_ssim * (1.0 - ss.value) + w.lambda_omega * fq.value;
  out.grad = Image(img.width, img.height, img.channels);
  for (std::size_t i = 0; i < img.size(); ++i) {
    out.grad.data[i] = wl1 * l1.grad.data[i] - w.lambda_ssim * ss.grad.data[i] + w.lambda_omega * fq.grad.data[i];
  }
  return out;
}

}  // namespace ges::freq
