#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ges {

/// Row-major, interleaved float image. Values are nominally in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, int c = 3, double fill = 0.0) : width(w), height(h), channels(c) {
    if (w < 0 || h < 0 || c <= 0) throw std::invalid_argument("Image: bad dimensions");
    data.assign(static_cast<std::size_t>(w) * h * c, fill);
  }

  std::size_t index(int row, int col, int ch = 0) const {
    return (static_cast<std::size_t>(row) * width + col) * channels + ch;
  }
  double& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
  double at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": image dimensions differ (" +
                                std::to_string(a.width) + "x" + std::to_string(a.height) + "x" +
                                std::to_string(a.channels) + " vs " + std::to_string(b.width) + "x" +
                                std::to_string(b.height) + "x" + std::to_string(b.channels) + ")");
  }
}

inline double mse(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return a.size() ? s / static_cast<double>(a.size()) : 0.0;
}

/// Peak signal-to-noise ratio for unit peak; +inf for identical images.
inline double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0.0) return INFINITY;
  return -10.0 * std::log10(m);
}

/// 0.299 R + 0.587 G + 0.114 B as a one-channel image.
inline Image luminance(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw std::invalid_argument("luminance: expected 1 or 3 channels");
  Image out(img.width, img.height, 1);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    out.data[p] = 0.299 * img.data[3 * p] + 0.587 * img.data[3 * p + 1] + 0.114 * img.data[3 * p + 2];
  }
  return out;
}

}  // namespace ges
