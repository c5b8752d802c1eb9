#pragma once

#include <vector>

#include "ges/image.hpp"

/// Image losses for training: Gaussian blur, difference-of-Gaussians band
/// masks driven by a normalized frequency omega, masked L1, SSIM and the
/// weighted total.

namespace ges::freq {

struct FreqMaskConfig {
  double epsilon_omega = 0.5;
  /// Resize factor applied to the target before filtering.
  double downsample = 0.2;

  static double sigma2_of(double omega) { return 0.1 + 10.0 * omega; }
  static double sigma1_of(double omega) { return 2.0 * sigma2_of(omega); }

  void validate() const;
};

struct LossWeights {
  double lambda_ssim = 0.2;
  double lambda_omega = 0.5;

  double lambda_l1() const { return 1.0 - lambda_ssim - lambda_omega; }
  void validate() const;
};

/// Normalized 1D Gaussian taps, radius ceil(3 sigma). sigma = 0 gives {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Separable blur of every channel with symmetric-reflect borders.
Image gaussian_blur(const Image& img, double sigma);

/// Bilinear resampling (pixel-center aligned, edge clamped).
Image resize_bilinear(const Image& img, int width, int height);
Image resize_nearest(const Image& img, int width, int height);

/// |G(L, sigma1) - G(L, sigma2)| on the downsampled luminance, min-max
/// normalized to [0, 1]. A flat response gives all zeros.
Image dog_response(const Image& target, double omega, const FreqMaskConfig& cfg);

/// Thresholded response upsampled to full resolution, without the
/// complement rule. One channel with values in {0, 1}.
Image raw_mask(const Image& target, double omega, const FreqMaskConfig& cfg);

/// raw_mask for omega > 0.5, its complement for omega <= 0.5.
Image dog_mask(const Image& target, double omega, const FreqMaskConfig& cfg);

struct LossValue {
  double value = 0.0;
  /// Gradient with respect to the rendered image.
  Image grad;
};

/// Mean of |I - I_gt| * M over pixels and channels; M is one channel.
LossValue freq_loss(const Image& img, const Image& target, const Image& mask);
LossValue freq_loss(const Image& img, const Image& target, double omega, const FreqMaskConfig& cfg);

/// Mean absolute error.
LossValue l1_loss(const Image& img, const Image& target);

/// Mean SSIM over pixels and channels (11x11 Gaussian window, sigma 1.5,
/// zero padding, C1 = 0.01^2, C2 = 0.03^2) and its gradient.
LossValue ssim(const Image& img, const Image& target);

struct TotalLoss {
  double total = 0.0;
  double l1 = 0.0;
  double ssim = 0.0;
  double freq = 0.0;
  Image grad;
};

/// l1_weight * L1 + lambda_ssim * (1 - SSIM) + lambda_omega * L_omega.
/// `mask` overrides the DoG mask when given.
TotalLoss total_loss(const Image& img, const Image& target, double omega, const LossWeights& w,
                     const FreqMaskConfig& cfg, const Image* mask = nullptr);

}  // namespace ges::freq
