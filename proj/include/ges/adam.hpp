#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ges {

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-correction factors for step t (1-based).
struct AdamBias {
  double first;
  double second;

  static AdamBias at(std::int64_t t, const AdamOptions& opt) {
    return {1.0 - std::pow(opt.beta1, static_cast<double>(t)),
            1.0 - std::pow(opt.beta2, static_cast<double>(t))};
  }
};

inline void adam_update(double& x, double& m, double& v, double grad, double lr,
                        const AdamBias& bias, const AdamOptions& opt) {
  m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
  v = opt.beta2 * v + (1.0 - opt.beta2) * grad * grad;
  const double m_hat = m / bias.first;
  const double v_hat = v / bias.second;
  x -= lr * m_hat / (std::sqrt(v_hat) + opt.eps);
}

/// Dense Adam over a flat parameter vector with a single learning rate.
class Adam {
 public:
  Adam(std::size_t size, AdamOptions opt) : opt_(opt), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
      throw std::invalid_argument("Adam::step: size mismatch");
    }
    ++t_;
    const AdamBias bias = AdamBias::at(t_, opt_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      adam_update(params[i], m_[i], v_[i], grads[i], opt_.lr, bias, opt_);
    }
  }

  std::int64_t steps() const { return t_; }

 private:
  AdamOptions opt_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

}  // namespace ges
