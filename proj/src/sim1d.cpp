#include "ges/sim1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ges/format.hpp"
#include "ges/parallel.hpp"
#include "ges/special.hpp"

namespace ges::sim1d {

namespace {

constexpr std::array kSignalKinds = {SignalKind::kSquare,       SignalKind::kTriangle,
                                     SignalKind::kParabolic,    SignalKind::kHalfSinusoid,
                                     SignalKind::kGaussian,     SignalKind::kExponential};
constexpr std::array kMixtureKinds = {MixtureKind::kGaussian, MixtureKind::kDoG,
                                      MixtureKind::kLoG, MixtureKind::kGEF};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::kSquare: return "square";
    case SignalKind::kTriangle: return "triangle";
    case SignalKind::kParabolic: return "parabolic";
    case SignalKind::kHalfSinusoid: return "half_sinusoid";
    case SignalKind::kGaussian: return "gaussian";
    case SignalKind::kExponential: return "exponential";
  }
  return "unknown";
}

SignalKind signal_kind_from_string(std::string_view name) {
  for (SignalKind k : kSignalKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown signal kind: " + std::string(name));
}

std::span<const SignalKind> all_signal_kinds() { return kSignalKinds; }

std::string_view to_string(MixtureKind kind) {
  switch (kind) {
    case MixtureKind::kGaussian: return "gaussian";
    case MixtureKind::kDoG: return "dog";
    case MixtureKind::kLoG: return "log";
    case MixtureKind::kGEF: return "gef";
  }
  return "unknown";
}

MixtureKind mixture_kind_from_string(std::string_view name) {
  for (MixtureKind k : kMixtureKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown mixture kind: " + std::string(name));
}

std::span<const MixtureKind> all_mixture_kinds() { return kMixtureKinds; }

void SignalSpec::validate() const {
  if (!(width > 0.0)) throw std::invalid_argument("SignalSpec: width must be positive");
  if (!(x_lo < x_hi)) throw std::invalid_argument("SignalSpec: x_lo must be below x_hi");
  if (samples < 2) throw std::invalid_argument("SignalSpec: need at least 2 samples");
}

double signal_value(SignalKind kind, double width, double x) {
  const double half = 0.5 * width;
  if (kind == SignalKind::kGaussian) return std::exp(-x * x / (2.0 * width * width));
  if (!(-half < x && x < half)) return 0.0;
  switch (kind) {
    case SignalKind::kSquare: return 1.0;
    case SignalKind::kTriangle: return half - std::abs(x);
    case SignalKind::kParabolic: return half * half - x * x;
    case SignalKind::kHalfSinusoid: return std::sin((x + half) * std::numbers::pi / width);
    case SignalKind::kExponential: return std::exp(-std::abs(x));
    case SignalKind::kGaussian: break;
  }
  return 0.0;
}

Signal generate_signal(const SignalSpec& spec) {
  spec.validate();
  Signal s;
  s.xs.resize(spec.samples);
  s.ys.resize(spec.samples);
  const double step = (spec.x_hi - spec.x_lo) / static_cast<double>(spec.samples - 1);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const double x = i + 1 == spec.samples ? spec.x_hi : spec.x_lo + step * static_cast<double>(i);
    s.xs[i] = x;
    s.ys[i] = signal_value(spec.kind, spec.width, x);
  }
  return s;
}

double fourier_reference(const SignalSpec& spec, double f) {
  const double sigma = spec.width;
  const double pi = std::numbers::pi;
  switch (spec.kind) {
    case SignalKind::kSquare: return sinc(f * sigma / pi);
    case SignalKind::kTriangle: {
      const double s = sinc(f * sigma / (2.0 * pi));
      return s * s;
    }
    case SignalKind::kParabolic: {
      if (f == 0.0) return std::numeric_limits<double>::infinity();
      const double s = sinc(f * sigma / (2.0 * pi));
      return 3.0 * s * s / (pi * pi * f * f);
    }
    case SignalKind::kHalfSinusoid:
      if (f == 0.0) return sigma / 2.0;
      return sigma * std::sin(pi * f * sigma) / (pi * pi * f * f);
    case SignalKind::kExponential: return sigma / (f * f + (sigma / 2.0) * (sigma / 2.0));
    case SignalKind::kGaussian:
      return std::sqrt(2.0 * pi) * sigma * std::exp(-2.0 * pi * pi * sigma * sigma * f * f);
  }
  return 0.0;
}

double Mixture1D::weight(std::size_t i) const {
  return positive_weights ? special::softplus(weight_raw[i]) : weight_raw[i];
}

double Mixture1D::beta(std::size_t i) const {
  if (beta_raw.empty()) return 2.0;
  return special::softplus(beta_raw.size() == 1 ? beta_raw[0] : beta_raw[i]);
}

void Mixture1D::set_weight(std::size_t i, double w) {
  weight_raw[i] = positive_weights ? special::softplus_inverse(w) : w;
}

void Mixture1D::set_beta(double b) {
  const double raw = special::softplus_inverse(b);
  for (double& r : beta_raw) r = raw;
}

std::size_t Mixture1D::param_count() const { return 3 * mu.size() + beta_raw.size(); }

std::vector<double> Mixture1D::params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  flat.insert(flat.end(), mu.begin(), mu.end());
  flat.insert(flat.end(), scale.begin(), scale.end());
  flat.insert(flat.end(), weight_raw.begin(), weight_raw.end());
  flat.insert(flat.end(), beta_raw.begin(), beta_raw.end());
  return flat;
}

void Mixture1D::set_params(std::span<const double> flat) {
  if (flat.size() != param_count()) throw std::invalid_argument("Mixture1D: parameter size mismatch");
  const std::size_t n = mu.size();
  std::copy_n(flat.begin(), n, mu.begin());
  std::copy_n(flat.begin() + n, n, scale.begin());
  std::copy_n(flat.begin() + 2 * n, n, weight_raw.begin());
  std::copy(flat.begin() + 3 * n, flat.end(), beta_raw.begin());
}

void Mixture1D::validate() const {
  const std::size_t n = mu.size();
  if (n == 0) throw std::invalid_argument("Mixture1D: need at least one component");
  if (scale.size() != n || weight_raw.size() != n) {
    throw std::invalid_argument("Mixture1D: component arrays differ in size");
  }
  if (kind == MixtureKind::kGEF) {
    if (beta_raw.size() != 1 && beta_raw.size() != n) {
      throw std::invalid_argument("Mixture1D: GEF needs one shared beta or one per component");
    }
  } else if (!beta_raw.empty()) {
    throw std::invalid_argument("Mixture1D: only GEF mixtures carry beta");
  }
}

Mixture1D Mixture1D::make(MixtureKind kind, std::size_t n, bool positive_weights,
                          bool per_component_beta) {
  Mixture1D m;
  m.kind = kind;
  m.positive_weights = positive_weights;
  m.mu.assign(n, 0.0);
  m.scale.assign(n, 1.0);
  m.weight_raw.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.set_weight(i, 1.0);
  if (kind == MixtureKind::kGEF) {
    m.beta_raw.assign(per_component_beta ? n : 1, special::softplus_inverse(2.0));
  }
  return m;
}

double eval_mixture(const Mixture1D& m, double x) {
  constexpr double eps = Mixture1D::kEps;
  constexpr double nu = Mixture1D::kNu;
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = x - m.mu[i];
    const double d2 = d * d;
    const double s2 = m.scale[i] * m.scale[i];
    double basis = 0.0;
    switch (m.kind) {
      case MixtureKind::kGaussian: basis = std::exp(-d2 / (2.0 * s2 + eps)); break;
      case MixtureKind::kDoG:
        basis = std::exp(-d2 / (2.0 * s2 + eps)) - std::exp(-d2 / (2.0 * (s2 / nu) + eps));
        break;
      case MixtureKind::kLoG:
        basis = (1.0 - d2 / (s2 + eps)) * std::exp(-d2 / (2.0 * s2 + eps));
        break;
      case MixtureKind::kGEF:
        basis = std::exp(-std::pow(std::abs(d), m.beta(i)) / (2.0 * s2 + eps));
        break;
    }
    sum += m.weight(i) * basis;
  }
  return sum;
}

double mixture_mse(const Mixture1D& m, std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("mixture_mse: bad data");
  double acc = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = eval_mixture(m, xs[k]) - ys[k];
    acc += r * r;
  }
  return acc / static_cast<double>(xs.size());
}

MixtureGradient mixture_gradients(const Mixture1D& m, std::span<const double> xs,
                                  std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("mixture_gradients: xs and ys must be non-empty and equal length");
  }
  constexpr double eps = Mixture1D::kEps;
  constexpr double nu = Mixture1D::kNu;
  const std::size_t n = m.size();
  const std::size_t count = xs.size();
  const bool shared_beta = m.beta_raw.size() == 1;

  MixtureGradient out;
  out.grad.assign(m.param_count(), 0.0);
  double* g_mu = out.grad.data();
  double* g_scale = g_mu + n;
  double* g_w = g_scale + n;
  double* g_beta = g_w + n;

  std::vector<double> weights(n), betas(n), basis(n), d_mu(n), d_scale(n), d_beta(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = m.weight(i);
    betas[i] = m.beta(i);
  }

  double loss = 0.0;
  const double inv_count = 1.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = xs[k];
    double pred = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x - m.mu[i];
      const double d2 = d * d;
      const double s = m.scale[i];
      const double s2 = s * s;
      d_beta[i] = 0.0;
      switch (m.kind) {
        case MixtureKind::kGaussian: {
          const double den = 2.0 * s2 + eps;
          const double e = std::exp(-d2 / den);
          basis[i] = e;
          d_mu[i] = e * 2.0 * d / den;
          d_scale[i] = e * d2 * 4.0 * s / (den * den);
          break;
        }
        case MixtureKind::kDoG: {
          const double den1 = 2.0 * s2 + eps;
          const double den2 = 2.0 * (s2 / nu) + eps;
          const double e1 = std::exp(-d2 / den1);
          const double e2 = std::exp(-d2 / den2);
          basis[i] = e1 - e2;
          d_mu[i] = e1 * 2.0 * d / den1 - e2 * 2.0 * d / den2;
          d_scale[i] = e1 * d2 * 4.0 * s / (den1 * den1) - e2 * d2 * (4.0 * s / nu) / (den2 * den2);
          break;
        }
        case MixtureKind::kLoG: {
          const double den_p = s2 + eps;
          const double den_e = 2.0 * s2 + eps;
          const double p = 1.0 - d2 / den_p;
          const double e = std::exp(-d2 / den_e);
          basis[i] = p * e;
          const double dp_dmu = 2.0 * d / den_p;
          const double de_dmu = e * 2.0 * d / den_e;
          const double dp_ds = d2 * 2.0 * s / (den_p * den_p);
          const double de_ds = e * d2 * 4.0 * s / (den_e * den_e);
          d_mu[i] = dp_dmu * e + p * de_dmu;
          d_scale[i] = dp_ds * e + p * de_ds;
          break;
        }
        case MixtureKind::kGEF: {
          const double den = 2.0 * s2 + eps;
          const double ad = std::abs(d);
          const double beta = betas[i];
          const double pw = std::pow(ad, beta);
          const double e = std::exp(-pw / den);
          basis[i] = e;
          if (ad > 0.0) {
            const double sign = d > 0.0 ? 1.0 : -1.0;
            d_mu[i] = e * beta * std::pow(ad, beta - 1.0) * sign / den;
            d_beta[i] = -e * pw * std::log(ad) / den;
          } else {
            d_mu[i] = 0.0;
          }
          d_scale[i] = e * pw * 4.0 * s / (den * den);
          break;
        }
      }
      pred += weights[i] * basis[i];
    }
    const double r = pred - ys[k];
    loss += r * r;
    const double g = 2.0 * r * inv_count;
    for (std::size_t i = 0; i < n; ++i) {
      g_mu[i] += g * weights[i] * d_mu[i];
      g_scale[i] += g * weights[i] * d_scale[i];
      g_w[i] += g * basis[i];
      if (m.kind == MixtureKind::kGEF) {
        g_beta[shared_beta ? 0 : i] += g * weights[i] * d_beta[i];
      }
    }
  }
  out.loss = loss * inv_count;

  if (m.positive_weights) {
    for (std::size_t i = 0; i < n; ++i) g_w[i] *= special::sigmoid(m.weight_raw[i]);
  }
  for (std::size_t j = 0; j < m.beta_raw.size(); ++j) g_beta[j] *= special::sigmoid(m.beta_raw[j]);
  return out;
}

FitResult fit_mixture(const Mixture1D& init, std::span<const double> xs,
                      std::span<const double> ys, const FitOptions& opt) {
  if (opt.epochs < 1) throw std::invalid_argument("fit_mixture: epochs must be >= 1");
  init.validate();
  FitResult result;
  result.params = init;
  std::vector<double> params = init.params();
  Adam adam(params.size(), opt.adam);
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const MixtureGradient g = mixture_gradients(result.params, xs, ys);
    result.epochs_run = epoch + 1;
    if (!std::isfinite(g.loss)) {
      result.diverged = true;
      result.final_loss = kNaN;
      return result;
    }
    adam.step(params, g.grad);
    result.params.set_params(params);
  }
  const double final_loss = mixture_mse(result.params, xs, ys);
  if (!std::isfinite(final_loss)) {
    result.diverged = true;
    result.final_loss = kNaN;
  } else {
    result.final_loss = final_loss;
  }
  return result;
}

Mixture1D random_mixture(MixtureKind kind, std::size_t n, bool positive_weights, double x_lo,
                         double x_hi, std::mt19937_64& rng, bool per_component_beta) {
  Mixture1D m = Mixture1D::make(kind, n, positive_weights, per_component_beta);
  const double width = x_hi - x_lo;
  std::uniform_real_distribution<double> loc(x_lo, x_hi);
  std::uniform_real_distribution<double> scale(0.05 * width, 0.5 * width);
  std::normal_distribution<double> weight(0.0, 0.3);
  for (std::size_t i = 0; i < n; ++i) {
    m.mu[i] = loc(rng);
    m.scale[i] = scale(rng);
    const double w = weight(rng);
    m.set_weight(i, positive_weights ? std::max(std::abs(w), 1e-6) : w);
  }
  return m;
}

std::uint64_t run_seed(std::uint64_t base, SignalKind signal, MixtureKind mixture, int n,
                       bool positive_weights, int run) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(signal));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(mixture) << 8));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(n) << 16));
  h = splitmix64(h ^ (positive_weights ? 1ULL : 2ULL));
  return splitmix64(h ^ (static_cast<std::uint64_t>(run) << 32));
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_benchmark: runs must be >= 1");
  for (int n : cfg.ns) {
    if (n < 1) throw std::invalid_argument("run_benchmark: component counts must be >= 1");
  }

  std::vector<BenchmarkRow> rows;
  for (SignalKind s : cfg.signals) {
    for (MixtureKind mk : cfg.mixtures) {
      for (int n : cfg.ns) {
        for (bool positive : cfg.weight_modes) {
          BenchmarkRow row;
          row.signal = s;
          row.mixture = mk;
          row.n = n;
          row.positive_weights = positive;
          row.runs = cfg.runs;
          row.seed = cfg.seed;
          row.run_records.resize(static_cast<std::size_t>(cfg.runs));
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::vector<Signal> signals;
  for (SignalKind s : cfg.signals) {
    signals.push_back(generate_signal({s, cfg.width, cfg.x_lo, cfg.x_hi, cfg.samples}));
  }
  const std::size_t per_signal = rows.size() / std::max<std::size_t>(1, cfg.signals.size());
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);

  parallel_for(rows.size() * runs, cfg.threads, [&](std::size_t job) {
    BenchmarkRow& row = rows[job / runs];
    const int run = static_cast<int>(job % runs);
    const Signal& sig = signals[(job / runs) / per_signal];
    const std::uint64_t seed =
        run_seed(cfg.seed, row.signal, row.mixture, row.n, row.positive_weights, run);
    std::mt19937_64 rng(seed);
    const Mixture1D init = random_mixture(row.mixture, static_cast<std::size_t>(row.n),
                                          row.positive_weights, cfg.x_lo, cfg.x_hi, rng,
                                          cfg.per_component_beta);
    const FitResult fit = fit_mixture(init, sig.xs, sig.ys, cfg.fit);
    row.run_records[static_cast<std::size_t>(run)] = {seed, fit.final_loss, fit.diverged,
                                                       fit.epochs_run};
  });

  for (BenchmarkRow& row : rows) {
    std::vector<double> ok;
    for (const RunRecord& r : row.run_records) {
      if (r.diverged) {
        ++row.nan_count;
      } else {
        ok.push_back(r.final_loss);
      }
    }
    row.stability_pct =
        static_cast<double>(row.runs - row.nan_count) / static_cast<double>(row.runs) * 100.0;
    if (ok.empty()) {
      row.mean_loss = kNaN;
    } else {
      double sum = 0.0;
      for (double v : ok) sum += v;
      row.mean_loss = sum / static_cast<double>(ok.size());
    }
    row.median_loss = median_of(std::move(ok));
  }
  return rows;
}

void write_benchmark_csv(std::ostream& os, std::span<const BenchmarkRow> rows) {
  os << "signal,mixture,n,positive_weights,runs,nan_count,stability_pct,mean_loss,median_loss,seed\n";
  for (const BenchmarkRow& r : rows) {
    os << to_string(r.signal) << ',' << to_string(r.mixture) << ',' << r.n << ','
       << (r.positive_weights ? "true" : "false") << ',' << r.runs << ',' << r.nan_count << ','
       << format_double(r.stability_pct) << ',' << format_double(r.mean_loss) << ','
       << format_double(r.median_loss) << ',' << r.seed << '\n';
  }
}

void write_runs_csv(std::ostream& os, std::span<const BenchmarkRow> rows) {
  os << "signal,mixture,n,positive_weights,run,run_seed,final_loss,diverged,epochs_run\n";
  for (const BenchmarkRow& r : rows) {
    for (std::size_t i = 0; i < r.run_records.size(); ++i) {
      const RunRecord& rec = r.run_records[i];
      os << to_string(r.signal) << ',' << to_string(r.mixture) << ',' << r.n << ','
         << (r.positive_weights ? "true" : "false") << ',' << i << ',' << rec.seed << ','
         << format_double(rec.final_loss) << ',' << (rec.diverged ? "true" : "false") << ','
         << rec.epochs_run << '\n';
    }
  }
}

}  // namespace ges::sim1d
