#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ges/adam.hpp"

/// One-dimensional mixture-fitting laboratory: synthetic signals, four
/// mixture families with analytic gradients, full-batch Adam fitting and a
/// seeded multi-run stability benchmark.

namespace ges::sim1d {

enum class SignalKind { kSquare, kTriangle, kParabolic, kHalfSinusoid, kGaussian, kExponential };

std::string_view to_string(SignalKind kind);
SignalKind signal_kind_from_string(std::string_view name);
std::span<const SignalKind> all_signal_kinds();

struct SignalSpec {
  SignalKind kind = SignalKind::kSquare;
  double width = 1.0;
  double x_lo = -1.0;
  double x_hi = 1.0;
  std::size_t samples = 256;

  /// Throws std::invalid_argument on width <= 0, x_lo >= x_hi or samples < 2.
  void validate() const;
};

struct Signal {
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Closed-form signal value. Every kind except kGaussian is zero outside the
/// open window (-width/2, width/2).
double signal_value(SignalKind kind, double width, double x);

/// Uniform grid of `samples` points over [x_lo, x_hi] and the signal on it.
Signal generate_signal(const SignalSpec& spec);

/// Closed-form Fourier reference for the signal kind, sinc(x) = sin(pi x)/(pi x).
/// The parabolic formula diverges at f = 0 and returns +inf there.
double fourier_reference(const SignalSpec& spec, double f);

enum class MixtureKind { kGaussian, kDoG, kLoG, kGEF };

std::string_view to_string(MixtureKind kind);
MixtureKind mixture_kind_from_string(std::string_view name);
std::span<const MixtureKind> all_mixture_kinds();

/// A 1D mixture with learnable location, scale, weight and (GEF only) shape.
///
/// Weights are stored raw: the effective weight is softplus(raw) when
/// positive_weights is set and raw otherwise. The GEF shape is stored as
/// softplus-preimage so the effective beta is always positive.
struct Mixture1D {
  static constexpr double kEps = 1e-8;
  static constexpr double kNu = 4.0;

  MixtureKind kind = MixtureKind::kGaussian;
  std::vector<double> mu;
  std::vector<double> scale;
  std::vector<double> weight_raw;
  /// Empty for non-GEF kinds; one entry when beta is shared, N when per component.
  std::vector<double> beta_raw;
  bool positive_weights = false;

  std::size_t size() const { return mu.size(); }
  double weight(std::size_t i) const;
  double beta(std::size_t i) const;

  void set_weight(std::size_t i, double w);
  /// Sets every shape entry to the given beta > 0.
  void set_beta(double beta);

  /// Flat parameter layout: mu[N], scale[N], weight_raw[N], beta_raw[k].
  std::size_t param_count() const;
  std::vector<double> params() const;
  void set_params(std::span<const double> flat);

  /// Throws std::invalid_argument when the component arrays disagree in size.
  void validate() const;

  static Mixture1D make(MixtureKind kind, std::size_t n, bool positive_weights,
                        bool per_component_beta = false);
};

double eval_mixture(const Mixture1D& m, double x);

/// MSE value and gradient with respect to the flat raw parameters.
struct MixtureGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

MixtureGradient mixture_gradients(const Mixture1D& m, std::span<const double> xs,
                                  std::span<const double> ys);

double mixture_mse(const Mixture1D& m, std::span<const double> xs, std::span<const double> ys);

struct FitOptions {
  AdamOptions adam{0.01, 0.9, 0.999, 1e-8};
  int epochs = 2000;
};

struct FitResult {
  double final_loss = 0.0;
  Mixture1D params;
  int epochs_run = 0;
  bool diverged = false;
};

/// Full-batch Adam on MSE. Stops at the first non-finite loss and reports
/// diverged = true with final_loss = NaN.
FitResult fit_mixture(const Mixture1D& init, std::span<const double> xs,
                      std::span<const double> ys, const FitOptions& opt);

/// Random initialization over the domain [x_lo, x_hi]:
/// mu ~ U(domain), scale ~ U(0.05, 0.5) * width, w ~ N(0, 0.3), beta = 2.
Mixture1D random_mixture(MixtureKind kind, std::size_t n, bool positive_weights, double x_lo,
                         double x_hi, std::mt19937_64& rng, bool per_component_beta = false);

struct BenchmarkConfig {
  std::vector<SignalKind> signals{all_signal_kinds().begin(), all_signal_kinds().end()};
  std::vector<MixtureKind> mixtures{all_mixture_kinds().begin(), all_mixture_kinds().end()};
  std::vector<int> ns{2, 5, 8, 10, 15, 20};
  std::vector<bool> weight_modes{true, false};
  int runs = 20;
  std::uint64_t seed = 0;
  double width = 1.0;
  double x_lo = -1.0;
  double x_hi = 1.0;
  std::size_t samples = 256;
  FitOptions fit;
  bool per_component_beta = false;
  int threads = 1;
};

struct RunRecord {
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  bool diverged = false;
  int epochs_run = 0;
};

struct BenchmarkRow {
  SignalKind signal = SignalKind::kSquare;
  MixtureKind mixture = MixtureKind::kGaussian;
  int n = 0;
  bool positive_weights = true;
  int runs = 0;
  int nan_count = 0;
  double stability_pct = 0.0;
  double mean_loss = 0.0;
  double median_loss = 0.0;
  std::uint64_t seed = 0;
  std::vector<RunRecord> run_records;
};

/// Seed for run `run` of a configuration; independent of which other
/// configurations are in the benchmark.
std::uint64_t run_seed(std::uint64_t base, SignalKind signal, MixtureKind mixture, int n,
                       bool positive_weights, int run);

/// Rows come back in configuration order (signal, mixture, n, weight mode)
/// regardless of how many worker threads run them.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg);

void write_benchmark_csv(std::ostream& os, std::span<const BenchmarkRow> rows);
void write_runs_csv(std::ostream& os, std::span<const BenchmarkRow> rows);

}  // namespace ges::sim1d
