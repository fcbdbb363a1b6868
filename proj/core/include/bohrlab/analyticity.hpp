#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bohrlab/fourier.hpp"
#include "bohrlab/sampler.hpp"
#include "bohrlab/weights.hpp"

namespace bohrlab {

/// phi(t) = a * sum_{k=1}^{m} cos(2 pi q^k t), coefficients a/2 at +-q^k.
class LacunaryPhase {
 public:
  /// Requires a > 0, m >= 1, q >= 3 and q^m < 2^62.
  static LacunaryPhase make(double amplitude, int blocks, std::int64_t ratio);

  double amplitude() const noexcept { return amplitude_; }
  int blocks() const noexcept { return blocks_; }
  std::int64_t ratio() const noexcept { return ratio_; }
  const SpectralVector& coefficients() const noexcept { return coefficients_; }
  /// m * a
  double a_norm() const noexcept { return coefficients_.a_norm(); }

  double operator()(double t) const noexcept;
  /// phi(j / K), with every q^k j reduced mod K in integer arithmetic.
  double at_fraction(std::int64_t j, std::int64_t K) const noexcept;

 private:
  double amplitude_ = 0.0;
  int blocks_ = 0;
  std::int64_t ratio_ = 3;
  std::vector<std::int64_t> frequencies_;
  SpectralVector coefficients_;
};

struct DecaySample {
  int m = 0;
  double r = 0.0;             ///< m * a
  double pm = 0.0;
  double minus_log_pm = 0.0;
  std::int64_t resolution = 0;
  double parseval = 0.0;      ///< sum of |coefficients|^2 of e^{-i phi}, ideally 1
};

struct DecayFit {
  std::vector<DecaySample> samples;
  double c = 0.0;              ///< slope of -log pm against r
  double intercept = 0.0;
  double base_constant = 0.0;  ///< pm ~ base_constant * e^{-c r}
  double r_squared = 0.0;
};

/// PM norm of the Haar measure times e^{-i phi} on a circle of `resolution` points.
///
/// The atoms are 1/K at j/K, so the transform at the K grid frequencies is
/// the normalized DFT of e^{-i phi(j/K)}.
DecaySample haar_phase_pm(const LacunaryPhase& phi, std::int64_t resolution);

/// pm for every m in m_values (at least 3), resolution = resolution_factor * q^m.
/// Throws CapacityError naming the largest feasible m when q^m outgrows max_resolution.
DecayFit pm_decay_profile(double amplitude, std::span<const int> m_values, std::int64_t ratio,
                          std::int64_t resolution_factor = 16, std::int64_t max_resolution = std::int64_t{1} << 24);

/// Beyond start_rank, each block [j 2^p, (j+1) 2^p) takes its minimum weight.
/// Blocks beginning before start_rank are left untouched.
WeightSequence block_constant_weights(const WeightSequence& w, int p, std::int64_t start_rank);

struct TauSigma {
  AtomicMeasure tau;    ///< xi_n at n in F
  AtomicMeasure sigma;  ///< w_n at n in F
  double tau_mass = 0.0;
  double sigma_mass = 0.0;
};

/// F = [first, last].
TauSigma build_tau_sigma(const RandomSet& set, const WeightSequence& w, std::int64_t first, std::int64_t last);

/// psi(n) = -phi((n - first) / P) for n in [first, last], P = last - first + 1.
std::vector<double> dilated_phase(const LacunaryPhase& phi, std::int64_t first, std::int64_t last);

struct ConcentrationParams {
  std::int64_t first = 1;
  std::int64_t last = 1;
  double c = 0.3;
  double C = 4.0;
  double r = 0.0;  ///< A-norm of the phase
  std::int64_t trials = 200;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::int64_t dilation = 0;  ///< recorded only
};

struct ConcentrationReport {
  ConcentrationParams params;
  std::vector<double> quantile_levels;
  std::vector<double> rho_quantiles;   ///< rho = ||(tau - sigma) e^{i psi}||_PM / (||tau||_M e^{-c r})
  double target_fraction = 0.0;        ///< ||tau e^{i psi}||_PM < C ||tau||_M e^{-c r}
  double fluctuation_mean = 0.0;       ///< mean of ||(tau - sigma) e^{i psi}||_PM
  double fluctuation_stderr = 0.0;
  double tau_mass_mean = 0.0;
  double sigma_mass = 0.0;
  double sigma_pm = 0.0;               ///< ||sigma e^{i psi}||_PM
  double sigma_ratio = 0.0;            ///< sigma_pm / (||sigma||_M e^{-c r})
  bool sigma_inequality = false;       ///< sigma_ratio < C
};

/// Requires trials >= 100, psi with one value per n in F, and sigma != 0.
ConcentrationReport concentration_check(const WeightSequence& w, std::span<const double> psi,
                                        const ConcentrationParams& params);

}  // namespace bohrlab
