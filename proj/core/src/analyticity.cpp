#include "bohrlab/analyticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bohrlab/errors.hpp"
#include "bohrlab/parallel.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/stats.hpp"
#include "int128.hpp"

namespace bohrlab {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::vector<PhasedAtom> phased(std::span<const double> weights, std::span<const double> psi, std::int64_t first) {
  std::vector<PhasedAtom> atoms;
  atoms.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    atoms.push_back({first + static_cast<std::int64_t>(i),
                     weights[i] * std::complex<double>(std::cos(psi[i]), std::sin(psi[i]))});
  }
  return atoms;
}

}  // namespace

LacunaryPhase LacunaryPhase::make(double amplitude, int blocks, std::int64_t ratio) {
  require(amplitude > 0 && std::isfinite(amplitude), "lacunary phase: amplitude must be positive");
  require(blocks >= 1, "lacunary phase: block count must be >= 1");
  require(ratio >= 3, "lacunary phase: ratio must be >= 3");
  LacunaryPhase phi;
  phi.amplitude_ = amplitude;
  phi.blocks_ = blocks;
  phi.ratio_ = ratio;
  i128 f = 1;
  for (int k = 1; k <= blocks; ++k) {
    f *= ratio;
    if (f >= (i128{1} << 62)) throw CapacityError("lacunary phase: frequency q^m exceeds 2^62");
    const auto freq = static_cast<std::int64_t>(f);
    phi.frequencies_.push_back(freq);
    phi.coefficients_.entries[freq] = amplitude / 2;
    phi.coefficients_.entries[-freq] = amplitude / 2;
  }
  return phi;
}

double LacunaryPhase::operator()(double t) const noexcept {
  double sum = 0.0;
  for (const auto f : frequencies_) sum += std::cos(kTwoPi * torus_reduce(static_cast<double>(f) * t));
  return amplitude_ * sum;
}

double LacunaryPhase::at_fraction(std::int64_t j, std::int64_t K) const noexcept {
  double sum = 0.0;
  for (const auto f : frequencies_) {
    const auto r = static_cast<std::int64_t>(static_cast<i128>(f % K) * (j % K) % K);
    sum += std::cos(kTwoPi * static_cast<double>(r) / static_cast<double>(K));
  }
  return amplitude_ * sum;
}

DecaySample haar_phase_pm(const LacunaryPhase& phi, std::int64_t resolution) {
  require(resolution >= 2, "pm decay: resolution must be >= 2");
  const auto K = static_cast<std::size_t>(resolution);
  const double mass = 1.0 / static_cast<double>(resolution);
  std::vector<PhasedAtom> atoms(K);
  std::vector<std::complex<double>> samples(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double v = phi.at_fraction(static_cast<std::int64_t>(j), resolution);
    samples[j] = mass * std::complex<double>(std::cos(v), -std::sin(v));
    atoms[j] = {static_cast<std::int64_t>(j), samples[j]};
  }
  PmOptions options;
  options.grid_size = resolution;
  options.refine = false;
  DecaySample s;
  s.m = phi.blocks();
  s.r = phi.a_norm();
  s.resolution = resolution;
  s.pm = pm_norm_estimate(atoms, options).value;
  s.minus_log_pm = -std::log(s.pm);
  const auto spectrum = forward_dft(samples);
  for (const auto& x : spectrum) s.parseval += std::norm(x);
  return s;
}

DecayFit pm_decay_profile(double amplitude, std::span<const int> m_values, std::int64_t ratio,
                          std::int64_t resolution_factor, std::int64_t max_resolution) {
  require(m_values.size() >= 3, "pm decay: at least three block counts required");
  require(ratio >= 3, "pm decay: ratio must be >= 3");
  require(resolution_factor >= 16, "pm decay: resolution factor must be >= 16");
  int ceiling = 0;
  for (double res = static_cast<double>(resolution_factor) * static_cast<double>(ratio);
       res <= static_cast<double>(max_resolution); res *= static_cast<double>(ratio)) {
    ++ceiling;
  }
  DecayFit fit;
  for (const int m : m_values) {
    if (m > ceiling) {
      throw CapacityError("pm decay: resolution " + std::to_string(resolution_factor) + " * " + std::to_string(ratio) +
                          "^" + std::to_string(m) + " exceeds " + std::to_string(max_resolution) +
                          "; largest feasible m is " + std::to_string(ceiling));
    }
    const auto phi = LacunaryPhase::make(amplitude, m, ratio);
    std::int64_t resolution = resolution_factor;
    for (int k = 0; k < m; ++k) resolution *= ratio;
    fit.samples.push_back(haar_phase_pm(phi, resolution));
  }
  std::vector<double> r, y;
  for (const auto& s : fit.samples) {
    r.push_back(s.r);
    y.push_back(s.minus_log_pm);
  }
  const auto line = fit_line(r, y);
  fit.c = line.slope;
  fit.intercept = line.intercept;
  fit.base_constant = std::exp(-line.intercept);
  fit.r_squared = line.r_squared;
  return fit;
}

WeightSequence block_constant_weights(const WeightSequence& w, int p, std::int64_t start_rank) {
  require(p >= 0 && p < 62, "block weights: block power out of range");
  const std::int64_t block = std::int64_t{1} << p;
  const std::int64_t N = w.horizon();
  require(block <= N, "block weights: 2^p must not exceed the horizon");
  require(start_rank >= 1, "block weights: start rank must be >= 1");
  std::vector<double> values(w.values().begin(), w.values().end());
  const std::int64_t first_block = (start_rank + block - 1) / block;
  for (std::int64_t lo = std::max<std::int64_t>(first_block * block, 1); lo <= N; lo += block) {
    const std::int64_t hi = std::min(N, lo + block - 1);
    const auto begin = values.begin() + (lo - 1);
    const auto end = values.begin() + hi;
    const double low = *std::min_element(begin, end);
    std::fill(begin, end, low);
  }
  return WeightSequence::from_values(w.kind(), std::move(values));
}

TauSigma build_tau_sigma(const RandomSet& set, const WeightSequence& w, std::int64_t first, std::int64_t last) {
  require(first >= 1 && first <= last, "tau/sigma: block must be a nonempty interval of positive integers");
  require(last <= set.horizon() && last <= w.horizon(), "tau/sigma: block exceeds the horizon");
  TauSigma out;
  for (const auto& m : set.members()) {
    if (m.n < first) continue;
    if (m.n > last) break;
    out.tau.atoms[m.n] = static_cast<double>(m.multiplicity);
  }
  for (std::int64_t n = first; n <= last; ++n) out.sigma.atoms[n] = w[n];
  out.tau_mass = out.tau.total_variation();
  out.sigma_mass = out.sigma.total_variation();
  return out;
}

std::vector<double> dilated_phase(const LacunaryPhase& phi, std::int64_t first, std::int64_t last) {
  require(first <= last, "dilated phase: empty block");
  const std::int64_t P = last - first + 1;
  std::vector<double> psi(static_cast<std::size_t>(P));
  for (std::int64_t i = 0; i < P; ++i) psi[static_cast<std::size_t>(i)] = -phi.at_fraction(i, P);
  return psi;
}

ConcentrationReport concentration_check(const WeightSequence& w, std::span<const double> psi,
                                        const ConcentrationParams& params) {
  require(params.trials >= 100, "concentration: at least 100 trials required");
  require(params.first >= 1 && params.first <= params.last && params.last <= w.horizon(),
          "concentration: block must lie inside the weights horizon");
  const auto size = static_cast<std::size_t>(params.last - params.first + 1);
  require(psi.size() == size, "concentration: one phase value per block element required");
  require(params.C > 0 && params.c >= 0 && params.r >= 0, "concentration: c, C and r must be nonnegative");

  std::vector<double> sigma(size);
  for (std::size_t i = 0; i < size; ++i) sigma[i] = w[params.first + static_cast<std::int64_t>(i)];
  ConcentrationReport report;
  report.params = params;
  for (const double s : sigma) report.sigma_mass += s;
  require(report.sigma_mass > 0, "concentration: sigma vanishes on the block");
  const double decay = std::exp(-params.c * params.r);
  const auto sigma_atoms = phased(sigma, psi, params.first);
  report.sigma_pm = pm_norm_estimate(sigma_atoms).value;
  report.sigma_ratio = report.sigma_pm / (report.sigma_mass * decay);
  report.sigma_inequality = report.sigma_ratio < params.C;

  const auto trials = static_cast<std::size_t>(params.trials);
  std::vector<double> rho(trials), fluct(trials), mass(trials);
  std::vector<char> target(trials);
  parallel_for(trials, params.workers, [&](std::size_t t) {
    const auto members = sample_poisson_range(w, seed_stream(params.master_seed, t), params.first, params.last);
    std::vector<double> xi(size, 0.0);
    for (const auto& m : members) xi[static_cast<std::size_t>(m.n - params.first)] = static_cast<double>(m.multiplicity);
    std::vector<double> diff(size);
    for (std::size_t i = 0; i < size; ++i) diff[i] = xi[i] - sigma[i];
    double tau_mass = 0.0;
    for (const double x : xi) tau_mass += x;
    const double fluctuation = pm_norm_estimate(phased(diff, psi, params.first)).value;
    const double full = pm_norm_estimate(phased(xi, psi, params.first)).value;
    const double scale = tau_mass * decay;
    rho[t] = scale > 0 ? fluctuation / scale : (fluctuation > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    target[t] = scale > 0 && full < params.C * scale;
    fluct[t] = fluctuation;
    mass[t] = tau_mass;
  });

  RunningMoments f, m;
  for (std::size_t t = 0; t < trials; ++t) {
    f.add(fluct[t]);
    m.add(mass[t]);
  }
  report.fluctuation_mean = f.mean();
  report.fluctuation_stderr = f.stderr_of_mean();
  report.tau_mass_mean = m.mean();
  report.target_fraction = static_cast<double>(std::count(target.begin(), target.end(), 1)) / static_cast<double>(trials);
  report.quantile_levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  for (const double q : report.quantile_levels) report.rho_quantiles.push_back(quantile(rho, q));
  return report;
}

}  // namespace bohrlab
