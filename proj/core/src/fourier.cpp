#include "bohrlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "bohrlab/errors.hpp"

namespace bohrlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// fftw planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : n_(n) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (data_ == nullptr) throw CapacityError("fft: allocation failed");
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  ~FftBuffer() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(data_);
  }

  std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
  void execute() noexcept { fftw_execute(plan_); }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan plan_ = nullptr;
};

struct TransformDerivatives {
  std::complex<double> f;
  std::complex<double> d1;
  std::complex<double> d2;
};

// Transform and its theta-derivatives with locations shifted by `origin`.
TransformDerivatives derivatives(std::span<const PhasedAtom> atoms, std::int64_t origin, double theta) {
  TransformDerivatives out{};
  for (const auto& a : atoms) {
    const double k = static_cast<double>(a.location - origin);
    const double arg = -kTwoPi * torus_reduce(k * theta);
    const std::complex<double> e = a.weight * std::complex<double>(std::cos(arg), std::sin(arg));
    out.f += e;
    out.d1 += e * std::complex<double>(0.0, -kTwoPi * k);
    out.d2 += e * (-kTwoPi * kTwoPi * k * k);
  }
  return out;
}

struct Peak {
  double theta;
  double value;
};

Peak refine_peak(std::span<const PhasedAtom> atoms, std::int64_t origin, double theta0, double half_width) {
  const double lo = theta0 - half_width;
  const double hi = theta0 + half_width;
  double theta = theta0;
  auto d = derivatives(atoms, origin, theta);
  double best = std::norm(d.f);
  for (int iter = 0; iter < 40; ++iter) {
    const double g1 = 2.0 * std::real(std::conj(d.f) * d.d1);
    const double g2 = 2.0 * (std::norm(d.d1) + std::real(std::conj(d.f) * d.d2));
    double step = g2 < 0 ? -g1 / g2 : (g1 > 0 ? half_width / 8 : -half_width / 8);
    bool improved = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      const double candidate = std::clamp(theta + step, lo, hi);
      const auto dc = derivatives(atoms, origin, candidate);
      const double value = std::norm(dc.f);
      if (value > best) {
        theta = candidate;
        d = dc;
        best = value;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || std::abs(step) < 1e-15) break;
  }
  return {theta, std::sqrt(best)};
}

}  // namespace

double torus_reduce(double t) noexcept { return t - std::floor(t + 0.5); }

double SpectralVector::a_norm() const noexcept {
  double sum = 0.0;
  for (const auto& [freq, c] : entries) sum += std::abs(c);
  return sum;
}

std::complex<double> SpectralVector::evaluate(double t) const noexcept {
  std::complex<double> sum;
  for (const auto& [freq, c] : entries) {
    const double arg = kTwoPi * torus_reduce(static_cast<double>(freq) * t);
    sum += c * std::complex<double>(std::cos(arg), std::sin(arg));
  }
  return sum;
}

double AtomicMeasure::total_variation() const noexcept {
  double sum = 0.0;
  for (const auto& [loc, w] : atoms) sum += std::abs(w);
  return sum;
}

TriangleKernel::TriangleKernel(double eps) : eps_(eps) {
  require(eps > 0 && eps < 0.5, "triangle: eps must lie in (0, 1/2)");
}

double TriangleKernel::operator()(double t) const noexcept {
  const double r = torus_distance(t);
  return r >= eps_ ? 0.0 : (1.0 - r / eps_) / eps_;
}

double TriangleKernel::coefficient(std::int64_t j) const noexcept {
  if (j == 0) return 1.0;
  const double x = std::numbers::pi * static_cast<double>(j) * eps_;
  const double s = std::sin(x) / x;
  return s * s;
}

SpectralVector TriangleKernel::coefficients(std::int64_t max_frequency) const {
  require(max_frequency >= 1, "triangle_coeffs: max frequency must be >= 1");
  SpectralVector v;
  for (std::int64_t j = -max_frequency; j <= max_frequency; ++j) v.entries.emplace(j, coefficient(j));
  return v;
}

double TriangleKernel::nonzero_coefficient_sum(std::int64_t max_frequency) const noexcept {
  double sum = 0.0;
  for (std::int64_t j = max_frequency; j >= 1; --j) sum += 2.0 * coefficient(j);
  return sum;
}

double log_cosine_sum(double t, std::int64_t N) {
  require(N >= 0, "log_cosine_sum: N must be >= 0");
  double sum = 0.0;
  for (std::int64_t n = 1; n <= N; ++n) {
    sum += std::cos(kTwoPi * torus_reduce(static_cast<double>(n) * t)) / static_cast<double>(n);
  }
  return sum;
}

std::vector<double> log_cosine_sums(double t, std::span<const std::int64_t> ladder) {
  std::vector<double> out;
  out.reserve(ladder.size());
  double sum = 0.0;
  std::int64_t n = 0;
  for (auto N : ladder) {
    require(N >= n, "log_cosine_sums: ladder must be nondecreasing");
    for (; n < N;) {
      ++n;
      sum += std::cos(kTwoPi * torus_reduce(static_cast<double>(n) * t)) / static_cast<double>(n);
    }
    out.push_back(sum);
  }
  return out;
}

std::vector<std::int64_t> default_log_sine_ladder() {
  std::vector<std::int64_t> ladder;
  for (std::int64_t N = 1; N <= 4096; N *= 2) ladder.push_back(N);
  return ladder;
}

double log_sine_bound_constant(std::int64_t resolution, std::span<const std::int64_t> ladder) {
  require(resolution >= 10'000, "log_sine_bound_constant: resolution must be >= 10^4");
  require(!ladder.empty(), "log_sine_bound_constant: empty ladder");
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 1; i < resolution; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(resolution);
    const double log_sin = std::log(std::sin(std::numbers::pi * t));
    // Rotation recurrence, resynchronized every 128 steps.
    const std::complex<double> step(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
    std::complex<double> z(1.0, 0.0);
    double sum = 0.0;
    std::int64_t n = 0;
    for (auto N : ladder) {
      while (n < N) {
        ++n;
        if (n % 128 == 0) {
          const double arg = kTwoPi * torus_reduce(static_cast<double>(n) * t);
          z = {std::cos(arg), std::sin(arg)};
        } else {
          z *= step;
        }
        sum += z.real() / static_cast<double>(n);
      }
      best = std::max(best, sum + log_sin);
    }
  }
  return best;
}

double log_sine_bound_constant(std::int64_t resolution) {
  const auto ladder = default_log_sine_ladder();
  return log_sine_bound_constant(resolution, ladder);
}

std::vector<PhasedAtom> apply_phase(const AtomicMeasure& measure, std::span<const double> phase) {
  require(phase.empty() || phase.size() == measure.atoms.size(), "apply_phase: one phase value per atom required");
  std::vector<PhasedAtom> out;
  out.reserve(measure.atoms.size());
  std::size_t i = 0;
  for (const auto& [loc, w] : measure.atoms) {
    const double psi = phase.empty() ? 0.0 : phase[i];
    out.push_back({loc, w * std::complex<double>(std::cos(psi), std::sin(psi))});
    ++i;
  }
  return out;
}

std::complex<double> measure_transform(std::span<const PhasedAtom> atoms, double theta) noexcept {
  std::complex<double> sum;
  for (const auto& a : atoms) {
    const double arg = -kTwoPi * torus_reduce(static_cast<double>(a.location) * theta);
    sum += a.weight * std::complex<double>(std::cos(arg), std::sin(arg));
  }
  return sum;
}

PmEstimate pm_norm_estimate(std::span<const PhasedAtom> atoms, const PmOptions& options) {
  PmEstimate est;
  if (atoms.empty()) return est;
  std::int64_t lo = atoms.front().location;
  std::int64_t hi = lo;
  for (const auto& a : atoms) {
    lo = std::min(lo, a.location);
    hi = std::max(hi, a.location);
  }
  const std::int64_t M = options.grid_size > 0 ? options.grid_size : 16 * (hi - lo + 1);
  require(M >= 2, "pm_norm_estimate: grid size must be >= 2");
  if (M > (std::int64_t{1} << 28)) throw CapacityError("pm_norm_estimate: grid size above 2^28");
  est.grid_size = M;

  const double centre = 0.5 * static_cast<double>(lo + hi);
  for (const auto& a : atoms) est.derivative_bound += kTwoPi * std::abs(static_cast<double>(a.location) - centre) * std::abs(a.weight);
  est.certified_radius = est.derivative_bound / (2.0 * static_cast<double>(M));

  FftBuffer fft(static_cast<std::size_t>(M));
  std::complex<double>* buf = fft.data();
  std::fill(buf, buf + M, std::complex<double>{});
  for (const auto& a : atoms) {
    std::int64_t k = a.location % M;
    if (k < 0) k += M;
    buf[k] += a.weight;
  }
  fft.execute();

  std::vector<double> mag(static_cast<std::size_t>(M));
  for (std::int64_t m = 0; m < M; ++m) mag[static_cast<std::size_t>(m)] = std::abs(buf[m]);
  const auto best_it = std::max_element(mag.begin(), mag.end());
  est.value = *best_it;
  est.argmax = static_cast<double>(best_it - mag.begin()) / static_cast<double>(M);
  if (!options.refine) return est;

  // Local maxima of the grid, best first.
  std::vector<std::int64_t> peaks;
  for (std::int64_t m = 0; m < M; ++m) {
    const double v = mag[static_cast<std::size_t>(m)];
    if (v >= mag[static_cast<std::size_t>((m + M - 1) % M)] && v >= mag[static_cast<std::size_t>((m + 1) % M)]) {
      peaks.push_back(m);
    }
  }
  const auto keep = std::min<std::size_t>(peaks.size(), static_cast<std::size_t>(std::max(1, options.refine_candidates)));
  std::partial_sort(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(keep), peaks.end(),
                    [&](std::int64_t a, std::int64_t b) {
                      return mag[static_cast<std::size_t>(a)] > mag[static_cast<std::size_t>(b)];
                    });
  const double width = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < keep; ++i) {
    const double theta0 = static_cast<double>(peaks[i]) * width;
    const Peak peak = refine_peak(atoms, lo, theta0, width);
    if (peak.value > est.value) {
      est.value = peak.value;
      est.argmax = peak.theta - std::floor(peak.theta);
    }
  }
  return est;
}

PmEstimate pm_norm_estimate(const AtomicMeasure& measure, std::span<const double> phase, const PmOptions& options) {
  const auto atoms = apply_phase(measure, phase);
  return pm_norm_estimate(atoms, options);
}

std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> input) {
  require(!input.empty(), "forward_dft: empty input");
  FftBuffer fft(input.size());
  std::copy(input.begin(), input.end(), fft.data());
  fft.execute();
  return {fft.data(), fft.data() + input.size()};
}

}  // namespace bohrlab
