#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace bohrlab {

/// Representative of t in [-1/2, 1/2).
double torus_reduce(double t) noexcept;

/// Distance from t to the nearest integer.
inline double torus_distance(double t) noexcept {
  const double r = torus_reduce(t);
  return r < 0 ? -r : r;
}

/// Finitely supported frequency -> coefficient map.
struct SpectralVector {
  std::map<std::int64_t, std::complex<double>> entries;

  /// Sum of |coefficients|.
  double a_norm() const noexcept;
  /// sum_j c_j e^{2 pi i j t}
  std::complex<double> evaluate(double t) const noexcept;
};

/// Nonnegative point masses on the integers.
struct AtomicMeasure {
  std::map<std::int64_t, double> atoms;

  double total_variation() const noexcept;
  bool empty() const noexcept { return atoms.empty(); }
};

/// Triangle of integral 1 supported on [-eps, eps] (mod 1).
class TriangleKernel {
 public:
  /// Requires 0 < eps < 1/2.
  explicit TriangleKernel(double eps);

  double eps() const noexcept { return eps_; }
  /// (1/eps) * max(0, 1 - |t~|/eps), t~ the representative in [-1/2, 1/2).
  double operator()(double t) const noexcept;
  /// (sin(pi j eps) / (pi j eps))^2, and 1 at j = 0.
  double coefficient(std::int64_t j) const noexcept;
  /// Coefficients for |j| <= max_frequency.
  SpectralVector coefficients(std::int64_t max_frequency) const;
  /// sum_{0 < |j| <= J} coefficient(j), which tends to 1/eps - 1.
  double nonzero_coefficient_sum(std::int64_t max_frequency) const noexcept;

 private:
  double eps_;
};

/// L_N(t) = sum_{n=1}^N cos(2 pi n t) / n.
double log_cosine_sum(double t, std::int64_t N);

/// L_N(t) for every N in an increasing ladder, one pass over n.
std::vector<double> log_cosine_sums(double t, std::span<const std::int64_t> ladder);

/// Default ladder 1, 2, 4, ..., 4096.
std::vector<std::int64_t> default_log_sine_ladder();

/// Smallest C with L_N(t) <= log(1/|sin pi t|) + C over the grid t = i/resolution
/// (0 < i < resolution) and all N in the ladder. Requires resolution >= 10^4.
double log_sine_bound_constant(std::int64_t resolution, std::span<const std::int64_t> ladder);
double log_sine_bound_constant(std::int64_t resolution);

/// Integer location carrying a complex weight (a measure times a phase).
struct PhasedAtom {
  std::int64_t location = 0;
  std::complex<double> weight;
};

std::vector<PhasedAtom> apply_phase(const AtomicMeasure& measure, std::span<const double> phase);

struct PmOptions {
  /// Number of equispaced theta in [0, 1); 0 selects 16 * (span of locations + 1).
  std::int64_t grid_size = 0;
  /// Local Newton refinement around the best grid maxima.
  bool refine = true;
  /// Number of grid local maxima refined.
  int refine_candidates = 4;
};

struct PmEstimate {
  double value = 0.0;             ///< lower bound on sup_theta |F(theta)|
  std::int64_t grid_size = 0;
  double argmax = 0.0;            ///< theta achieving value
  double derivative_bound = 0.0;  ///< Lipschitz constant of |F|
  double certified_radius = 0.0;  ///< sup <= grid maximum + certified_radius
};

/// sup over theta in [0, 1) of |F(theta)|, F(theta) = sum_n c_n e^{-2 pi i n theta}.
///
/// The transform is 1-periodic because the locations are integers. It is
/// evaluated exactly on the grid by an FFT of the folded coefficients; the
/// best grid maxima are then refined by safeguarded Newton steps on |F|^2.
PmEstimate pm_norm_estimate(std::span<const PhasedAtom> atoms, const PmOptions& options = {});

/// Measure times e^{i phase}, phase given at the atoms in increasing location order.
PmEstimate pm_norm_estimate(const AtomicMeasure& measure, std::span<const double> phase,
                            const PmOptions& options = {});

/// Exact transform at one theta.
std::complex<double> measure_transform(std::span<const PhasedAtom> atoms, double theta) noexcept;

/// Unnormalized forward DFT, X_k = sum_j x_j e^{-2 pi i jk/n}.
std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> input);

}  // namespace bohrlab
