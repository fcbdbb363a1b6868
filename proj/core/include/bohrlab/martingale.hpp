#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bohrlab/fourier.hpp"
#include "bohrlab/sampler.hpp"
#include "bohrlab/torus.hpp"

namespace bohrlab {

/// Parameters shared by the martingale computations.
///
/// The martingale is
///   Y_N = int_I prod_{n <= N} f(nt)^{xi_n} exp(-(alpha/n) (f(nt) - 1)) dt
/// with f the triangle kernel of half-width eps. Quadrature is the midpoint
/// rule on I; `step` is an upper bound on the node spacing and 0 selects
/// eps / (8 N) for the largest N involved. Coarser steps are rejected.
struct MartingaleParams {
  double alpha = 0.05;
  double eps = 0.3;
  Arc interval{0.25, 0.1};
  double step = 0.0;
};

struct MartingaleTrace {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> values;
  MartingaleParams params;
  double step = 0.0;  ///< node spacing actually used
  std::int64_t nodes = 0;
};

/// Midpoint nodes on an arc for a requested maximal spacing.
struct ArcQuadrature {
  std::vector<double> nodes;
  double step = 0.0;
};
ArcQuadrature arc_quadrature(const Arc& interval, double max_step);

/// Largest admissible step for horizon N: eps / (8 N).
double max_martingale_step(double eps, std::int64_t N) noexcept;

/// Evaluates Y_N at fixed checkpoints for many realizations.
///
/// The compensator depends only on (alpha, eps, I, N), so it is tabulated
/// once per checkpoint; each realization then costs one pass over the nodes
/// per member and per checkpoint.
class MartingaleEvaluator {
 public:
  MartingaleEvaluator(const MartingaleParams& params, std::vector<std::int64_t> checkpoints);

  /// Requires set.horizon() >= the largest checkpoint.
  MartingaleTrace trace(const RandomSet& set) const;

  const std::vector<std::int64_t>& checkpoints() const noexcept { return checkpoints_; }
  double step() const noexcept { return quad_.step; }
  std::int64_t nodes() const noexcept { return static_cast<std::int64_t>(quad_.nodes.size()); }

 private:
  MartingaleParams params_;
  std::vector<std::int64_t> checkpoints_;
  ArcQuadrature quad_;
  TriangleKernel kernel_;
  std::vector<std::vector<double>> compensator_;  // [checkpoint][node]
};

MartingaleTrace y_trace(const RandomSet& set, const MartingaleParams& params,
                        std::vector<std::int64_t> checkpoints);

struct MomentEstimate {
  std::int64_t N = 0;
  std::int64_t seeds = 0;
  double target = 0.0;         ///< |I|
  double mean = 0.0;
  double mean_stderr = 0.0;
  double second_moment = 0.0;  ///< Monte Carlo E[Y_N^2]
  double second_stderr = 0.0;
  double z_score = 0.0;        ///< (mean - |I|) / stderr, 0 when stderr = 0
  double step = 0.0;
};

/// Monte Carlo moments of Y_N over Poisson samples of harmonic(alpha) weights,
/// trial i using seed_stream(master_seed, i).
MomentEstimate mean_identity_check(const MartingaleParams& params, std::int64_t N, std::int64_t seeds,
                                   std::uint64_t master_seed, unsigned workers = 1);

enum class SecondMomentMethod {
  factorized,  ///< exponent sum_n (alpha/n) g(ns) g(nt) with g the degree-J series of f - 1
  direct,      ///< exponent sum_{jk != 0} alpha fj fk L_N(js + kt); cost grows like J^2 N
  untruncated, ///< g = f - 1 exactly (the J -> infinity limit)
};

struct SecondMomentOptions {
  /// 0 selects ceil(40 / eps).
  std::int64_t max_frequency = 0;
  SecondMomentMethod method = SecondMomentMethod::factorized;
  unsigned workers = 1;
};

struct SecondMomentValue {
  std::int64_t N = 0;
  double value = 0.0;
  std::int64_t max_frequency = 0;
  double truncated_sum = 0.0;   ///< sum over 0 < |j|,|k| <= J of fj fk
  double closed_form_sum = 0.0; ///< (1/eps - 1)^2
  double step = 0.0;
};

/// E[Y_N^2] = int_{IxI} exp sum_{jk != 0} alpha fj fk L_N(js + kt) ds dt by 2-D midpoint quadrature.
SecondMomentValue second_moment_exact(const MartingaleParams& params, std::int64_t N,
                                      const SecondMomentOptions& options = {});

/// second_moment_exact along an increasing ladder on one common grid (step set by the largest N).
std::vector<SecondMomentValue> second_moment_ladder(const MartingaleParams& params,
                                                    std::span<const std::int64_t> ladder,
                                                    const SecondMomentOptions& options = {});

struct SecondMomentBound {
  double condition_sum = 0.0;  ///< S = (1/eps - 1)^2
  double alpha_s = 0.0;
  bool condition = false;      ///< alpha * S < 1
  double constant = 0.0;       ///< C in L_N(t) <= log(1/|sin pi t|) + C
  double sine_integral = 0.0;  ///< int_0^1 |sin pi t|^{-alpha S} dt
  double bound_value = 0.0;    ///< e^{alpha S C} * sine_integral, +inf without the condition
};

SecondMomentBound second_moment_bound(double alpha, double eps, double C);

/// int_0^1 |sin pi t|^{-p} dt for 0 <= p < 1.
double sine_power_integral(double p);

struct Witness {
  double t = 0.0;
  std::int64_t exception_count = 0;
};

/// #{n in set, n <= N : ||n t|| > eps}.
std::int64_t exception_count(const RandomSet& set, const TorusPoint& t, double eps, std::int64_t N);
std::int64_t exception_count(const RandomSet& set, double t, double eps, std::int64_t N);

/// Exception counts on the grid t = (i + 1/2) / grid_size, best `keep` first
/// (ties by t). Requires grid_size >= N.
std::vector<Witness> nondensity_witness_search(const RandomSet& set, double eps, std::int64_t N,
                                               std::int64_t grid_size, std::size_t keep = 10,
                                               unsigned workers = 1);

}  // namespace bohrlab
