#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bohrlab/fourier.hpp"
#include "bohrlab/sampler.hpp"
#include "bohrlab/stats.hpp"
#include "bohrlab/torus.hpp"
#include "bohrlab/weights.hpp"

namespace bohrlab {

struct OrbitReport {
  std::vector<TorusPoint> generator;  ///< t (one coordinate per dimension)
  std::vector<Arc> box;               ///< I, or a product of arcs
  std::int64_t N = 0;
  std::optional<std::int64_t> first_hit;
  std::int64_t hit_count = 0;
};

/// Members n <= N of the set with {n t} in I.
OrbitReport orbit_hit(const RandomSet& set, const TorusPoint& t, const Arc& interval, std::int64_t N);

/// Members n <= N with ({n t_1}, ..., {n t_s}) in the product of arcs.
OrbitReport multidim_orbit_hit(const RandomSet& set, std::span<const TorusPoint> t, std::span<const Arc> box,
                               std::int64_t N);

struct HitPoint {
  std::int64_t N = 0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  Interval ci;  ///< 95% Wilson interval
};

/// P(Lambda_N t meets I) along an increasing ladder of N.
///
/// Trial i draws Lambda with seed seed_stream(master_seed, i). The first hit
/// of each trial is located once, so the ladder is monotone in N by
/// construction. Requires trials >= 100 and ladder.back() <= w.horizon().
std::vector<HitPoint> hit_probability(const WeightSequence& w, const TorusPoint& t, const Arc& interval,
                                      std::span<const std::int64_t> ladder, std::int64_t trials,
                                      std::uint64_t master_seed, unsigned workers = 1);

/// |e^{2 pi i n tau} - zeta| < eta.
struct BohrConstraint {
  TorusPoint tau;
  std::complex<double> zeta{1.0, 0.0};
  double eta = 0.5;
};

struct BohrNeighborhood {
  std::vector<BohrConstraint> constraints;
  bool contains(std::int64_t n) const;
};

/// Neighborhood of the character n0: zeta_i = e^{2 pi i n0 tau_i}.
BohrNeighborhood planted_neighborhood(std::int64_t n0, std::span<const TorusPoint> taus, double eta);

/// First member n <= N lying in U. Requires at least one constraint.
std::optional<std::int64_t> bohr_neighborhood_hit(const RandomSet& set, const BohrNeighborhood& U, std::int64_t N);

struct GridProcedureParams {
  double alpha = 4.0;
  Arc interval{0.25, 0.5};
  double d = 0.05;
  int k = 4;
  double delta = 0.05;
  std::vector<std::int64_t> ladder{100, 1000, 10000};
  std::int64_t trials = 16384;  ///< strata for the integral over t
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  int offset_candidates = 64;
  /// Grid sums are evaluated at ladder points with M * N * 2 * candidates <= budget.
  double grid_budget = 3e9;
};

/// Triangle minorant of the indicator of J and its degree-k Fourier partial sum.
struct MinorantApproximation {
  SpectralVector coefficients;  ///< frequencies |j| <= k
  double sup_error = 0.0;       ///< max over a grid of |partial sum - minorant|
};

struct GridLadderPoint {
  std::int64_t N = 0;
  std::int64_t M = 0;                ///< ceil(N / d)
  double integral_estimate = 0.0;    ///< int_G P(Lambda_N t misses J) dt
  double integral_stderr = 0.0;
  double clamped_estimate = 0.0;     ///< estimate, or 1/(2 trials) when it is exactly zero; used in the fit
  double scaled_bound = 0.0;         ///< M * N^{-beta_hat}
  bool grid_evaluated = false;
  double theta = 0.0;                ///< chosen offset
  double grid_sum = 0.0;             ///< sum over theta + m/M in G of P(...)
  double random_offset_mean = 0.0;   ///< mean grid sum over random offsets
  std::int64_t grid_points_in_g = 0;
};

struct GridProcedureReport {
  GridProcedureParams params;
  Arc inner;                       ///< J
  MinorantApproximation minorant;
  double g_measure = 0.0;          ///< Lebesgue measure of G (grid estimate)
  std::vector<GridLadderPoint> ladder;
  double beta_hat = 0.0;
  double r_squared = 0.0;
  double spacing = 0.0;            ///< 1/M at the largest N
  bool covering_ok = false;        ///< spacing <= d
};

/// t in G, i.e. |sin(pi j t)| > delta for all 1 <= j <= k.
bool in_open_set(double t, int k, double delta) noexcept;

/// exp(-alpha * sum_{n <= N, {nt} in J} 1/n) at every ladder N: the exact
/// probability, given t, that a harmonic(alpha) sample misses J along nt.
std::vector<double> miss_probability(double t, double alpha, const Arc& inner, std::span<const std::int64_t> ladder);

GridProcedureReport grid_procedure(const GridProcedureParams& params);

}  // namespace bohrlab
