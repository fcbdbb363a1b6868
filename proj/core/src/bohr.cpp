#include "bohrlab/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bohrlab/errors.hpp"
#include "bohrlab/parallel.hpp"
#include "bohrlab/rng.hpp"

namespace bohrlab {
namespace {

bool in_box(std::int64_t n, std::span<const TorusPoint> t, std::span<const Arc> box) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!box[i].contains(t[i].multiple(n))) return false;
  return true;
}

void check_ladder(std::span<const std::int64_t> ladder, std::int64_t horizon, const char* what) {
  require(!ladder.empty(), std::string(what) + ": empty ladder");
  require(ladder.front() >= 1 && std::is_sorted(ladder.begin(), ladder.end()),
          std::string(what) + ": ladder must be positive and nondecreasing");
  require(ladder.back() <= horizon, std::string(what) + ": ladder exceeds the horizon");
}

double circle_distance(double x, double y) { return torus_distance(x - y); }

MinorantApproximation approximate_minorant(const Arc& inner, int k) {
  const double half = inner.length / 2;
  const double centre = inner.start + half;
  const TriangleKernel shape(std::min(half, 0.499999));
  MinorantApproximation out;
  for (int j = -k; j <= k; ++j) {
    const double angle = -2 * std::numbers::pi * j * centre;
    out.coefficients.entries[j] = half * shape.coefficient(j) * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  constexpr int kSamples = 4096;
  for (int i = 0; i < kSamples; ++i) {
    const double x = (i + 0.5) / kSamples;
    const double tent = std::max(0.0, 1.0 - circle_distance(x, centre) / half);
    out.sup_error = std::max(out.sup_error, std::abs(out.coefficients.evaluate(x).real() - tent));
  }
  return out;
}

// exp(-alpha * sum 1/n over n <= N with {n t} in J), for a single N.
double miss_probability_at(double t, double alpha, const Arc& inner, std::int64_t N) {
  double x = 0.0;
  double sum = 0.0;
  for (std::int64_t n = 1; n <= N; ++n) {
    x += t;
    if (x >= 1.0) x -= 1.0;
    if (inner.contains(x)) sum += 1.0 / static_cast<double>(n);
  }
  return std::exp(-alpha * sum);
}

}  // namespace

OrbitReport multidim_orbit_hit(const RandomSet& set, std::span<const TorusPoint> t, std::span<const Arc> box,
                               std::int64_t N) {
  require(!t.empty(), "orbit: generator must have at least one coordinate");
  require(t.size() == box.size(), "orbit: generator and box dimensions differ");
  require(N >= 0 && N <= set.horizon(), "orbit: N must lie in [0, horizon]");
  OrbitReport report;
  report.generator.assign(t.begin(), t.end());
  report.box.assign(box.begin(), box.end());
  report.N = N;
  for (const auto& m : set.members()) {
    if (m.n > N) break;
    if (!in_box(m.n, t, box)) continue;
    if (!report.first_hit) report.first_hit = m.n;
    ++report.hit_count;
  }
  return report;
}

OrbitReport orbit_hit(const RandomSet& set, const TorusPoint& t, const Arc& interval, std::int64_t N) {
  return multidim_orbit_hit(set, std::span(&t, 1), std::span(&interval, 1), N);
}

std::vector<HitPoint> hit_probability(const WeightSequence& w, const TorusPoint& t, const Arc& interval,
                                      std::span<const std::int64_t> ladder, std::int64_t trials,
                                      std::uint64_t master_seed, unsigned workers) {
  require(trials >= 100, "hit probability: at least 100 trials required");
  check_ladder(ladder, w.horizon(), "hit probability");
  const std::int64_t N_max = ladder.back();
  // Sites whose orbit point lies in I do not depend on the trial.
  std::vector<std::int64_t> candidates;
  for (std::int64_t n = 1; n <= N_max; ++n)
    if (interval.contains(t.multiple(n))) candidates.push_back(n);

  std::vector<std::int64_t> first(static_cast<std::size_t>(trials), 0);
  parallel_for(first.size(), workers, [&](std::size_t i) {
    const std::uint64_t seed = seed_stream(master_seed, i);
    for (const std::int64_t n : candidates) {
      if (site_selected(w, seed, n)) {
        first[i] = n;
        return;
      }
    }
  });

  std::vector<HitPoint> out;
  for (const std::int64_t N : ladder) {
    HitPoint p;
    p.N = N;
    p.trials = trials;
    p.hits = std::count_if(first.begin(), first.end(), [N](std::int64_t f) { return f > 0 && f <= N; });
    p.estimate = static_cast<double>(p.hits) / static_cast<double>(trials);
    p.ci = wilson_interval(p.hits, trials);
    out.push_back(p);
  }
  return out;
}

bool BohrNeighborhood::contains(std::int64_t n) const {
  for (const auto& c : constraints) {
    const double angle = 2 * std::numbers::pi * c.tau.multiple(n);
    if (std::abs(std::complex<double>(std::cos(angle), std::sin(angle)) - c.zeta) >= c.eta) return false;
  }
  return true;
}

BohrNeighborhood planted_neighborhood(std::int64_t n0, std::span<const TorusPoint> taus, double eta) {
  require(eta > 0, "neighborhood: eta must be positive");
  BohrNeighborhood U;
  for (const auto& tau : taus) {
    const double angle = 2 * std::numbers::pi * tau.multiple(n0);
    U.constraints.push_back({tau, {std::cos(angle), std::sin(angle)}, eta});
  }
  return U;
}

std::optional<std::int64_t> bohr_neighborhood_hit(const RandomSet& set, const BohrNeighborhood& U, std::int64_t N) {
  require(!U.constraints.empty(), "neighborhood: at least one constraint required");
  for (const auto& c : U.constraints) {
    require(c.eta > 0, "neighborhood: eta must be positive");
    require(std::abs(std::abs(c.zeta) - 1.0) < 1e-9, "neighborhood: zeta must be unimodular");
  }
  require(N >= 0 && N <= set.horizon(), "neighborhood: N must lie in [0, horizon]");
  for (const auto& m : set.members()) {
    if (m.n > N) break;
    if (U.contains(m.n)) return m.n;
  }
  return std::nullopt;
}

bool in_open_set(double t, int k, double delta) noexcept {
  for (int j = 1; j <= k; ++j)
    if (std::abs(std::sin(std::numbers::pi * j * t)) <= delta) return false;
  return true;
}

std::vector<double> miss_probability(double t, double alpha, const Arc& inner, std::span<const std::int64_t> ladder) {
  std::vector<double> out;
  out.reserve(ladder.size());
  double x = 0.0;
  double sum = 0.0;
  std::int64_t n = 0;
  for (const std::int64_t N : ladder) {
    for (; n < N; ) {
      ++n;
      x += t;
      if (x >= 1.0) x -= 1.0;
      if (inner.contains(x)) sum += 1.0 / static_cast<double>(n);
    }
    out.push_back(std::exp(-alpha * sum));
  }
  return out;
}

GridProcedureReport grid_procedure(const GridProcedureParams& p) {
  require(p.alpha > 0, "grid procedure: alpha must be positive");
  require(p.interval.length > 0 && p.interval.length < 1, "grid procedure: interval length must lie in (0, 1)");
  require(p.alpha * p.interval.length > 1, "grid procedure: requires alpha |I| > 1");
  require(p.d > 0 && p.d < p.interval.length / 2, "grid procedure: d must lie in (0, |I|/2)");
  require(p.k >= 1, "grid procedure: k must be >= 1");
  require(p.delta > 0 && p.delta < 0.5, "grid procedure: delta must lie in (0, 1/2)");
  require(p.trials >= 100, "grid procedure: at least 100 trials required");
  require(p.offset_candidates >= 1, "grid procedure: need at least one offset candidate");
  check_ladder(p.ladder, kMaxHorizon, "grid procedure");
  require(p.ladder.size() >= 2, "grid procedure: the fit needs at least two ladder points");

  GridProcedureReport report;
  report.params = p;
  report.inner = Arc::make(p.interval.start + p.d, p.interval.length - 2 * p.d);
  report.minorant = approximate_minorant(report.inner, p.k);

  // Integral over G: one stratified t per stratum, each contributing its exact miss probability.
  const auto strata = static_cast<std::size_t>(p.trials);
  std::vector<std::vector<double>> values(strata);
  std::vector<char> inside(strata);
  parallel_for(strata, p.workers, [&](std::size_t i) {
    SiteRng rng(p.master_seed, i);
    const double t = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(strata);
    inside[i] = in_open_set(t, p.k, p.delta);
    values[i] = inside[i] ? miss_probability(t, p.alpha, report.inner, p.ladder)
                          : std::vector<double>(p.ladder.size(), 0.0);
  });
  report.g_measure = static_cast<double>(std::count(inside.begin(), inside.end(), 1)) / static_cast<double>(strata);

  const double floor_value = 1.0 / (2.0 * static_cast<double>(p.trials));
  std::vector<double> log_n, log_est;
  for (std::size_t l = 0; l < p.ladder.size(); ++l) {
    RunningMoments acc;
    for (std::size_t i = 0; i < strata; ++i) acc.add(values[i][l]);
    GridLadderPoint pt;
    pt.N = p.ladder[l];
    pt.M = static_cast<std::int64_t>(std::ceil(static_cast<double>(pt.N) / p.d));
    pt.integral_estimate = acc.mean();
    pt.integral_stderr = acc.stderr_of_mean();
    pt.clamped_estimate = pt.integral_estimate > 0 ? pt.integral_estimate : floor_value;
    log_n.push_back(std::log(static_cast<double>(pt.N)));
    log_est.push_back(std::log(pt.clamped_estimate));
    report.ladder.push_back(pt);
  }
  const auto fit = fit_line(log_n, log_est);
  report.beta_hat = -fit.slope;
  report.r_squared = fit.r_squared;

  // Grid sums over theta + m/M for the candidate and the random offsets.
  const auto C = static_cast<std::size_t>(p.offset_candidates);
  const std::uint64_t offset_seed = seed_stream(p.master_seed, 0x0FF5E7);
  for (auto& pt : report.ladder) {
    pt.scaled_bound = static_cast<double>(pt.M) * std::pow(static_cast<double>(pt.N), -report.beta_hat);
    const double cost = static_cast<double>(pt.M) * static_cast<double>(pt.N) * 2.0 * static_cast<double>(C);
    if (cost > p.grid_budget) continue;
    const double inv_m = 1.0 / static_cast<double>(pt.M);
    std::vector<double> offsets(2 * C);
    for (std::size_t c = 0; c < C; ++c) offsets[c] = static_cast<double>(c) * inv_m / static_cast<double>(C);
    SiteRng rng(offset_seed, static_cast<std::uint64_t>(pt.N));
    for (std::size_t c = 0; c < C; ++c) offsets[C + c] = rng.uniform() * inv_m;
    std::vector<double> sums(2 * C, 0.0);
    std::vector<std::int64_t> in_g(2 * C, 0);
    parallel_for(2 * C, p.workers, [&](std::size_t c) {
      double s = 0.0;
      std::int64_t count = 0;
      for (std::int64_t m = 0; m < pt.M; ++m) {
        const double t = offsets[c] + static_cast<double>(m) * inv_m;
        if (!in_open_set(t, p.k, p.delta)) continue;
        ++count;
        s += miss_probability_at(t, p.alpha, report.inner, pt.N);
      }
      sums[c] = s;
      in_g[c] = count;
    });
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (sums[c] < sums[best]) best = c;
    double random_total = 0.0;
    for (std::size_t c = C; c < 2 * C; ++c) random_total += sums[c];
    pt.grid_evaluated = true;
    pt.theta = offsets[best];
    pt.grid_sum = sums[best];
    pt.grid_points_in_g = in_g[best];
    pt.random_offset_mean = random_total / static_cast<double>(C);
  }
  report.spacing = 1.0 / static_cast<double>(report.ladder.back().M);
  report.covering_ok = report.spacing <= p.d;
  return report;
}

}  // namespace bohrlab
