#include "bohrlab/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bohrlab/errors.hpp"
#include "int128.hpp"
#include "bohrlab/parallel.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/stats.hpp"
#include "bohrlab/weights.hpp"

namespace bohrlab {
namespace {

void check_params(const MartingaleParams& p) {
  require(p.alpha > 0 && std::isfinite(p.alpha), "martingale: alpha must be positive");
  require(p.eps > 0 && p.eps < 0.5, "martingale: eps must lie in (0, 1/2)");
  require(p.interval.length > 0 && p.interval.length <= 1, "martingale: interval length must lie in (0, 1]");
  require(p.step >= 0, "martingale: step must be >= 0");
}

double resolve_step(const MartingaleParams& p, std::int64_t N_max) {
  const double limit = max_martingale_step(p.eps, N_max);
  if (p.step == 0.0) return limit;
  require(p.step <= limit * (1 + 1e-12), "martingale: quadrature step " + std::to_string(p.step) +
                                              " is coarser than eps/(8N) = " + std::to_string(limit));
  return p.step;
}

std::int64_t resolve_frequency(double eps, std::int64_t J) {
  require(J >= 0, "second moment: max frequency must be >= 0");
  return J > 0 ? J : static_cast<std::int64_t>(std::ceil(40.0 / eps));
}

// g(x) = 2 sum_{j<=J} fj cos(2 pi j x), evaluated by rotating a unit phasor.
double truncated_kernel_minus_one(std::span<const double> fhat, double x) {
  const double theta = 2 * std::numbers::pi * torus_reduce(x);
  const std::complex<double> rot(std::cos(theta), std::sin(theta));
  std::complex<double> z = rot;
  double sum = 0.0;
  for (std::size_t j = 1; j < fhat.size(); ++j) {
    sum += fhat[j] * z.real();
    z *= rot;
    if ((j & 63) == 0) z /= std::abs(z);
  }
  return 2 * sum;
}

}  // namespace

double max_martingale_step(double eps, std::int64_t N) noexcept {
  return N > 0 ? eps / (8.0 * static_cast<double>(N)) : eps / 8.0;
}

ArcQuadrature arc_quadrature(const Arc& interval, double max_step) {
  require(max_step > 0, "quadrature: step must be positive");
  const double K = std::ceil(interval.length / max_step - 1e-9);
  if (K > 5e7) throw CapacityError("quadrature: more than 5e7 nodes requested");
  const auto count = std::max<std::int64_t>(1, static_cast<std::int64_t>(K));
  ArcQuadrature q;
  q.step = interval.length / static_cast<double>(count);
  q.nodes.resize(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    q.nodes[static_cast<std::size_t>(i)] = interval.start + (static_cast<double>(i) + 0.5) * q.step;
  return q;
}

MartingaleEvaluator::MartingaleEvaluator(const MartingaleParams& params, std::vector<std::int64_t> checkpoints)
    : params_(params), checkpoints_(std::move(checkpoints)), kernel_(params.eps) {
  check_params(params_);
  require(!checkpoints_.empty(), "y_trace: no checkpoints");
  require(std::is_sorted(checkpoints_.begin(), checkpoints_.end()) && checkpoints_.front() >= 0,
          "y_trace: checkpoints must be nonnegative and nondecreasing");
  const std::int64_t N_max = checkpoints_.back();
  quad_ = arc_quadrature(params_.interval, resolve_step(params_, N_max));

  const std::size_t K = quad_.nodes.size();
  std::vector<double> log_comp(K, 0.0);
  compensator_.reserve(checkpoints_.size());
  std::int64_t n = 1;
  for (const std::int64_t N : checkpoints_) {
    for (; n <= N; ++n) {
      const double rate = params_.alpha / static_cast<double>(n);
      const double dn = static_cast<double>(n);
      for (std::size_t i = 0; i < K; ++i) log_comp[i] -= rate * (kernel_(dn * quad_.nodes[i]) - 1.0);
    }
    std::vector<double> comp(K);
    for (std::size_t i = 0; i < K; ++i) comp[i] = std::exp(log_comp[i]);
    compensator_.push_back(std::move(comp));
  }
}

MartingaleTrace MartingaleEvaluator::trace(const RandomSet& set) const {
  require(set.horizon() >= checkpoints_.back(), "y_trace: checkpoint exceeds the sample horizon");
  MartingaleTrace out;
  out.checkpoints = checkpoints_;
  out.params = params_;
  out.step = quad_.step;
  out.nodes = nodes();
  out.values.reserve(checkpoints_.size());

  const std::size_t K = quad_.nodes.size();
  std::vector<double> product(K, 1.0);
  const auto members = set.members();
  std::size_t next = 0;
  bool absorbed = false;
  for (std::size_t c = 0; c < checkpoints_.size(); ++c) {
    const std::int64_t N = checkpoints_[c];
    for (; !absorbed && next < members.size() && members[next].n <= N; ++next) {
      const double dn = static_cast<double>(members[next].n);
      const auto xi = static_cast<int>(members[next].multiplicity);
      bool alive = false;
      for (std::size_t i = 0; i < K; ++i) {
        if (product[i] == 0.0) continue;
        product[i] *= std::pow(kernel_(dn * quad_.nodes[i]), xi);
        alive = alive || product[i] != 0.0;
      }
      absorbed = !alive;
    }
    if (absorbed) {
      out.values.push_back(0.0);
      continue;
    }
    double sum = 0.0;
    const auto& comp = compensator_[c];
    for (std::size_t i = 0; i < K; ++i) sum += product[i] * comp[i];
    out.values.push_back(sum * quad_.step);
  }
  return out;
}

MartingaleTrace y_trace(const RandomSet& set, const MartingaleParams& params, std::vector<std::int64_t> checkpoints) {
  return MartingaleEvaluator(params, std::move(checkpoints)).trace(set);
}

MomentEstimate mean_identity_check(const MartingaleParams& params, std::int64_t N, std::int64_t seeds,
                                   std::uint64_t master_seed, unsigned workers) {
  check_params(params);
  require(N >= 0, "mean identity: N must be >= 0");
  require(seeds >= 1, "mean identity: need at least one seed");
  MomentEstimate est;
  est.N = N;
  est.seeds = seeds;
  est.target = params.interval.length;
  if (N == 0) {
    est.mean = est.target;
    est.second_moment = est.target * est.target;
    est.step = resolve_step(params, 0);
    return est;
  }
  const MartingaleEvaluator evaluator(params, {N});
  const auto w = WeightSequence::make(Harmonic{params.alpha}, N);
  std::vector<double> y(static_cast<std::size_t>(seeds));
  parallel_for(y.size(), workers, [&](std::size_t i) {
    const auto set = sample_poisson(w, seed_stream(master_seed, i));
    y[i] = evaluator.trace(set).values.back();
  });
  RunningMoments first, second;
  for (const double v : y) {
    first.add(v);
    second.add(v * v);
  }
  est.mean = first.mean();
  est.mean_stderr = first.stderr_of_mean();
  est.second_moment = second.mean();
  est.second_stderr = second.stderr_of_mean();
  est.z_score = est.mean_stderr > 0 ? (est.mean - est.target) / est.mean_stderr : 0.0;
  est.step = evaluator.step();
  return est;
}

std::vector<SecondMomentValue> second_moment_ladder(const MartingaleParams& params,
                                                    std::span<const std::int64_t> ladder,
                                                    const SecondMomentOptions& options) {
  check_params(params);
  require(!ladder.empty(), "second moment: empty ladder");
  require(std::is_sorted(ladder.begin(), ladder.end()) && ladder.front() >= 0,
          "second moment: ladder must be nonnegative and nondecreasing");
  const std::int64_t N_max = ladder.back();
  const auto quad = arc_quadrature(params.interval, resolve_step(params, N_max));
  const std::size_t K = quad.nodes.size();
  if (static_cast<double>(K) * static_cast<double>(K) > 4e8)
    throw CapacityError("second moment: " + std::to_string(K) + " nodes per axis exceed the 2-D budget");

  const TriangleKernel kernel(params.eps);
  const std::int64_t J = resolve_frequency(params.eps, options.max_frequency);
  std::vector<double> fhat(static_cast<std::size_t>(J) + 1);
  for (std::int64_t j = 0; j <= J; ++j) fhat[static_cast<std::size_t>(j)] = kernel.coefficient(j);
  const double coefficient_sum = kernel.nonzero_coefficient_sum(J);
  const double closed = std::pow(1.0 / params.eps - 1.0, 2);

  // exponent[i][j] accumulates over n; ladder snapshots integrate exp(exponent).
  std::vector<double> exponent(K * K, 0.0);
  std::vector<double> g(K);
  std::vector<SecondMomentValue> out;
  out.reserve(ladder.size());
  const unsigned workers = std::max(1u, options.workers);

  auto snapshot = [&](std::int64_t N) {
    std::vector<double> row_sum(K);
    parallel_for(K, workers, [&](std::size_t i) {
      double s = 0.0;
      for (std::size_t j = 0; j < K; ++j) s += std::exp(exponent[i * K + j]);
      row_sum[i] = s;
    });
    double total = 0.0;
    for (const double s : row_sum) total += s;
    SecondMomentValue v;
    v.N = N;
    v.value = total * quad.step * quad.step;
    v.max_frequency = options.method == SecondMomentMethod::untruncated ? 0 : J;
    v.truncated_sum = coefficient_sum * coefficient_sum;
    v.closed_form_sum = closed;
    v.step = quad.step;
    out.push_back(v);
  };

  std::size_t next = 0;
  while (next < ladder.size() && ladder[next] == 0) snapshot(ladder[next++]);
  for (std::int64_t n = 1; n <= N_max && next < ladder.size(); ++n) {
    const double rate = params.alpha / static_cast<double>(n);
    const double dn = static_cast<double>(n);
    if (options.method == SecondMomentMethod::direct) {
      // sum_{j,k != 0} fj fk cos(2 pi n (j s + k t)) over |j|,|k| <= J.
      parallel_for(K, workers, [&](std::size_t i) {
        for (std::size_t l = 0; l < K; ++l) {
          double acc = 0.0;
          for (std::int64_t j = -J; j <= J; ++j) {
            if (j == 0) continue;
            const double fj = fhat[static_cast<std::size_t>(std::abs(j))];
            for (std::int64_t k = -J; k <= J; ++k) {
              if (k == 0) continue;
              const double x = static_cast<double>(j) * quad.nodes[i] + static_cast<double>(k) * quad.nodes[l];
              acc += fj * fhat[static_cast<std::size_t>(std::abs(k))] *
                     std::cos(2 * std::numbers::pi * torus_reduce(dn * x));
            }
          }
          exponent[i * K + l] += rate * acc;
        }
      });
    } else {
      for (std::size_t i = 0; i < K; ++i) {
        const double x = dn * quad.nodes[i];
        g[i] = options.method == SecondMomentMethod::untruncated ? kernel(x) - 1.0
                                                                 : truncated_kernel_minus_one(fhat, x);
      }
      parallel_for(K, workers, [&](std::size_t i) {
        const double gi = rate * g[i];
        double* row = exponent.data() + i * K;
        for (std::size_t l = 0; l < K; ++l) row[l] += gi * g[l];
      });
    }
    while (next < ladder.size() && ladder[next] == n) snapshot(ladder[next++]);
  }
  return out;
}

SecondMomentValue second_moment_exact(const MartingaleParams& params, std::int64_t N,
                                      const SecondMomentOptions& options) {
  const std::int64_t ladder[] = {N};
  return second_moment_ladder(params, ladder, options).front();
}

double sine_power_integral(double p) {
  require(p >= 0 && p < 1, "sine power integral: exponent must lie in [0, 1)");
  if (p == 0.0) return 1.0;
  // t = v^k / 2 with k = 1 / (1 - p). The powers of v cancel against (pi t)^{-p},
  // leaving a bounded integrand in sin(pi t) / (pi t).
  const double k = 1.0 / (1.0 - p);
  const double scale = k / 2 * std::pow(std::numbers::pi / 2, -p);
  auto integrand = [&](double v) {
    const double x = std::numbers::pi * 0.5 * std::pow(v, k);
    const double sinc = x > 0.0 ? std::sin(x) / x : 1.0;
    return scale * std::pow(sinc, -p);
  };
  using boost::math::quadrature::gauss_kronrod;
  return 2 * gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 20, 1e-13);
}

SecondMomentBound second_moment_bound(double alpha, double eps, double C) {
  require(alpha > 0, "second moment bound: alpha must be positive");
  require(eps > 0 && eps < 0.5, "second moment bound: eps must lie in (0, 1/2)");
  require(std::isfinite(C), "second moment bound: C must be finite");
  SecondMomentBound b;
  b.condition_sum = std::pow(1.0 / eps - 1.0, 2);
  b.alpha_s = alpha * b.condition_sum;
  b.condition = b.alpha_s < 1.0;
  b.constant = C;
  if (!b.condition) {
    b.sine_integral = std::numeric_limits<double>::infinity();
    b.bound_value = std::numeric_limits<double>::infinity();
    return b;
  }
  b.sine_integral = sine_power_integral(b.alpha_s);
  b.bound_value = std::exp(b.alpha_s * C) * b.sine_integral;
  return b;
}

std::int64_t exception_count(const RandomSet& set, const TorusPoint& t, double eps, std::int64_t N) {
  require(eps >= 0 && eps <= 0.5, "exception count: eps must lie in [0, 1/2]");
  const auto q = static_cast<long double>(t.denominator());
  std::int64_t count = 0;
  for (const auto& m : set.members()) {
    if (m.n > N) break;
    const auto r = static_cast<long double>(t.multiple_residue(m.n));
    if (std::min(r, q - r) / q > eps) ++count;
  }
  return count;
}

std::int64_t exception_count(const RandomSet& set, double t, double eps, std::int64_t N) {
  return exception_count(set, TorusPoint::from_double(t), eps, N);
}

std::vector<Witness> nondensity_witness_search(const RandomSet& set, double eps, std::int64_t N,
                                               std::int64_t grid_size, std::size_t keep, unsigned workers) {
  require(eps > 0 && eps < 0.5, "witness search: eps must lie in (0, 1/2)");
  require(N >= 1 && N <= set.horizon(), "witness search: N must lie in [1, horizon]");
  require(grid_size >= N, "witness search: grid size must be >= N");
  if (grid_size > (std::int64_t{1} << 31)) throw CapacityError("witness search: grid size above 2^31");
  const auto elements = set.elements(N);
  // t_i = (2i + 1) / (2G); n t_i mod 1 is tracked exactly as a residue mod 2G.
  const auto modulus = static_cast<u128>(2 * grid_size);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(grid_size));
  parallel_for(counts.size(), workers, [&](std::size_t i) {
    const u128 numer = 2 * static_cast<u128>(i) + 1;
    std::int64_t c = 0;
    for (const std::int64_t n : elements) {
      const auto r = static_cast<double>(static_cast<std::uint64_t>(numer * static_cast<u128>(n) % modulus));
      const double m = static_cast<double>(static_cast<std::uint64_t>(modulus));
      if (std::min(r, m - r) / m > eps) ++c;
    }
    counts[i] = c;
  });
  std::vector<std::size_t> order(counts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take = std::min(keep, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) { return counts[a] != counts[b] ? counts[a] < counts[b] : a < b; });
  std::vector<Witness> out;
  out.reserve(take);
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t i = order[k];
    out.push_back({(static_cast<double>(i) + 0.5) / static_cast<double>(grid_size), counts[i]});
  }
  return out;
}

}  // namespace bohrlab
