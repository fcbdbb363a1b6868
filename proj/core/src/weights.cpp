#include "bohrlab/weights.hpp"

#include <algorithm>
#include <cmath>

#include "bohrlab/errors.hpp"

namespace bohrlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_power_of(std::int64_t n, std::int64_t base) {
  if (n < base) return false;
  while (n % base == 0) n /= base;
  return n == 1;
}

void validate(const WeightKind& kind) {
  std::visit(Overloaded{
                 [](const Harmonic& h) {
                   require(std::isfinite(h.alpha) && h.alpha > 0, "harmonic: alpha must be > 0");
                 },
                 [](const Growing& g) {
                   require(std::isfinite(g.alpha) && g.alpha > 0, "growing: alpha must be > 0");
                   if (g.law == GrowthLaw::power) {
                     require(g.delta > 0 && g.delta <= 1, "growing(power): delta must lie in (0, 1]");
                   }
                 },
                 [](const MixedCounterexample& m) {
                   require(m.sparse_value > 0 && m.sparse_value < 1,
                           "mixed_counterexample: sparse_value must lie in (0, 1)");
                   require(m.sparse_base >= 3, "mixed_counterexample: sparse_base must be >= 3");
                   require(std::isfinite(m.background_alpha) && m.background_alpha > 0,
                           "mixed_counterexample: background_alpha must be > 0");
                 },
                 [](const Table& t) {
                   for (double v : t.values) {
                     require(std::isfinite(v) && v >= 0, "table: weights must be finite and >= 0");
                   }
                 },
             },
             kind);
}

}  // namespace

std::string growth_law_name(GrowthLaw law) {
  switch (law) {
    case GrowthLaw::power: return "power";
    case GrowthLaw::log: return "log";
    case GrowthLaw::loglog: return "loglog";
  }
  return "unknown";
}

GrowthLaw parse_growth_law(const std::string& name) {
  if (name == "power") return GrowthLaw::power;
  if (name == "log") return GrowthLaw::log;
  if (name == "loglog") return GrowthLaw::loglog;
  throw ValidationError("unknown growth law '" + name + "'");
}

std::string kind_name(const WeightKind& kind) {
  return std::visit(Overloaded{
                        [](const Harmonic&) { return std::string("harmonic"); },
                        [](const Growing&) { return std::string("growing"); },
                        [](const MixedCounterexample&) { return std::string("mixed_counterexample"); },
                        [](const Table&) { return std::string("table"); },
                    },
                    kind);
}

double weight_formula(const WeightKind& kind, std::int64_t n) {
  const double x = static_cast<double>(n);
  return std::visit(Overloaded{
                        [x](const Harmonic& h) { return h.alpha / x; },
                        [x](const Growing& g) {
                          switch (g.law) {
                            case GrowthLaw::power: return g.alpha * std::pow(x, -1.0 + g.delta);
                            case GrowthLaw::log: return g.alpha * std::log1p(x) / x;
                            case GrowthLaw::loglog: return g.alpha * std::log(std::log(x + 3.0)) / x;
                          }
                          return 0.0;
                        },
                        [n, x](const MixedCounterexample& m) {
                          return is_power_of(n, m.sparse_base) ? m.sparse_value : m.background_alpha / x;
                        },
                        [n](const Table& t) { return t.values.at(static_cast<std::size_t>(n - 1)); },
                    },
                    kind);
}

WeightSequence::WeightSequence(WeightKind kind, std::vector<double> values)
    : kind_(std::move(kind)), values_(std::move(values)) {
  survival_.reserve(values_.size());
  for (double v : values_) survival_.push_back(std::exp(-v));
}

WeightSequence WeightSequence::make(WeightKind kind, std::int64_t horizon) {
  require(horizon >= 1, "weights: horizon N must be >= 1");
  require(horizon <= kMaxHorizon, "weights: horizon above 1e8 is not materialized");
  validate(kind);
  if (const auto* t = std::get_if<Table>(&kind)) {
    require(static_cast<std::int64_t>(t->values.size()) >= horizon,
            "table: fewer values than the requested horizon");
  }
  std::vector<double> values(static_cast<std::size_t>(horizon));
  for (std::int64_t n = 1; n <= horizon; ++n) values[static_cast<std::size_t>(n - 1)] = weight_formula(kind, n);
  return WeightSequence(std::move(kind), std::move(values));
}

WeightSequence WeightSequence::from_values(WeightKind kind, std::vector<double> values) {
  require(!values.empty(), "weights: empty value list");
  require(static_cast<std::int64_t>(values.size()) <= kMaxHorizon, "weights: horizon above 1e8");
  for (double v : values) require(std::isfinite(v) && v >= 0, "weights: values must be finite and >= 0");
  return WeightSequence(std::move(kind), std::move(values));
}

double WeightSequence::inclusion(std::int64_t n) const { return -std::expm1(-(*this)[n]); }

std::vector<double> bernoulli_params(const WeightSequence& w) {
  std::vector<double> out;
  out.reserve(w.values().size());
  for (double v : w.values()) out.push_back(-std::expm1(-v));
  return out;
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::sidon: return "sidon_regime";
    case Regime::analyticity: return "analyticity_regime";
    case Regime::irregular: return "irregular";
  }
  return "unknown";
}

RegimeReport classify_regime(const WeightSequence& w, const RegimeOptions& options) {
  const std::int64_t N = w.horizon();
  const std::int64_t start = options.tail_start > 0 ? options.tail_start : std::max<std::int64_t>(1, N / 2);
  require(start < N, "classify_regime: tail window is empty (tail_start >= N)");

  std::vector<double> scaled;
  scaled.reserve(static_cast<std::size_t>(N - start + 1));
  for (std::int64_t n = start; n <= N; ++n) scaled.push_back(static_cast<double>(n) * w[n]);

  RegimeReport report;
  report.limsup_estimate = *std::max_element(scaled.begin(), scaled.end());
  report.liminf_estimate = *std::min_element(scaled.begin(), scaled.end());
  if (options.bound) {
    report.bound = *options.bound;
  } else {
    std::vector<double> sorted = scaled;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    report.bound = 10.0 * sorted[sorted.size() / 2];
  }

  std::vector<std::int64_t> cuts = options.checkpoints;
  if (cuts.empty()) {
    const double ratio = std::pow(static_cast<double>(N) / static_cast<double>(start), 0.25);
    double c = static_cast<double>(start);
    for (int i = 0; i < 5; ++i, c *= ratio) cuts.push_back(static_cast<std::int64_t>(std::llround(c)));
    cuts.back() = N;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (auto c : cuts) require(c >= start && c <= N, "classify_regime: checkpoint outside the tail window");

  for (std::size_t i = 1; i < cuts.size(); ++i) {
    double lo = scaled[static_cast<std::size_t>(cuts[i - 1] - start)];
    for (std::int64_t n = cuts[i - 1]; n <= cuts[i]; ++n) lo = std::min(lo, scaled[static_cast<std::size_t>(n - start)]);
    report.block_minima.push_back(lo);
  }

  bool growing = report.block_minima.size() >= 2 && report.block_minima.front() > 0;
  for (std::size_t i = 1; growing && i < report.block_minima.size(); ++i) {
    growing = report.block_minima[i] >= report.block_minima[i - 1] * (1.0 + options.growth_threshold);
  }

  if (growing) {
    report.verdict = Regime::analyticity;
  } else if (report.limsup_estimate <= report.bound) {
    report.verdict = Regime::sidon;
  } else {
    report.verdict = Regime::irregular;
  }
  return report;
}

std::pair<WeightSequence, WeightSequence> split(const WeightSequence& w, double theta) {
  require(theta > 0 && theta < 1, "split: theta must lie in (0, 1)");
  auto scale_kind = [&w](double s) -> WeightKind {
    return std::visit(Overloaded{
                          [s](const Harmonic& h) -> WeightKind { return Harmonic{s * h.alpha}; },
                          [s](const Growing& g) -> WeightKind { return Growing{g.law, s * g.alpha, g.delta}; },
                          [s](const MixedCounterexample& m) -> WeightKind {
                            return MixedCounterexample{s * m.sparse_value, m.sparse_base, s * m.background_alpha};
                          },
                          [s, &w](const Table&) -> WeightKind {
                            Table t;
                            for (double v : w.values()) t.values.push_back(s * v);
                            return t;
                          },
                      },
                      w.kind());
  };
  std::vector<double> first;
  std::vector<double> second;
  first.reserve(w.values().size());
  second.reserve(w.values().size());
  for (double v : w.values()) {
    first.push_back(theta * v);
    second.push_back((1.0 - theta) * v);
  }
  return {WeightSequence::from_values(scale_kind(theta), std::move(first)),
          WeightSequence::from_values(scale_kind(1.0 - theta), std::move(second))};
}

}  // namespace bohrlab
