#include "bohrlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include <fmt/format.h>

#include "bohrlab/errors.hpp"
#include "bohrlab/parallel.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/stats.hpp"

#ifndef BOHRLAB_VERSION
#define BOHRLAB_VERSION "0.0.0"
#endif

namespace bohrlab {
namespace {

// Typed access to a params object; unknown keys are rejected at the end.
class Params {
 public:
  Params(const Json& j, std::string experiment) : j_(j), experiment_(std::move(experiment)) {
    require(j_.is_object(), experiment_ + ": params must be a JSON object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    require(j_.at(key).is_number(), field(key) + " must be a number");
    return j_.at(key).get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    require(v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>()),
            field(key) + " must be an integer");
    return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    require(j_.at(key).is_string(), field(key) + " must be a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback) {
    if (!has(key)) return fallback;
    require(j_.at(key).is_array(), field(key) + " must be an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& v : j_.at(key)) {
      require(v.is_number_integer(), field(key) + " must be an array of integers");
      out.push_back(v.get<std::int64_t>());
    }
    return out;
  }

  Arc arc(const std::string& key, Arc fallback) {
    if (!has(key)) return fallback;
    return parse_arc(j_.at(key), field(key));
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  static Arc parse_arc(const Json& v, const std::string& name) {
    if (v.is_array()) {
      require(v.size() == 2 && v[0].is_number() && v[1].is_number(), name + " must be [start, end]");
      const double a = v[0].get<double>(), b = v[1].get<double>();
      require(b > a, name + ": end must exceed start");
      return Arc::make(a, std::min(1.0, b - a));
    }
    require(v.is_object() && v.contains("start") && v.contains("length"), name + " must be {start, length}");
    return Arc::make(v.at("start").get<double>(), v.at("length").get<double>());
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw ValidationError(field(key) + " is not a recognized parameter");
    }
  }

 private:
  std::string field(const std::string& key) const { return experiment_ + ": params." + key; }

  const Json& j_;
  std::string experiment_;
  std::set<std::string> used_;
};

TorusPoint parse_point(const Json& v) {
  if (v.is_string()) return TorusPoint::named(parse_irrational(v.get<std::string>()));
  if (v.is_object() && v.contains("numerator") && v.contains("denominator"))
    return TorusPoint::rational(v.at("numerator").get<std::int64_t>(), v.at("denominator").get<std::uint64_t>());
  require(v.is_number(), "t must be a named irrational, a number or {numerator, denominator}");
  return TorusPoint::from_double(v.get<double>());
}

WeightSequence require_weights(const ExperimentConfig& c) {
  require(c.weights.has_value(), c.experiment + ": a weights spec is required");
  return weights_from_spec(*c.weights);
}

std::int64_t resolve_n(Params& p, const WeightSequence& w) {
  const std::int64_t N = p.integer("N", w.horizon());
  require(N >= 1 && N <= w.horizon(), "params.N must lie in [1, weights N]");
  return N;
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t from, std::int64_t to) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = from; n < to; n *= 10) out.push_back(n);
  out.push_back(to);
  return out;
}

Json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

struct Run {
  const ExperimentConfig& config;
  ResultEnvelope& env;
  unsigned workers() const { return std::max(1u, config.workers); }
  std::uint64_t seed(std::uint64_t i) const { return seed_stream(config.master_seed, i); }
};

void experiment_sample(Run r, Params p) {
  const auto w = require_weights(r.config);
  const std::string source = p.text("source", "poisson");
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<std::int64_t>(r.config.master_seed)));
  p.finish();
  RandomSet set;
  if (source == "poisson") {
    set = sample_poisson(w, seed);
  } else if (source == "bernoulli") {
    set = sample_bernoulli(w, seed);
  } else {
    throw ValidationError("sample: source must be 'poisson' or 'bernoulli'");
  }
  r.env.documents.emplace_back("random_set", to_json(set));
  r.env.tables.push_back(members_table(set));
  r.env.summary = {{"size", set.size()},
                   {"horizon", set.horizon()},
                   {"seed", set.seed()},
                   {"source", source_name(set.source())},
                   {"expected_count", expected_count(w, w.horizon())}};
  if (w.horizon() >= 2) r.env.summary["regime"] = to_json(classify_regime(w));
  r.env.plots.push_back({"members", {"n", {"multiplicity"}, PlotKind::scatter, "Sampled members", ""}});
}

void experiment_qi(Run r, Params p) {
  SearchLimits limits;
  limits.exhaustive_cap = static_cast<std::size_t>(p.integer("exhaustive_cap", 24));
  limits.bounded_support = static_cast<std::size_t>(p.integer("bounded_support", 8));
  std::vector<std::vector<std::int64_t>> sets;
  std::vector<std::uint64_t> seeds;
  std::optional<WeightSequence> weights;
  if (p.has("elements")) {
    sets.push_back(p.integers("elements", {}));
    seeds.push_back(0);
    p.finish();
  } else {
    weights = require_weights(r.config);
    const std::int64_t N = resolve_n(p, *weights);
    const std::int64_t trials = p.integer("trials", 1);
    p.finish();
    require(trials >= 1, "qi: trials must be >= 1");
    sets.resize(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) seeds.push_back(r.seed(static_cast<std::uint64_t>(i)));
    parallel_for(sets.size(), r.workers(), [&](std::size_t i) {
      sets[i] = sample_poisson(*weights, seeds[i], N).elements();
    });
  }

  struct Row {
    RelationScan scan;
    QiDecomposition qi;
    std::optional<bool> sparse_part_independent;
  };
  std::vector<Row> rows(sets.size());
  const MixedCounterexample* mixed = weights ? std::get_if<MixedCounterexample>(&weights->kind()) : nullptr;
  parallel_for(sets.size(), r.workers(), [&](std::size_t i) {
    if (sets[i].empty()) return;
    rows[i].scan = scan_relations(sets[i], limits);
    rows[i].qi = qi_decompose(sets[i], limits);
    if (mixed) {
      std::vector<std::int64_t> powers;
      for (auto n : sets[i]) {
        std::int64_t x = n;
        while (x % mixed->sparse_base == 0) x /= mixed->sparse_base;
        if (x == 1 && n > 1) powers.push_back(n);
      }
      if (!powers.empty() && powers.size() <= limits.exhaustive_cap)
        rows[i].sparse_part_independent = !find_relation(powers, powers.size(), limits).has_value();
    }
  });

  DataTable t{"trials",
              {"trial", "seed", "size", "relation_found", "certified", "part_count", "decomposition_certified", "relation"},
              {}};
  std::int64_t found = 0;
  std::size_t max_parts = 0;
  double part_sum = 0;
  Json sparse = Json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& row = rows[i];
    const bool hit = row.scan.relation.has_value();
    found += hit;
    max_parts = std::max(max_parts, row.qi.part_count());
    part_sum += static_cast<double>(row.qi.part_count());
    t.add_row({static_cast<std::int64_t>(i), fmt::format("{}", seeds[i]), static_cast<std::int64_t>(sets[i].size()),
               std::int64_t{hit}, std::int64_t{sets[i].empty() || row.scan.certified}, static_cast<std::int64_t>(row.qi.part_count()),
               std::int64_t{row.qi.certified}, hit ? row.scan.relation->to_string() : std::string()});
    if (row.sparse_part_independent) sparse.push_back(*row.sparse_part_independent);
  }
  r.env.tables.push_back(std::move(t));
  const double n = static_cast<double>(sets.size());
  r.env.summary = {{"trials", sets.size()},
                   {"relation_frequency", static_cast<double>(found) / n},
                   {"mean_part_count", part_sum / n},
                   {"max_part_count", max_parts}};
  if (sets.size() == 1) {
    Json parts = Json::array();
    for (const auto& part : rows[0].qi.parts) parts.push_back(part);
    r.env.summary["parts"] = parts;
    if (rows[0].scan.relation) r.env.summary["relation"] = to_json(*rows[0].scan.relation);
  }
  if (!sparse.empty()) r.env.summary["sparse_part_independent"] = sparse;
  r.env.plots.push_back({"trials", {"trial", {"part_count", "size"}, PlotKind::scatter, "QI decomposition", ""}});
}

void experiment_counting(Run r, Params p) {
  const auto w = require_weights(r.config);
  const std::int64_t seeds = p.integer("seeds", 100);
  auto checkpoints = p.integers("checkpoints", geometric_checkpoints(100, w.horizon()));
  p.finish();
  require(seeds >= 1, "counting: seeds must be >= 1");
  require(!checkpoints.empty() && std::is_sorted(checkpoints.begin(), checkpoints.end()) &&
              checkpoints.front() >= 2 && checkpoints.back() <= w.horizon(),
          "counting: checkpoints must be increasing within [2, N]");
  std::vector<CountingProfile> profiles(static_cast<std::size_t>(seeds));
  std::vector<std::string> verdicts(profiles.size());
  parallel_for(profiles.size(), r.workers(), [&](std::size_t i) {
    const auto set = sample_poisson(w, r.seed(i), checkpoints.back());
    profiles[i] = counting_profile(set, checkpoints);
  });
  DataTable t{"profile", {"seed_index", "N", "count", "ratio"}, {}};
  std::vector<RunningMoments> per(checkpoints.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      t.add_row({static_cast<std::int64_t>(i), checkpoints[c], profiles[i].counts[c], profiles[i].ratios[c]});
      per[c].add(profiles[i].ratios[c]);
    }
  DataTable m{"mean_ratio", {"N", "log_N", "mean_ratio", "stderr", "expected_ratio"}, {}};
  Json means = Json::array();
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double logn = std::log(static_cast<double>(checkpoints[c]));
    m.add_row({checkpoints[c], logn, per[c].mean(), per[c].stderr_of_mean(), expected_count(w, checkpoints[c]) / logn});
    means.push_back(per[c].mean());
  }
  r.env.tables.push_back(std::move(t));
  r.env.tables.push_back(std::move(m));
  r.env.summary = {{"seeds", seeds},
                   {"checkpoints", checkpoints},
                   {"mean_ratio", means},
                   {"ratio_growth", per.back().mean() / per.front().mean()}};
  r.env.plots.push_back({"mean_ratio", {"log_N", {"mean_ratio", "expected_ratio"}, PlotKind::line, "|Lambda_N| / ln N", ""}});
}

MartingaleParams martingale_params(Params& p) {
  MartingaleParams mp;
  mp.alpha = p.number("alpha", 0.05);
  mp.eps = p.number("eps", 0.3);
  mp.interval = p.arc("interval", Arc{0.25, 0.1});
  mp.step = p.number("step", 0.0);
  return mp;
}

void experiment_martingale(Run r, Params p) {
  const auto mp = martingale_params(p);
  auto checkpoints = p.integers("checkpoints", {0, 50, 100, 200});
  const std::int64_t seeds = p.integer("seeds", 2000);
  const std::int64_t halving_seeds = p.integer("halving_seeds", 200);
  p.finish();
  require(seeds >= 2, "martingale: seeds must be >= 2");
  require(!checkpoints.empty() && checkpoints.back() >= 1, "martingale: the last checkpoint must be >= 1");
  const std::int64_t N = checkpoints.back();
  const auto w = WeightSequence::make(Harmonic{mp.alpha}, N);
  const MartingaleEvaluator eval(mp, checkpoints);
  std::vector<MartingaleTrace> traces(static_cast<std::size_t>(seeds));
  parallel_for(traces.size(), r.workers(), [&](std::size_t i) { traces[i] = eval.trace(sample_poisson(w, r.seed(i))); });

  DataTable t{"traces", {"seed_index", "N", "Y"}, {}};
  std::vector<RunningMoments> first(checkpoints.size()), second(checkpoints.size());
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const double y = traces[i].values[c];
      t.add_row({static_cast<std::int64_t>(i), checkpoints[c], y});
      first[c].add(y);
      second[c].add(y * y);
    }
  DataTable m{"moments", {"N", "mean", "stderr", "z_score", "second_moment", "second_stderr"}, {}};
  Json moments = Json::array();
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double se = first[c].stderr_of_mean();
    const double z = se > 0 ? (first[c].mean() - mp.interval.length) / se : 0.0;
    m.add_row({checkpoints[c], first[c].mean(), se, z, second[c].mean(), second[c].stderr_of_mean()});
    moments.push_back({{"N", checkpoints[c]}, {"mean", first[c].mean()}, {"stderr", se}, {"z_score", z}});
  }

  // Same realizations at half the quadrature step.
  MartingaleParams fine = mp;
  fine.step = eval.step() / 2;
  const MartingaleEvaluator eval_fine(fine, {N});
  const auto h = static_cast<std::size_t>(std::clamp<std::int64_t>(halving_seeds, 0, seeds));
  std::vector<double> coarse(h), refined(h);
  parallel_for(h, r.workers(), [&](std::size_t i) {
    coarse[i] = traces[i].values.back();
    refined[i] = eval_fine.trace(sample_poisson(w, r.seed(i))).values.back();
  });
  double max_rel = 0.0, sum_c = 0.0, sum_f = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    sum_c += coarse[i];
    sum_f += refined[i];
    if (coarse[i] > 0) max_rel = std::max(max_rel, std::abs(refined[i] - coarse[i]) / coarse[i]);
  }
  r.env.tables.push_back(std::move(t));
  r.env.tables.push_back(std::move(m));
  r.env.summary = {{"interval_length", mp.interval.length},
                   {"step", eval.step()},
                   {"nodes", eval.nodes()},
                   {"moments", moments},
                   {"halving",
                    {{"seeds", h},
                     {"mean_relative_change", sum_c > 0 ? std::abs(sum_f - sum_c) / sum_c : 0.0},
                     {"max_relative_change", max_rel}}}};
  r.env.plots.push_back({"moments", {"N", {"mean"}, PlotKind::line, "Mean of Y_N", ""}});
}

void experiment_second_moment(Run r, Params p) {
  const auto mp = martingale_params(p);
  const auto ladder = p.integers("ladder", {50, 100, 200, 400});
  SecondMomentOptions options;
  options.max_frequency = p.integer("max_frequency", 0);
  const std::string method = p.text("method", "factorized");
  const std::int64_t resolution = p.integer("log_sine_resolution", 10000);
  p.finish();
  if (method == "factorized") options.method = SecondMomentMethod::factorized;
  else if (method == "direct") options.method = SecondMomentMethod::direct;
  else if (method == "untruncated") options.method = SecondMomentMethod::untruncated;
  else throw ValidationError("second-moment: method must be factorized, direct or untruncated");
  options.workers = r.workers();
  const auto values = second_moment_ladder(mp, ladder, options);
  const double C = log_sine_bound_constant(resolution);
  const auto bound = second_moment_bound(mp.alpha, mp.eps, C);
  DataTable t{"ladder", {"N", "exact_value", "bound_value", "truncated_sum", "closed_form_sum"}, {}};
  Json rows = Json::array();
  bool nondecreasing = true, bounded = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.add_row({values[i].N, values[i].value, bound.bound_value, values[i].truncated_sum, values[i].closed_form_sum});
    rows.push_back(to_json(values[i]));
    if (i > 0 && values[i].value < values[i - 1].value) nondecreasing = false;
    if (bound.condition && values[i].value > bound.bound_value) bounded = false;
  }
  r.env.tables.push_back(std::move(t));
  r.env.summary = {{"values", rows},
                   {"bound", to_json(bound)},
                   {"interval_length_squared", mp.interval.length * mp.interval.length},
                   {"nondecreasing", nondecreasing},
                   {"bounded_by_bound", bounded}};
  r.env.plots.push_back({"ladder", {"N", {"exact_value"}, PlotKind::line, "E[Y_N^2]", ""}});
}

void experiment_witness(Run r, Params p) {
  const double alpha = p.number("alpha", 0.01);
  const double eps = p.number("eps", 0.3);
  const std::int64_t N = p.integer("N", 1000);
  const std::int64_t grid = p.integer("grid_size", 2 * N);
  const std::int64_t seeds = p.integer("seeds", 50);
  const auto keep = static_cast<std::size_t>(p.integer("keep", 5));
  p.finish();
  require(N >= 1 && seeds >= 1, "witness: N and seeds must be >= 1");
  require(grid >= 2 * N, "witness: grid_size must be >= 2N");
  const auto w = WeightSequence::make(Harmonic{alpha}, 2 * N);
  std::vector<std::vector<Witness>> at_n(static_cast<std::size_t>(seeds)), at_2n(at_n.size());
  parallel_for(at_n.size(), r.workers(), [&](std::size_t i) {
    const auto set = sample_poisson(w, r.seed(i));
    at_n[i] = nondensity_witness_search(set, eps, N, grid, keep);
    at_2n[i] = nondensity_witness_search(set, eps, 2 * N, grid, keep);
  });
  DataTable t{"witnesses", {"seed_index", "N", "rank", "t", "exception_count"}, {}};
  std::int64_t stable = 0;
  for (std::size_t i = 0; i < at_n.size(); ++i) {
    for (const auto* list : {&at_n[i], &at_2n[i]})
      for (std::size_t k = 0; k < list->size(); ++k)
        t.add_row({static_cast<std::int64_t>(i), list == &at_n[i] ? N : 2 * N, static_cast<std::int64_t>(k),
                   (*list)[k].t, (*list)[k].exception_count});
    stable += at_n[i].front().exception_count == at_2n[i].front().exception_count;
  }
  r.env.tables.push_back(std::move(t));
  r.env.summary = {{"seeds", seeds},
                   {"grid_size", grid},
                   {"stabilized_fraction", static_cast<double>(stable) / static_cast<double>(seeds)}};
  r.env.plots.push_back({"witnesses", {"t", {"exception_count"}, PlotKind::scatter, "Exception counts", ""}});
}

void experiment_orbit(Run r, Params p) {
  const auto w = require_weights(r.config);
  const std::int64_t N = resolve_n(p, w);
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<std::int64_t>(r.config.master_seed)));
  std::vector<TorusPoint> t;
  std::vector<Arc> box;
  if (p.has("t") && p.raw("t").is_array()) {
    for (const auto& v : p.raw("t")) t.push_back(parse_point(v));
    require(p.has("box") && p.raw("box").is_array(), "orbit: a multidimensional t needs a 'box' array");
    for (const auto& v : p.raw("box")) box.push_back(Params::parse_arc(v, "orbit: box"));
  } else {
    t.push_back(p.has("t") ? parse_point(p.raw("t")) : TorusPoint::named(NamedIrrational::sqrt2_minus_1));
    box.push_back(p.arc("interval", Arc{0.25, 0.5}));
  }
  p.finish();
  const auto set = sample_poisson(w, seed, N);
  const auto report = multidim_orbit_hit(set, t, box, N);
  DataTable hits{"hits", {"n", "orbit_point"}, {}};
  for (const auto& m : set.members()) {
    bool in = true;
    for (std::size_t i = 0; i < t.size(); ++i) in = in && box[i].contains(t[i].multiple(m.n));
    if (in) hits.add_row({m.n, t[0].multiple(m.n)});
  }
  r.env.tables.push_back(std::move(hits));
  r.env.summary = to_json(report);
  r.env.summary["members"] = set.size();
  r.env.plots.push_back({"hits", {"n", {"orbit_point"}, PlotKind::scatter, "Orbit hits", ""}});
}

void experiment_hit_ladder(Run r, Params p) {
  const auto w = require_weights(r.config);
  const TorusPoint t = p.has("t") ? parse_point(p.raw("t")) : TorusPoint::named(NamedIrrational::sqrt2_minus_1);
  const Arc interval = p.arc("interval", Arc{0.25, 0.5});
  const auto ladder = p.integers("ladder", geometric_checkpoints(100, w.horizon()));
  const std::int64_t trials = p.integer("trials", 500);
  p.finish();
  const auto points = hit_probability(w, t, interval, ladder, trials, r.config.master_seed, r.workers());
  DataTable table{"ladder", {"N", "hits", "estimate", "ci_low", "ci_high"}, {}};
  std::vector<double> lx, ly;
  bool monotone = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    table.add_row({pt.N, pt.hits, pt.estimate, pt.ci.low, pt.ci.high});
    lx.push_back(std::log10(static_cast<double>(pt.N)));
    ly.push_back(pt.estimate);
    if (i > 0 && pt.estimate < points[i - 1].estimate) monotone = false;
  }
  r.env.tables.push_back(std::move(table));
  r.env.summary = {{"trials", trials}, {"monotone", monotone}, {"final_estimate", points.back().estimate}};
  if (points.size() >= 2) {
    const auto fit = fit_line(lx, ly);
    r.env.summary["trend"] = {{"slope_per_decade", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  }
  if (const auto* h = std::get_if<Harmonic>(&w.kind())) r.env.summary["alpha_times_length"] = h->alpha * interval.length;
  r.env.plots.push_back({"ladder", {"N", {"estimate", "ci_low", "ci_high"}, PlotKind::line, "Hit probability", ""}});
}

void experiment_density_grid(Run r, Params p) {
  GridProcedureParams g;
  g.alpha = p.number("alpha", g.alpha);
  g.interval = p.arc("interval", g.interval);
  g.d = p.number("d", g.d);
  g.k = static_cast<int>(p.integer("k", g.k));
  g.delta = p.number("delta", g.delta);
  g.ladder = p.integers("ladder", g.ladder);
  g.trials = p.integer("trials", g.trials);
  g.offset_candidates = static_cast<int>(p.integer("offset_candidates", g.offset_candidates));
  g.grid_budget = p.number("grid_budget", g.grid_budget);
  p.finish();
  g.master_seed = r.config.master_seed;
  g.workers = r.workers();
  const auto report = grid_procedure(g);
  DataTable t{"ladder", {"N", "M", "integral_estimate", "integral_stderr", "scaled_bound", "grid_sum", "random_offset_mean"}, {}};
  for (const auto& pt : report.ladder)
    t.add_row({pt.N, pt.M, pt.integral_estimate, pt.integral_stderr, pt.scaled_bound,
               pt.grid_evaluated ? pt.grid_sum : std::nan(""), pt.grid_evaluated ? pt.random_offset_mean : std::nan("")});
  r.env.tables.push_back(std::move(t));
  r.env.summary = to_json(report);
  r.env.plots.push_back({"ladder", {"N", {"integral_estimate"}, PlotKind::loglog, "Miss probability integral over G",
                                    fmt::format("beta_hat = {:.3f}", report.beta_hat)}});
}

void experiment_pm_decay(Run r, Params p) {
  const double a = p.number("amplitude", 2.0);
  const auto m64 = p.integers("m_values", {1, 2, 3, 4, 5});
  const std::int64_t q = p.integer("ratio", 3);
  const std::int64_t factor = p.integer("resolution_factor", 16);
  const std::int64_t max_res = p.integer("max_resolution", std::int64_t{1} << 24);
  p.finish();
  std::vector<int> m(m64.begin(), m64.end());
  const auto fit = pm_decay_profile(a, m, q, factor, max_res);
  DataTable t{"profile", {"m", "r", "pm", "minus_log_pm", "resolution", "parseval"}, {}};
  for (const auto& s : fit.samples)
    t.add_row({std::int64_t{s.m}, s.r, s.pm, s.minus_log_pm, s.resolution, s.parseval});
  r.env.tables.push_back(std::move(t));
  r.env.summary = to_json(fit);
  r.env.plots.push_back({"profile", {"r", {"minus_log_pm"}, PlotKind::line, "-log PM norm against r",
                                     fmt::format("slope c = {:.4f}, R^2 = {:.4f}", fit.c, fit.r_squared)}});
}

void experiment_concentration(Run r, Params p) {
  const auto w = require_weights(r.config);
  ConcentrationParams cp;
  if (p.has("block_power")) {
    const std::int64_t j = p.integer("block_power", 0);
    require(j >= 0 && j < 40, "concentration: block_power out of range");
    cp.first = std::int64_t{1} << j;
    cp.last = (std::int64_t{1} << (j + 1)) - 1;
  }
  cp.first = p.integer("first", cp.first);
  cp.last = p.integer("last", cp.last);
  const std::string phase = p.text("phase", "lacunary");
  const double a = p.number("amplitude", 2.0);
  const auto m = static_cast<int>(p.integer("blocks", 3));
  const std::int64_t q = p.integer("ratio", 3);
  cp.c = p.number("c", 0.3);
  cp.C = p.number("C", 4.0);
  cp.trials = p.integer("trials", 200);
  const double r_override = p.number("r", -1.0);
  p.finish();
  cp.master_seed = r.config.master_seed;
  cp.workers = r.workers();
  require(cp.first >= 1 && cp.first <= cp.last && cp.last <= w.horizon(), "concentration: block outside the horizon");
  std::vector<double> psi;
  if (phase == "lacunary") {
    const auto phi = LacunaryPhase::make(a, m, q);
    psi = dilated_phase(phi, cp.first, cp.last);
    cp.r = phi.a_norm();
    cp.dilation = cp.last - cp.first + 1;
  } else if (phase == "zero") {
    psi.assign(static_cast<std::size_t>(cp.last - cp.first + 1), 0.0);
    cp.r = 0.0;
  } else {
    throw ValidationError("concentration: phase must be 'lacunary' or 'zero'");
  }
  if (r_override >= 0) cp.r = r_override;
  const auto report = concentration_check(w, psi, cp);
  DataTable t{"rho_quantiles", {"level", "rho"}, {}};
  for (std::size_t i = 0; i < report.quantile_levels.size(); ++i)
    t.add_row({report.quantile_levels[i], report.rho_quantiles[i]});
  r.env.tables.push_back(std::move(t));
  r.env.summary = to_json(report);
  r.env.plots.push_back({"rho_quantiles", {"level", {"rho"}, PlotKind::line, "Quantiles of rho", ""}});
}

void experiment_splitting_law(Run r, Params p) {
  const auto w = require_weights(r.config);
  const double theta = p.number("theta", 0.5);
  const std::int64_t seeds = p.integer("seeds", 2000);
  const std::int64_t N = resolve_n(p, w);
  p.finish();
  require(seeds >= 2, "splitting-law: seeds must be >= 2");
  const auto [w1, w2] = split(w, theta);
  std::vector<std::int64_t> direct(static_cast<std::size_t>(seeds)), united(direct.size());
  std::int64_t overlaps = 0;
  std::vector<char> overlap(direct.size());
  parallel_for(direct.size(), r.workers(), [&](std::size_t i) {
    direct[i] = sample_poisson(w, r.seed(3 * i), N).count_upto(N);
    const auto u = unite(sample_poisson(w1, r.seed(3 * i + 1), N), sample_poisson(w2, r.seed(3 * i + 2), N));
    united[i] = u.count_upto(N);
    overlap[i] = u.overlapping_seeds();
  });
  overlaps = std::count(overlap.begin(), overlap.end(), 1);
  const std::int64_t top = std::max(*std::max_element(direct.begin(), direct.end()),
                                    *std::max_element(united.begin(), united.end()));
  std::vector<std::int64_t> hd(static_cast<std::size_t>(top + 1)), hu(hd.size());
  for (auto x : direct) ++hd[static_cast<std::size_t>(x)];
  for (auto x : united) ++hu[static_cast<std::size_t>(x)];
  DataTable t{"histogram", {"count", "direct", "union"}, {}};
  for (std::size_t k = 0; k < hd.size(); ++k) t.add_row({static_cast<std::int64_t>(k), hd[k], hu[k]});
  const auto test = two_sample_chi_square(hd, hu);
  RunningMoments md, mu;
  for (auto x : direct) md.add(static_cast<double>(x));
  for (auto x : united) mu.add(static_cast<double>(x));
  r.env.tables.push_back(std::move(t));
  r.env.summary = {{"theta", theta},
                   {"seeds", seeds},
                   {"N", N},
                   {"mean_direct", md.mean()},
                   {"mean_union", mu.mean()},
                   {"expected_count", expected_count(w, N)},
                   {"chi_square", {{"statistic", test.statistic}, {"dof", test.degrees_of_freedom}, {"p_value", test.p_value}, {"bins", test.bins_used}}},
                   {"overlapping_seed_unions", overlaps}};
  r.env.plots.push_back({"histogram", {"count", {"direct", "union"}, PlotKind::line, "|Lambda_N| histogram", ""}});
}

using ExperimentFn = void (*)(Run, Params);

const std::map<std::string, ExperimentFn>& registry() {
  static const std::map<std::string, ExperimentFn> table{
      {"sample", experiment_sample},
      {"qi", experiment_qi},
      {"counting", experiment_counting},
      {"martingale", experiment_martingale},
      {"second-moment", experiment_second_moment},
      {"witness", experiment_witness},
      {"orbit", experiment_orbit},
      {"hit-ladder", experiment_hit_ladder},
      {"density-grid", experiment_density_grid},
      {"pm-decay", experiment_pm_decay},
      {"concentration", experiment_concentration},
      {"splitting-law", experiment_splitting_law},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string tool_version() { return BOHRLAB_VERSION; }

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  static const std::set<std::string> known{"experiment", "weights", "params", "master_seed", "workers", "output"};
  for (const auto& [key, value] : j.items())
    require(known.contains(key), "config: unknown field '" + key + "'");
  ExperimentConfig c;
  if (j.contains("experiment")) {
    require(j.at("experiment").is_string(), "config: 'experiment' must be a string");
    c.experiment = j.at("experiment").get<std::string>();
  }
  if (j.contains("weights") && !j.at("weights").is_null()) {
    require(j.at("weights").is_object(), "config: 'weights' must be an object");
    c.weights = j.at("weights");
  }
  if (j.contains("params")) {
    require(j.at("params").is_object(), "config: 'params' must be an object");
    c.params = j.at("params");
  }
  if (j.contains("master_seed")) {
    require(j.at("master_seed").is_number_unsigned(), "config: 'master_seed' must be an unsigned integer");
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    require(j.at("workers").is_number_unsigned() && j.at("workers").get<std::uint64_t>() >= 1,
            "config: 'workers' must be a positive integer");
    c.workers = j.at("workers").get<unsigned>();
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    require(o.is_object(), "config: 'output' must be an object");
    for (const auto& [key, value] : o.items())
      require(key == "dir" || key == "plot", "config: unknown field 'output." + key + "'");
    if (o.contains("dir")) c.output_dir = o.at("dir").get<std::string>();
    if (o.contains("plot")) c.plot = o.at("plot").get<bool>();
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j = reproducible_json();
  j["workers"] = workers;
  j["output"] = {{"dir", output_dir}, {"plot", plot}};
  return j;
}

Json ExperimentConfig::reproducible_json() const {
  Json j{{"experiment", experiment}, {"params", params}, {"master_seed", master_seed}};
  if (weights) j["weights"] = *weights;
  return j;
}

std::string ExperimentConfig::digest() const { return fnv1a_hex(reproducible_json().dump()); }

const DataTable& ResultEnvelope::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw ValidationError("no table named '" + name + "'");
}

Json ResultEnvelope::envelope_json() const {
  Json names = Json::array();
  for (const auto& t : tables) names.push_back(t.name + ".csv");
  for (const auto& [name, doc] : documents) names.push_back(name + ".json");
  return Json{{"config_digest", digest},
              {"tool_version", tool_version},
              {"config", config},
              {"summary", summary},
              {"files", names}};
}

ResultEnvelope run(const ExperimentConfig& config) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end()) throw ValidationError("unknown experiment '" + config.experiment + "'");
  ResultEnvelope env;
  env.digest = config.digest();
  env.tool_version = tool_version();
  env.config = config.reproducible_json();
  const auto start = std::chrono::steady_clock::now();
  it->second(Run{config, env}, Params(config.params, config.experiment));
  env.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.output_dir.empty()) write_outputs(env, config.output_dir, config.plot, config.workers);
  return env;
}

std::string plot(const ResultEnvelope& envelope, const std::string& table, PlotKind kind) {
  const auto& t = envelope.table(table);
  for (const auto& req : envelope.plots) {
    if (req.table != table) continue;
    PlotSpec spec = req.spec;
    spec.kind = kind;
    return render_svg(t, spec, envelope.digest);
  }
  require(t.columns.size() >= 2, "plot: table '" + table + "' needs two columns");
  PlotSpec spec{t.columns[0], {t.columns[1]}, kind, table, ""};
  return render_svg(t, spec, envelope.digest);
}

std::vector<std::filesystem::path> write_outputs(const ResultEnvelope& envelope, const std::filesystem::path& dir,
                                                 bool with_plots, unsigned workers) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };
  emit("envelope.json", envelope.envelope_json().dump(2) + "\n");
  for (const auto& t : envelope.tables) emit(t.name + ".csv", to_csv(t));
  for (const auto& [name, doc] : envelope.documents) emit(name + ".json", doc.dump(2) + "\n");
  if (with_plots) {
    for (const auto& req : envelope.plots) {
      const auto& t = envelope.table(req.table);
      if (t.empty()) continue;
      emit(req.table + ".svg", render_svg(t, req.spec, envelope.digest));
    }
  }
  emit("timing.json", Json{{"wall_clock_seconds", number_or_string(envelope.wall_clock_seconds)}, {"workers", workers}}.dump(2) + "\n");
  return written;
}

std::string resolve_output_dir(const std::optional<std::string>& flag, const std::string& from_config) {
  if (flag && !flag->empty()) return *flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "bohr-lab-out";
}

}  // namespace bohrlab
