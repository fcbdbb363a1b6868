// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bohrlab/harness.hpp"
#include "bohrlab/martingale.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/sidon.hpp"
#include "bohrlab/stats.hpp"
#include "oracles.hpp"

using namespace bohrlab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 12345;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ResultEnvelope run_json(const std::string& text) {
  auto c = ExperimentConfig::from_json(Json::parse(text));
  c.master_seed = kSeed;
  return run(c);
}

double num(const Json& j) { return j.get<double>(); }

Outcome check_sampler_fidelity() {
  const auto w = WeightSequence::make(Harmonic{1.0}, 100);
  const std::int64_t seeds = 100000;
  const std::vector<std::int64_t> sites{1, 2, 10, 100};
  std::vector<std::int64_t> poisson(sites.size()), bernoulli(sites.size());
  for (std::int64_t i = 0; i < seeds; ++i) {
    const auto p = sample_poisson(w, seed_stream(kSeed, static_cast<std::uint64_t>(i)));
    const auto b = sample_bernoulli(w, seed_stream(kSeed, static_cast<std::uint64_t>(seeds + i)));
    for (std::size_t k = 0; k < sites.size(); ++k) {
      poisson[k] += p.multiplicity(sites[k]) > 0;
      bernoulli[k] += b.multiplicity(sites[k]) > 0;
    }
  }
  Outcome out{true, ""};
  double worst = 0.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const double p = 1.0 - std::exp(-1.0 / static_cast<double>(sites[k]));
    const double sigma = binomial_sigma(p, seeds);
    for (auto count : {poisson[k], bernoulli[k]}) {
      const double z = std::abs(static_cast<double>(count) / seeds - p) / sigma;
      worst = std::max(worst, z);
      out.pass = out.pass && z <= 4.0;
    }
  }
  out.detail = fmt::format("max |z| = {:.2f} over n in {{1,2,10,100}}, both sources, 1e5 seeds", worst);
  return out;
}

Outcome check_splitting_law() {
  const auto env = run_json(R"({"experiment":"splitting-law","weights":{"kind":"harmonic","params":{"alpha":1},"N":10000},
                                "params":{"theta":0.5,"seeds":2000}})");
  const double p = num(env.summary["chi_square"]["p_value"]);
  return {p > 0.01, fmt::format("chi-square p = {:.4f} (dof {})", p, env.summary["chi_square"]["dof"].get<int>())};
}

Outcome check_relation_search() {
  std::mt19937_64 gen(kSeed);
  int disagreements = 0, with_relation = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto size = std::uniform_int_distribution<std::size_t>(1, 14)(gen);
    const std::int64_t range = trial % 3 == 0 ? 1000000 : (trial % 3 == 1 ? 2000 : 100);
    std::uniform_int_distribution<std::int64_t> pick(1, range);
    std::set<std::int64_t> s;
    while (s.size() < size) s.insert(pick(gen));
    const std::vector<std::int64_t> v(s.begin(), s.end());
    const auto r = find_relation(v, v.size());
    const bool expected = oracle::has_relation(v);
    with_relation += expected;
    if (r.has_value() != expected || (r && !r->valid())) ++disagreements;
  }
  return {disagreements == 0,
          fmt::format("{} disagreements on 500 sets ({} with a relation)", disagreements, with_relation)};
}

Outcome check_qi_regime() {
  const std::vector<double> alphas{2.0, 1.0, 0.5, 0.3, 0.1};
  std::vector<double> freq;
  for (double a : alphas) {
    const auto env = run_json(fmt::format(
        R"({{"experiment":"qi","weights":{{"kind":"harmonic","params":{{"alpha":{}}},"N":10000}},"params":{{"trials":200}}}})", a));
    freq.push_back(num(env.summary["relation_frequency"]));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < freq.size(); ++i) monotone = monotone && freq[i] <= freq[i - 1];
  const bool factor = freq.back() * 2.0 <= freq.front();
  return {monotone && factor && freq.back() < freq.front(),
          fmt::format("relation frequency at alpha 2,1,0.5,0.3,0.1: {:.3f} {:.3f} {:.3f} {:.3f} {:.3f}", freq[0], freq[1],
                      freq[2], freq[3], freq[4])};
}

Outcome check_counting() {
  const auto h = run_json(R"({"experiment":"counting","weights":{"kind":"harmonic","params":{"alpha":2},"N":1000000},
                              "params":{"seeds":100,"checkpoints":[1000000]}})");
  const double ratio = num(h.summary["mean_ratio"][0]);
  const auto g = run_json(R"({"experiment":"counting","weights":{"kind":"growing","params":{"law":"log","alpha":1},"N":1000000},
                              "params":{"seeds":100,"checkpoints":[1000,1000000]}})");
  const double growth = num(g.summary["ratio_growth"]);
  return {std::abs(ratio - 2.0) <= 0.2 && growth >= 2.0,
          fmt::format("harmonic(2) mean |L_N|/ln N = {:.4f} at N=1e6; growing ratio 1e3 -> 1e6 grows by {:.4f}", ratio, growth)};
}

Outcome check_martingale_identity() {
  const auto env = run_json(R"({"experiment":"martingale","params":{"alpha":0.05,"eps":0.3,"interval":{"start":0.25,"length":0.1},
                                "checkpoints":[200],"seeds":2000,"halving_seeds":2000}})");
  const auto& m = env.summary["moments"][0];
  const double z = num(m["z_score"]);
  const double halving = num(env.summary["halving"]["max_relative_change"]);
  return {std::abs(z) <= 3.0 && halving < 0.01,
          fmt::format("mean {:.5f} +- {:.5f} (z = {:.2f}); max per-seed change under step halving {:.2e}", num(m["mean"]),
                      num(m["stderr"]), z, halving)};
}

Outcome check_second_moment() {
  const auto mc = run_json(R"({"experiment":"martingale","params":{"checkpoints":[200],"seeds":5000,"halving_seeds":0}})");
  const auto ex = run_json(R"({"experiment":"second-moment","params":{"ladder":[50,100,200,400]}})");
  const auto& row = mc.table("moments").rows.at(0);
  const double second = std::get<double>(row[4]);
  const double second_se = std::get<double>(row[5]);
  double exact = 0.0;
  for (const auto& v : ex.summary["values"])
    if (v["N"] == 200) exact = num(v["exact_value"]);
  const double z = (second - exact) / second_se;
  const bool nondecreasing = ex.summary["nondecreasing"].get<bool>();
  const bool bounded = ex.summary["bounded_by_bound"].get<bool>() && ex.summary["bound"]["condition_flag"].get<bool>();
  return {std::abs(z) <= 3.0 && nondecreasing && bounded,
          fmt::format("exact {:.6f} vs Monte Carlo {:.6f} +- {:.6f} (z = {:.2f}); nondecreasing {}; bound {:.4f} holds {}", exact,
                      second, second_se, z, nondecreasing, num(ex.summary["bound"]["bound_value"]), bounded)};
}

Outcome check_condition_sum() {
  bool pass = true;
  std::string detail;
  for (double eps : {0.1, 0.25, 0.4}) {
    const auto J = static_cast<std::int64_t>(std::ceil(40.0 / eps));
    const double s = TriangleKernel(eps).nonzero_coefficient_sum(J);
    const double closed = second_moment_bound(0.01, eps, 0.0).condition_sum;
    const double rel = std::abs(s * s - closed) / closed;
    pass = pass && rel < 0.01;
    detail += fmt::format("{}eps={}: S={:.4f} truncated={:.4f} ({:.2f}%)", detail.empty() ? "" : "; ", eps, closed, s * s, 100 * rel);
  }
  return {pass, detail};
}

Outcome check_density() {
  const auto env = run_json(R"({"experiment":"hit-ladder","weights":{"kind":"harmonic","params":{"alpha":3},"N":10000},
                                "params":{"t":"sqrt2_minus_1","interval":{"start":0.25,"length":0.5},"ladder":[100,1000,10000],"trials":500}})");
  const double p = num(env.summary["final_estimate"]);
  const bool monotone = env.summary["monotone"].get<bool>();
  return {p >= 0.99 && monotone, fmt::format("P(hit by N=1e4) = {:.4f} over 500 trials; ladder nondecreasing {}", p, monotone)};
}

Outcome check_grid_procedure() {
  const auto env = run_json(R"({"experiment":"density-grid","params":{"alpha":4,"interval":{"start":0.25,"length":0.5},
                                "ladder":[100,1000,10000]}})");
  const double beta = num(env.summary["beta_hat"]);
  bool beats = true;
  int evaluated = 0;
  std::string margins;
  for (const auto& pt : env.summary["ladder"]) {
    if (!pt["grid_evaluated"].get<bool>()) continue;
    ++evaluated;
    beats = beats && num(pt["grid_sum"]) < num(pt["random_offset_mean"]);
    margins += fmt::format(" N={}: {:.5f} vs {:.5f}", pt["N"].get<std::int64_t>(), num(pt["grid_sum"]), num(pt["random_offset_mean"]));
  }
  return {beta >= 1.2 && beats && evaluated > 0, fmt::format("beta_hat = {:.3f}; chosen offset vs random mean:{}", beta, margins)};
}

Outcome check_pm_decay() {
  const auto env = run_json(R"({"experiment":"pm-decay","params":{"amplitude":2,"m_values":[1,2,3,4,5],"ratio":3}})");
  const double pm1 = num(env.summary["samples"][0]["pm"]);
  const double bessel = oracle::bessel_sup(2.0);
  const double c = num(env.summary["c"]);
  const double r2 = num(env.summary["r_squared"]);
  return {std::abs(pm1 - bessel) / bessel <= 0.03 && c > 0 && r2 >= 0.95,
          fmt::format("pm(m=1) = {:.5f} vs Bessel {:.5f}; slope {:.4f}; R^2 = {:.4f}", pm1, bessel, c, r2)};
}

Outcome check_concentration() {
  const auto env = run_json(R"({"experiment":"concentration","weights":{"kind":"table","params":{"values":[5.0]}},
                                "params":{"first":1,"last":1,"phase":"zero","trials":10000}})");
  const double mean = num(env.summary["fluctuation_mean"]);
  const double se = num(env.summary["fluctuation_stderr"]);
  const double oracle_value = oracle::folded_poisson_mean(5.0);
  return {std::abs(mean - oracle_value) <= 3 * se,
          fmt::format("mean |xi - 5| = {:.4f} +- {:.4f} vs series {:.4f}", mean, se, oracle_value)};
}

Outcome check_reproducibility() {
  const char* configs[] = {
      R"({"experiment":"counting","weights":{"kind":"harmonic","params":{"alpha":2},"N":100000},"params":{"seeds":50}})",
      R"({"experiment":"martingale","params":{"checkpoints":[0,50,100],"seeds":300,"halving_seeds":50}})",
      R"({"experiment":"hit-ladder","weights":{"kind":"harmonic","params":{"alpha":3},"N":10000},"params":{"ladder":[100,1000,10000],"trials":200}})",
  };
  const auto root = fs::temp_directory_path() / "bohrlab-acceptance";
  int files = 0, mismatches = 0;
  for (const char* text : configs) {
    auto c = ExperimentConfig::from_json(Json::parse(text));
    c.master_seed = kSeed;
    std::vector<fs::path> dirs;
    for (unsigned workers : {1u, 4u, 1u}) {
      const auto dir = root / fmt::format("{}-{}-{}", c.experiment, workers, dirs.size());
      fs::remove_all(dir);
      c.workers = workers;
      c.output_dir = dir.string();
      c.plot = true;
      run(c);
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().filename() == "timing.json") continue;
      ++files;
      for (std::size_t k = 1; k < dirs.size(); ++k)
        mismatches += read_file(entry.path()) != read_file(dirs[k] / entry.path().filename());
    }
  }
  return {mismatches == 0 && files > 0,
          fmt::format("{} output files per run, 3 experiments, sequential/parallel/rerun: {} mismatches", files, mismatches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sampler fidelity", check_sampler_fidelity},
      {"splitting law", check_splitting_law},
      {"relation search correctness", check_relation_search},
      {"quasi-independence regime", check_qi_regime},
      {"counting criterion", check_counting},
      {"martingale identity", check_martingale_identity},
      {"second-moment identity", check_second_moment},
      {"condition sum", check_condition_sum},
      {"density of hits", check_density},
      {"grid procedure", check_grid_procedure},
      {"PM decay", check_pm_decay},
      {"concentration check", check_concentration},
      {"end-to-end reproducibility", check_reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %2zu %s %s: %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
