#include "bohrlab/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "bohrlab/errors.hpp"

namespace bohrlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// JSON has no inf/nan; they are written as strings so reports stay lossless.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double get_double(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

Json interval_json(const Arc& a) { return Json{{"start", a.start}, {"length", a.length}}; }

Json torus_json(const TorusPoint& t) {
  return Json{{"numerator", t.numerator()}, {"denominator", t.denominator()}, {"value", t.value()}};
}

}  // namespace

void DataTable::add_row(std::vector<Cell> row) {
  require(row.size() == columns.size(), "table '" + name + "': row width differs from header");
  rows.push_back(std::move(row));
}

std::vector<double> DataTable::numeric_column(const std::string& column) const {
  std::size_t idx = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) idx = i;
  require(idx < columns.size(), "table '" + name + "': no column '" + column + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back(std::visit(Overloaded{
                                 [](std::int64_t v) { return static_cast<double>(v); },
                                 [](double v) { return v; },
                                 [](const std::string&) { return std::numeric_limits<double>::quiet_NaN(); },
                             },
                             row[idx]));
  }
  return out;
}

std::string format_cell(const Cell& cell) {
  return std::visit(Overloaded{
                        [](std::int64_t v) { return fmt::format("{}", v); },
                        [](double v) {
                          if (std::isnan(v)) return std::string("nan");
                          if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
                          return fmt::format("{}", v);
                        },
                        [](const std::string& s) { return quote_if_needed(s); },
                    },
                    cell);
}

std::string to_csv(const DataTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += quote_if_needed(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json weight_spec(const WeightKind& kind, std::int64_t horizon) {
  Json params = std::visit(Overloaded{
                               [](const Harmonic& h) { return Json{{"alpha", h.alpha}}; },
                               [](const Growing& g) {
                                 return Json{{"law", growth_law_name(g.law)}, {"alpha", g.alpha}, {"delta", g.delta}};
                               },
                               [](const MixedCounterexample& m) {
                                 return Json{{"sparse_value", m.sparse_value},
                                             {"sparse_base", m.sparse_base},
                                             {"background_alpha", m.background_alpha}};
                               },
                               [](const Table& t) { return Json{{"values", t.values}}; },
                           },
                           kind);
  return Json{{"kind", kind_name(kind)}, {"params", params}, {"N", horizon}};
}

WeightKind kind_from_spec(const Json& spec) {
  require(spec.is_object() && spec.contains("kind"), "weights: spec needs a 'kind' field");
  const auto kind = spec.at("kind").get<std::string>();
  const Json params = spec.value("params", Json::object());
  require(params.is_object(), "weights: 'params' must be an object");
  if (kind == "harmonic") return Harmonic{get_double(params, "alpha", 1.0)};
  if (kind == "growing") {
    Growing g;
    g.law = parse_growth_law(params.value("law", std::string("log")));
    g.alpha = get_double(params, "alpha", 1.0);
    g.delta = get_double(params, "delta", 0.5);
    return g;
  }
  if (kind == "mixed_counterexample") {
    MixedCounterexample m;
    m.sparse_value = get_double(params, "sparse_value", 0.5);
    m.sparse_base = params.value("sparse_base", std::int64_t{3});
    m.background_alpha = get_double(params, "background_alpha", 1.0);
    return m;
  }
  if (kind == "table") {
    require(params.contains("values") && params.at("values").is_array(), "weights(table): 'values' array required");
    return Table{params.at("values").get<std::vector<double>>()};
  }
  throw ValidationError("weights: unknown kind '" + kind + "'");
}

WeightSequence weights_from_spec(const Json& spec) {
  auto kind = kind_from_spec(spec);
  std::int64_t N = 0;
  if (spec.contains("N")) {
    N = spec.at("N").get<std::int64_t>();
  } else if (const auto* t = std::get_if<Table>(&kind)) {
    N = static_cast<std::int64_t>(t->values.size());
  }
  require(N >= 1, "weights: spec needs N >= 1");
  return WeightSequence::make(std::move(kind), N);
}

Json to_json(const RandomSet& set) {
  Json members = Json::array();
  for (const auto& m : set.members()) members.push_back(Json::array({m.n, m.multiplicity}));
  Json j{{"horizon", set.horizon()},
         {"seed", set.seed()},
         {"source", source_name(set.source())},
         {"members", std::move(members)}};
  if (set.overlapping_seeds()) j["overlapping_seeds"] = true;
  return j;
}

RandomSet random_set_from_json(const Json& j) {
  std::vector<Member> members;
  for (const auto& m : j.at("members")) members.push_back({m.at(0).get<std::int64_t>(), m.at(1).get<std::int64_t>()});
  return RandomSet(j.at("horizon").get<std::int64_t>(), std::move(members), j.at("seed").get<std::uint64_t>(),
                   parse_source(j.at("source").get<std::string>()));
}

DataTable members_table(const RandomSet& set, const std::string& name) {
  DataTable t{name, {"n", "multiplicity"}, {}};
  for (const auto& m : set.members()) t.add_row({m.n, m.multiplicity});
  return t;
}

Json to_json(const RegimeReport& r) {
  return Json{{"limsup_estimate", number(r.limsup_estimate)},
              {"liminf_estimate", number(r.liminf_estimate)},
              {"bound", number(r.bound)},
              {"block_minima", r.block_minima},
              {"verdict", regime_name(r.verdict)}};
}

Json to_json(const Relation& relation) {
  return Json{{"support", relation.support}, {"coefficients", relation.coefficients}, {"text", relation.to_string()}};
}

Json to_json(const SidonReport& r) {
  Json ratios = Json::array();
  for (double x : r.profile.ratios) ratios.push_back(number(x));
  Json evidence{{"checkpoints", r.profile.checkpoints},
                {"counts", r.profile.counts},
                {"ratio_series", ratios},
                {"ratio_growth", number(r.ratio_growth)},
                {"part_count", r.part_count},
                {"decomposition_certified", r.decomposition_certified}};
  if (r.relation) evidence["relation"] = to_json(*r.relation);
  return Json{{"verdict", verdict_name(r.verdict)}, {"evidence", evidence}};
}

Json to_json(const SpectralVector& v) {
  Json j = Json::object();
  for (const auto& [k, c] : v.entries) j[std::to_string(k)] = Json::array({c.real(), c.imag()});
  return j;
}

Json to_json(const AtomicMeasure& m) {
  Json j = Json::object();
  for (const auto& [k, w] : m.atoms) j[std::to_string(k)] = w;
  return j;
}

Json to_json(const PmEstimate& e) {
  return Json{{"value", e.value},
              {"grid_size", e.grid_size},
              {"argmax", e.argmax},
              {"derivative_bound", e.derivative_bound},
              {"certified_radius", e.certified_radius}};
}

Json to_json(const MomentEstimate& e) {
  return Json{{"N", e.N},
              {"seeds", e.seeds},
              {"target", e.target},
              {"mean", e.mean},
              {"mean_stderr", e.mean_stderr},
              {"z_score", e.z_score},
              {"second_moment", e.second_moment},
              {"second_stderr", e.second_stderr},
              {"step", e.step}};
}

Json to_json(const SecondMomentBound& b) {
  return Json{{"condition_sum", b.condition_sum},
              {"alpha_s", b.alpha_s},
              {"condition_flag", b.condition},
              {"constant_c", b.constant},
              {"sine_integral", number(b.sine_integral)},
              {"bound_value", number(b.bound_value)}};
}

Json to_json(const SecondMomentValue& v) {
  return Json{{"N", v.N},
              {"exact_value", v.value},
              {"max_frequency", v.max_frequency},
              {"truncated_sum", v.truncated_sum},
              {"closed_form_sum", v.closed_form_sum},
              {"truncation_deficit", v.closed_form_sum - v.truncated_sum},
              {"step", v.step}};
}

Json to_json(const OrbitReport& r) {
  Json t = Json::array();
  for (const auto& p : r.generator) t.push_back(torus_json(p));
  Json box = Json::array();
  for (const auto& a : r.box) box.push_back(interval_json(a));
  Json j{{"t", t}, {"box", box}, {"N", r.N}, {"hit_count", r.hit_count}};
  j["first_hit"] = r.first_hit ? Json(*r.first_hit) : Json(nullptr);
  return j;
}

Json to_json(const GridProcedureReport& r) {
  Json ladder = Json::array();
  for (const auto& p : r.ladder) {
    Json e{{"N", p.N},
           {"M", p.M},
           {"integral_estimate", p.integral_estimate},
           {"integral_stderr", p.integral_stderr},
           {"clamped_estimate", p.clamped_estimate},
           {"scaled_bound", number(p.scaled_bound)},
           {"grid_evaluated", p.grid_evaluated}};
    if (p.grid_evaluated) {
      e["theta"] = p.theta;
      e["grid_sum"] = p.grid_sum;
      e["random_offset_mean"] = p.random_offset_mean;
      e["grid_points_in_g"] = p.grid_points_in_g;
    }
    ladder.push_back(std::move(e));
  }
  const auto& p = r.params;
  return Json{{"inputs",
               {{"alpha", p.alpha},
                {"interval", interval_json(p.interval)},
                {"d", p.d},
                {"k", p.k},
                {"delta", p.delta},
                {"ladder", p.ladder},
                {"trials", p.trials}}},
              {"inner_interval", interval_json(r.inner)},
              {"minorant", {{"degree", p.k}, {"coefficients", to_json(r.minorant.coefficients)}, {"sup_error", r.minorant.sup_error}}},
              {"open_set", {{"description", fmt::format("|sin(pi j t)| > {} for 1 <= j <= {}", p.delta, p.k)}, {"measure", r.g_measure}}},
              {"ladder", ladder},
              {"beta_hat", r.beta_hat},
              {"r_squared", r.r_squared},
              {"spacing", r.spacing},
              {"covering_ok", r.covering_ok}};
}

Json to_json(const DecayFit& fit) {
  Json samples = Json::array();
  for (const auto& s : fit.samples)
    samples.push_back(Json{{"m", s.m},
                           {"r", s.r},
                           {"pm", s.pm},
                           {"minus_log_pm", s.minus_log_pm},
                           {"resolution", s.resolution},
                           {"parseval", s.parseval}});
  return Json{{"samples", samples},
              {"c", fit.c},
              {"intercept", fit.intercept},
              {"base_constant", fit.base_constant},
              {"r_squared", fit.r_squared}};
}

Json to_json(const ConcentrationReport& r) {
  Json q = Json::object();
  for (std::size_t i = 0; i < r.quantile_levels.size(); ++i)
    q[fmt::format("{}", r.quantile_levels[i])] = number(r.rho_quantiles[i]);
  const auto& p = r.params;
  return Json{{"rho_quantiles", q},
              {"target_fraction", r.target_fraction},
              {"fluctuation_mean", r.fluctuation_mean},
              {"fluctuation_stderr", r.fluctuation_stderr},
              {"tau_mass_mean", r.tau_mass_mean},
              {"sigma_mass", r.sigma_mass},
              {"sigma_pm", r.sigma_pm},
              {"sigma_ratio", r.sigma_ratio},
              {"sigma_inequality", r.sigma_inequality},
              {"params",
               {{"first", p.first},
                {"last", p.last},
                {"c", p.c},
                {"C", p.C},
                {"r", p.r},
                {"trials", p.trials},
                {"dilation", p.dilation}}}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace bohrlab
