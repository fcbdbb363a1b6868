#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bohrlab/analyticity.hpp"
#include "bohrlab/bohr.hpp"
#include "bohrlab/martingale.hpp"
#include "bohrlab/sidon.hpp"

namespace bohrlab {

using Json = nlohmann::json;

/// CSV cell. Doubles are written in shortest round-trip form.
using Cell = std::variant<std::int64_t, double, std::string>;

/// A named table emitted as CSV (comma separated, header row, LF endings).
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws ValidationError when the row width differs from the header.
  void add_row(std::vector<Cell> row);
  bool empty() const noexcept { return rows.empty(); }
  /// Numeric view of one column (strings become NaN).
  std::vector<double> numeric_column(const std::string& column) const;
};

std::string to_csv(const DataTable& table);
std::string format_cell(const Cell& cell);

/// Weight spec {kind, params, N}.
Json weight_spec(const WeightKind& kind, std::int64_t horizon);
WeightSequence weights_from_spec(const Json& spec);
WeightKind kind_from_spec(const Json& spec);

Json to_json(const RandomSet& set);
RandomSet random_set_from_json(const Json& j);
/// Two-column CSV form (n, multiplicity).
DataTable members_table(const RandomSet& set, const std::string& name = "members");

Json to_json(const RegimeReport& report);
Json to_json(const Relation& relation);
Json to_json(const SidonReport& report);
Json to_json(const SpectralVector& v);
Json to_json(const AtomicMeasure& m);
Json to_json(const PmEstimate& e);
Json to_json(const MomentEstimate& e);
Json to_json(const SecondMomentBound& b);
Json to_json(const SecondMomentValue& v);
Json to_json(const OrbitReport& r);
Json to_json(const GridProcedureReport& r);
Json to_json(const DecayFit& fit);
Json to_json(const ConcentrationReport& r);

/// Writes bytes exactly as given (binary mode, no newline translation).
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace bohrlab
