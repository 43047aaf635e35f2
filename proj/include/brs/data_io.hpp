#pragma once

// Scenario files, hourly series and result tables.
//
// Series CSV:  header `hour,value`, LF line endings, '.' decimal separator.
// Scenario:    JSON, strict schema (see docs/scenario-schema.md).
// Tables:      CSV (numbers at 6 significant digits) or JSON (full precision).

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "brs/scenario.hpp"

namespace brs {

/// Parse failure carrying the source, a line number or field path, and a reason.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::string location, std::string reason);

    const std::string& source() const noexcept { return source_; }
    const std::string& location() const noexcept { return location_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string source_;
    std::string location_;
    std::string reason_;
};

enum class UnitTag { DollarsPerMWh, DollarsPerMW, MW, MW2 };

std::string_view to_string(UnitTag u) noexcept;
UnitTag unit_tag_from_string(std::string_view s);

struct HourlySeries {
    std::vector<int> hours;
    Eigen::VectorXd values;
    UnitTag unit = UnitTag::MW;

    std::size_t size() const noexcept { return hours.size(); }
    std::vector<double> to_vector() const { return {values.data(), values.data() + values.size()}; }
};

HourlySeries parse_series(std::istream& in, const std::string& source, UnitTag unit);
HourlySeries load_series(const std::filesystem::path& path, UnitTag unit);
void write_series(const HourlySeries& series, const std::filesystem::path& path);

/// Series may be given inline as arrays or as {"file": ..., "unit": ...}
/// references, resolved relative to `base_dir`.
ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::string& source,
                                  const std::filesystem::path& base_dir = {});
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

// --- result tables ---------------------------------------------------------

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    /// Column index by name; throws std::out_of_range.
    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::string_view col) const;
    const std::string& text(std::size_t row, std::string_view col) const;

    bool operator==(const Table&) const = default;
};

enum class TableFormat { Csv, Json };

/// Picks the format from a `.csv` / `.json` extension.
TableFormat table_format_for(const std::filesystem::path& path);

/// Shortest round-trip text for `v` at 6 significant digits.
std::string format_number(double v);

std::string format_table(const Table& t, TableFormat format);
Table parse_table(std::string_view text, TableFormat format, const std::string& source);

void write_table(const Table& t, const std::filesystem::path& path, TableFormat format);
void write_table(const Table& t, const std::filesystem::path& path);
Table read_table(const std::filesystem::path& path);

}  // namespace brs
