#include "brs/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "brs/errors.hpp"

namespace brs {

using nlohmann::json;

ParseError::ParseError(std::string source, std::string location, std::string reason)
    : std::runtime_error(source + ":" + location + ": " + reason), source_(std::move(source)),
      location_(std::move(location)), reason_(std::move(reason)) {}

std::string_view to_string(UnitTag u) noexcept {
    switch (u) {
        case UnitTag::DollarsPerMWh: return "$/MWh";
        case UnitTag::DollarsPerMW: return "$/MW";
        case UnitTag::MW: return "MW";
        case UnitTag::MW2: return "MW^2";
    }
    return "?";
}

UnitTag unit_tag_from_string(std::string_view s) {
    for (UnitTag u : {UnitTag::DollarsPerMWh, UnitTag::DollarsPerMW, UnitTag::MW, UnitTag::MW2}) {
        if (s == to_string(u)) return u;
    }
    throw DomainError("unknown unit tag '" + std::string(s) + "'");
}

namespace {

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "0", "cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

// --- strict JSON reader ----------------------------------------------------

class Reader {
public:
    Reader(const json& j, std::string path, const std::string& source)
        : j_(j), path_(std::move(path)), source_(source) {}

    [[noreturn]] void fail(const std::string& reason) const {
        throw ParseError(source_, path_, reason);
    }

    const json& value() const { return j_; }
    const std::string& path() const { return path_; }

    void expect_object(std::initializer_list<std::string_view> allowed) const {
        if (!j_.is_object()) fail("expected an object");
        for (const auto& [key, v] : j_.items()) {
            const bool known = std::find(allowed.begin(), allowed.end(), key) != allowed.end();
            if (!known) throw ParseError(source_, path_ + "." + key, "unknown field");
        }
    }

    bool has(std::string_view key) const { return j_.contains(key); }

    Reader at(std::string_view key) const {
        if (!j_.contains(key)) throw ParseError(source_, path_ + "." + std::string(key), "required field missing");
        return Reader(j_.at(std::string(key)), path_ + "." + std::string(key), source_);
    }

    Reader at(std::size_t i) const {
        return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]", source_);
    }

    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }

    int integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        const auto v = j_.get<std::int64_t>();
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("integer out of range");
        return static_cast<int>(v);
    }

    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
            fail("expected a nonnegative integer");
        }
        return j_.get<std::uint64_t>();
    }

    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }

    std::size_t array_size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        const auto n = array_size();
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(at(i).number());
        return out;
    }

    double number_or(std::string_view key, double fallback) const {
        return has(key) ? at(key).number() : fallback;
    }

    std::optional<std::string> optional_string(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        return at(key).string();
    }

private:
    const json& j_;
    std::string path_;
    const std::string& source_;
};

std::vector<double> read_series(const Reader& r, UnitTag expected,
                                const std::filesystem::path& base_dir) {
    if (r.value().is_array()) return r.numbers();
    if (!r.value().is_object()) r.fail("expected an array of numbers or a series file reference");
    r.expect_object({"file", "unit"});
    const auto unit_text = r.at("unit").string();
    UnitTag unit{};
    try {
        unit = unit_tag_from_string(unit_text);
    } catch (const DomainError&) {
        r.at("unit").fail("unknown unit tag '" + unit_text + "'");
    }
    if (unit != expected) {
        r.at("unit").fail("unit " + unit_text + " where " + std::string(to_string(expected)) +
                          " is required");
    }
    const auto file = base_dir / r.at("file").string();
    return load_series(file, unit).to_vector();
}

Direction read_direction(const Reader& r) {
    const auto s = r.string();
    if (s == "down_covers_over") return Direction::DownCoversOver;
    if (s == "up_covers_under") return Direction::UpCoversUnder;
    r.fail("direction must be 'down_covers_over' or 'up_covers_under'");
}

json series_json(const std::vector<double>& v) { return json(v); }

}  // namespace

// --- series ----------------------------------------------------------------

HourlySeries parse_series(std::istream& in, const std::string& source, UnitTag unit) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError(source, "1", "missing header 'hour,value'");
    ++line_no;
    if (line.find('\r') != std::string::npos) throw ParseError(source, "1", "CR line ending; expected LF");
    if (line != "hour,value") throw ParseError(source, "1", "header must be 'hour,value'");

    HourlySeries series;
    series.unit = unit;
    std::vector<double> values;
    std::set<int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto loc = std::to_string(line_no);
        if (line.empty()) {
            std::string rest;
            while (std::getline(in, rest)) {
                if (!rest.empty()) throw ParseError(source, loc, "blank line inside series");
            }
            break;
        }
        if (line.find('\r') != std::string::npos) throw ParseError(source, loc, "CR line ending; expected LF");
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(source, loc, "expected two fields 'hour,value'");
        }
        const std::string_view hour_text(line.data(), comma);
        const std::string_view value_text(line.data() + comma + 1, line.size() - comma - 1);
        const auto hour = parse_int(hour_text);
        if (!hour) throw ParseError(source, loc, "non-integer hour '" + std::string(hour_text) + "'");
        const auto value = parse_double(value_text);
        if (!value || !std::isfinite(*value)) {
            throw ParseError(source, loc, "non-numeric value '" + std::string(value_text) + "'");
        }
        if (!seen.insert(*hour).second) {
            throw ParseError(source, loc, "duplicate hour " + std::to_string(*hour));
        }
        if (!series.hours.empty()) {
            const int prev = series.hours.back();
            if (*hour < prev) throw ParseError(source, loc, "hour " + std::to_string(*hour) + " out of order");
            if (*hour != prev + 1) throw ParseError(source, loc, "missing hour " + std::to_string(prev + 1));
        }
        series.hours.push_back(*hour);
        values.push_back(*value);
    }
    if (series.hours.empty()) throw ParseError(source, std::to_string(line_no), "series is empty");
    series.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return series;
}

HourlySeries load_series(const std::filesystem::path& path, UnitTag unit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "0", "cannot open file");
    return parse_series(in, path.string(), unit);
}

void write_series(const HourlySeries& series, const std::filesystem::path& path) {
    std::string out = "hour,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(series.hours[i]) + "," +
               format_number(series.values(static_cast<Eigen::Index>(i))) + "\n";
    }
    write_file(path, out);
}

// --- scenario --------------------------------------------------------------

ScenarioConfig scenario_from_json(const json& j, const std::string& source,
                                  const std::filesystem::path& base_dir) {
    const Reader root(j, "$", source);
    root.expect_object({"horizon", "seed", "vg", "da_price", "rt_price", "penalty",
                        "variance_scales", "brs_price", "units", "offers", "realized",
                        "zonal_rule", "claim_error_sd"});

    ScenarioConfig cfg;
    cfg.horizon = root.at("horizon").integer();
    if (root.has("seed")) cfg.seed = root.at("seed").unsigned_integer();

    const auto vg = root.at("vg");
    vg.expect_object({"id", "zone", "capacity", "forecast_mean", "forecast_variance",
                      "variance_coefficient", "da_schedule"});
    if (vg.has("id")) cfg.vg_id = vg.at("id").string();
    cfg.vg_zone = vg.optional_string("zone");
    cfg.capacity = vg.at("capacity").number();
    cfg.forecast_mean = read_series(vg.at("forecast_mean"), UnitTag::MW, base_dir);
    if (vg.has("forecast_variance")) {
        cfg.forecast_variance = read_series(vg.at("forecast_variance"), UnitTag::MW2, base_dir);
    }
    cfg.variance_coefficient = vg.number_or("variance_coefficient", kDefaultVarianceCoefficient);
    if (vg.has("da_schedule")) cfg.vg_schedule = read_series(vg.at("da_schedule"), UnitTag::MW, base_dir);

    cfg.da_price = read_series(root.at("da_price"), UnitTag::DollarsPerMWh, base_dir);
    if (root.has("rt_price")) cfg.rt_price = read_series(root.at("rt_price"), UnitTag::DollarsPerMWh, base_dir);
    if (root.has("realized")) cfg.realized = read_series(root.at("realized"), UnitTag::MW, base_dir);

    if (root.has("penalty")) {
        const auto p = root.at("penalty");
        p.expect_object({"over", "under"});
        cfg.penalty.over = p.number_or("over", cfg.penalty.over);
        cfg.penalty.under = p.number_or("under", cfg.penalty.under);
    }
    if (root.has("variance_scales")) cfg.variance_scales = root.at("variance_scales").numbers();
    if (root.has("brs_price")) {
        const auto b = root.at("brs_price");
        b.expect_object({"mode", "down", "up"});
        if (b.has("mode")) {
            const auto mode = b.at("mode").string();
            if (mode == "ratio") {
                cfg.brs_price.mode = PriceMode::Ratio;
            } else if (mode == "absolute") {
                cfg.brs_price.mode = PriceMode::Absolute;
            } else {
                b.at("mode").fail("mode must be 'ratio' or 'absolute'");
            }
        }
        cfg.brs_price.down = b.number_or("down", cfg.brs_price.down);
        cfg.brs_price.up = b.number_or("up", cfg.brs_price.up);
    }
    cfg.claim_error_sd = root.number_or("claim_error_sd", 0.0);

    if (root.has("units")) {
        const auto units = root.at("units");
        for (std::size_t i = 0; i < units.array_size(); ++i) {
            const auto u = units.at(i);
            u.expect_object({"id", "kind", "p_min", "p_max", "marginal_cost", "da_schedule",
                             "rt_output", "zone"});
            UnitConfig uc;
            uc.id = u.at("id").string();
            const auto kind = u.at("kind").string();
            if (kind == "base_load") {
                uc.kind = UnitKind::BaseLoad;
            } else if (kind == "marginal") {
                uc.kind = UnitKind::Marginal;
            } else {
                u.at("kind").fail("kind must be 'base_load' or 'marginal'");
            }
            uc.p_min = u.at("p_min").number();
            uc.p_max = u.at("p_max").number();
            uc.marginal_cost = u.at("marginal_cost").number();
            const auto sched = u.at("da_schedule");
            if (sched.value().is_number()) {
                uc.da_schedule.assign(static_cast<std::size_t>(std::max(cfg.horizon, 0)), sched.number());
            } else {
                uc.da_schedule = read_series(sched, UnitTag::MW, base_dir);
            }
            if (u.has("rt_output")) uc.rt_output = read_series(u.at("rt_output"), UnitTag::MW, base_dir);
            uc.zone = u.optional_string("zone");
            cfg.units.push_back(std::move(uc));
        }
    }

    if (root.has("offers")) {
        const auto offers = root.at("offers");
        for (std::size_t i = 0; i < offers.array_size(); ++i) {
            const auto o = offers.at(i);
            o.expect_object({"seller", "hour", "direction", "price", "quantity", "zone"});
            Offer offer;
            offer.seller = o.at("seller").string();
            offer.hour = o.at("hour").integer();
            offer.direction = read_direction(o.at("direction"));
            offer.price = o.at("price").number();
            offer.quantity = o.at("quantity").number();
            offer.zone = o.optional_string("zone");
            cfg.offers.push_back(std::move(offer));
        }
    }

    if (root.has("zonal_rule")) {
        const auto z = root.at("zonal_rule");
        z.expect_object({"flagged_boundaries"});
        ZonalRule rule;
        const auto pairs = z.at("flagged_boundaries");
        for (std::size_t i = 0; i < pairs.array_size(); ++i) {
            const auto pair = pairs.at(i);
            if (pair.array_size() != 2) pair.fail("expected a pair of zone names");
            rule.flagged_boundaries.emplace(pair.at(0).string(), pair.at(1).string());
        }
        cfg.zonal_rule = std::move(rule);
    }

    try {
        validate(cfg);
    } catch (const DomainError& e) {
        const std::string what = e.what();
        const auto colon = what.find(": ");
        throw ParseError(source, "$." + what.substr(0, colon),
                         colon == std::string::npos ? what : what.substr(colon + 2));
    }
    return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
    json vg = {{"id", cfg.vg_id},
               {"capacity", cfg.capacity},
               {"forecast_mean", series_json(cfg.forecast_mean)},
               {"variance_coefficient", cfg.variance_coefficient}};
    if (cfg.vg_zone) vg["zone"] = *cfg.vg_zone;
    if (!cfg.forecast_variance.empty()) vg["forecast_variance"] = series_json(cfg.forecast_variance);
    if (!cfg.vg_schedule.empty()) vg["da_schedule"] = series_json(cfg.vg_schedule);

    json j = {{"horizon", cfg.horizon},
              {"seed", cfg.seed},
              {"vg", vg},
              {"da_price", series_json(cfg.da_price)},
              {"penalty", {{"over", cfg.penalty.over}, {"under", cfg.penalty.under}}},
              {"variance_scales", cfg.variance_scales},
              {"brs_price",
               {{"mode", cfg.brs_price.mode == PriceMode::Ratio ? "ratio" : "absolute"},
                {"down", cfg.brs_price.down},
                {"up", cfg.brs_price.up}}},
              {"claim_error_sd", cfg.claim_error_sd}};
    if (!cfg.rt_price.empty()) j["rt_price"] = series_json(cfg.rt_price);
    if (!cfg.realized.empty()) j["realized"] = series_json(cfg.realized);

    json units = json::array();
    for (const auto& u : cfg.units) {
        json ju = {{"id", u.id},
                   {"kind", std::string(to_string(u.kind))},
                   {"p_min", u.p_min},
                   {"p_max", u.p_max},
                   {"marginal_cost", u.marginal_cost},
                   {"da_schedule", series_json(u.da_schedule)}};
        if (!u.rt_output.empty()) ju["rt_output"] = series_json(u.rt_output);
        if (u.zone) ju["zone"] = *u.zone;
        units.push_back(std::move(ju));
    }
    j["units"] = std::move(units);

    json offers = json::array();
    for (const auto& o : cfg.offers) {
        json jo = {{"seller", o.seller},
                   {"hour", o.hour},
                   {"direction", std::string(to_string(o.direction))},
                   {"price", o.price},
                   {"quantity", o.quantity}};
        if (o.zone) jo["zone"] = *o.zone;
        offers.push_back(std::move(jo));
    }
    j["offers"] = std::move(offers);

    if (cfg.zonal_rule) {
        json pairs = json::array();
        for (const auto& [a, b] : cfg.zonal_rule->flagged_boundaries) pairs.push_back({a, b});
        j["zonal_rule"] = {{"flagged_boundaries", pairs}};
    }
    return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    const auto text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), "byte " + std::to_string(e.byte), "malformed JSON");
    }
    return scenario_from_json(j, path.string(), path.parent_path());
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    write_file(path, scenario_to_json(cfg).dump(2) + "\n");
}

// --- tables ----------------------------------------------------------------

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("table row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
}

double Table::number(std::size_t row, std::string_view col) const {
    return std::get<double>(rows.at(row).at(column(col)));
}

const std::string& Table::text(std::size_t row, std::string_view col) const {
    return std::get<std::string>(rows.at(row).at(column(col)));
}

TableFormat table_format_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return TableFormat::Csv;
    if (ext == ".json") return TableFormat::Json;
    throw DomainError("cannot infer table format from '" + path.string() + "'");
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return {buf, ptr};
}

namespace {

bool needs_quotes(const std::string& s) {
    if (s.empty() || parse_double(s)) return true;
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    const auto& s = std::get<std::string>(c);
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Splits one CSV record; quoted fields stay strings, bare numeric fields become numbers.
std::vector<Cell> split_record(std::string_view line, const std::string& source, int line_no) {
    std::vector<Cell> cells;
    std::size_t i = 0;
    while (true) {
        if (i < line.size() && line[i] == '"') {
            std::string field;
            ++i;
            while (true) {
                if (i >= line.size()) throw ParseError(source, std::to_string(line_no), "unterminated quote");
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += line[i++];
            }
            cells.emplace_back(std::move(field));
        } else {
            const auto end = line.find(',', i);
            const auto field = line.substr(i, end == std::string_view::npos ? line.size() - i : end - i);
            if (auto v = parse_double(field)) {
                cells.emplace_back(*v);
            } else {
                cells.emplace_back(std::string(field));
            }
            i = end == std::string_view::npos ? line.size() : end;
        }
        if (i >= line.size()) break;
        if (line[i] != ',') throw ParseError(source, std::to_string(line_no), "garbage after quoted field");
        ++i;
    }
    return cells;
}

}  // namespace

std::string format_table(const Table& t, TableFormat format) {
    if (format == TableFormat::Json) {
        nlohmann::ordered_json j;
        j["columns"] = t.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            auto jr = nlohmann::ordered_json::array();
            for (const auto& c : row) {
                if (const auto* d = std::get_if<double>(&c)) {
                    jr.push_back(*d);
                } else {
                    jr.push_back(std::get<std::string>(c));
                }
            }
            rows.push_back(std::move(jr));
        }
        j["rows"] = std::move(rows);
        return j.dump(2) + "\n";
    }

    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(Cell(t.columns[i]));
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(row[i]);
        }
        out += '\n';
    }
    return out;
}

Table parse_table(std::string_view text, TableFormat format, const std::string& source) {
    Table t;
    if (format == TableFormat::Json) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(source, "byte " + std::to_string(e.byte), "malformed JSON");
        }
        const Reader root(j, "$", source);
        root.expect_object({"columns", "rows"});
        const auto cols = root.at("columns");
        for (std::size_t i = 0; i < cols.array_size(); ++i) t.columns.push_back(cols.at(i).string());
        const auto rows = root.at("rows");
        for (std::size_t r = 0; r < rows.array_size(); ++r) {
            const auto row = rows.at(r);
            if (row.array_size() != t.columns.size()) row.fail("row width does not match columns");
            std::vector<Cell> cells;
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                const auto cell = row.at(c);
                if (cell.value().is_number()) {
                    cells.emplace_back(cell.number());
                } else {
                    cells.emplace_back(cell.string());
                }
            }
            t.rows.push_back(std::move(cells));
        }
        return t;
    }

    int line_no = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw ParseError(source, std::to_string(line_no + 1), "missing final LF");
        }
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        auto cells = split_record(line, source, line_no);
        if (header) {
            for (auto& c : cells) {
                if (const auto* s = std::get_if<std::string>(&c)) {
                    t.columns.push_back(*s);
                } else {
                    t.columns.push_back(format_number(std::get<double>(c)));
                }
            }
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw ParseError(source, std::to_string(line_no), "row width does not match header");
        }
        t.rows.push_back(std::move(cells));
    }
    if (header) throw ParseError(source, "1", "missing header");
    return t;
}

void write_table(const Table& t, const std::filesystem::path& path, TableFormat format) {
    write_file(path, format_table(t, format));
}

void write_table(const Table& t, const std::filesystem::path& path) {
    write_table(t, path, table_format_for(path));
}

Table read_table(const std::filesystem::path& path) {
    return parse_table(read_file(path), table_format_for(path), path.string());
}

}  // namespace brs
