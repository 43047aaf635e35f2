#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "brs/data_io.hpp"
#include "brs/errors.hpp"
#include "support/random_scenario.hpp"

using namespace brs;
namespace fs = std::filesystem;

namespace {

HourlySeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_series(in, "mem.csv", UnitTag::MW);
}

ParseError parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no parse error for:\n" << text;
    return ParseError("", "", "");
}

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("brs_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kMinimal = R"({
  "horizon": 2,
  "vg": {"capacity": 100, "forecast_mean": [40, 60]},
  "da_price": [30, 32]
})";

}  // namespace

TEST(Series, WellFormed) {
    std::string text = "hour,value\n";
    for (int h = 0; h < 24; ++h) text += std::to_string(h) + "," + std::to_string(10.5 + h) + "\n";
    const auto s = parse(text);
    ASSERT_EQ(s.size(), 24u);
    EXPECT_DOUBLE_EQ(s.values(12), 22.5);
    EXPECT_EQ(s.hours.back(), 23);
}

TEST(Series, Errors) {
    auto dup = parse_error("hour,value\n0,1\n1,2\n1,3\n");
    EXPECT_EQ(dup.location(), "4");
    EXPECT_NE(std::string(dup.what()).find("mem.csv"), std::string::npos);

    EXPECT_EQ(parse_error("hour,value\n0,1\n2,2\n").location(), "3");
    EXPECT_EQ(parse_error("hour,value\n0,abc\n").location(), "2");
    EXPECT_EQ(parse_error("hour,value\n0,1,2\n").location(), "2");
    EXPECT_EQ(parse_error("hour,value\r\n0,1\r\n").location(), "1");
    EXPECT_EQ(parse_error("time,value\n0,1\n").location(), "1");
    EXPECT_NE(parse_error("hour,value\n").reason().find("empty"), std::string::npos);
}

TEST(Series, FileRoundTrip) {
    const auto dir = temp_dir("series");
    HourlySeries s;
    s.hours = {0, 1, 2};
    s.values = Eigen::VectorXd::LinSpaced(3, 1.25, 7.0);
    s.unit = UnitTag::DollarsPerMWh;
    write_series(s, dir / "s.csv");
    const auto back = load_series(dir / "s.csv", UnitTag::DollarsPerMWh);
    EXPECT_EQ(back.hours, s.hours);
    EXPECT_EQ(back.values, s.values);
}

TEST(Scenario, MinimalAppliesDefaults) {
    const auto cfg = scenario_from_json(nlohmann::json::parse(kMinimal), "min.json");
    EXPECT_EQ(cfg.horizon, 2);
    EXPECT_EQ(cfg.vg_id, "vg");
    EXPECT_EQ(cfg.penalty.over, 0.3);
    EXPECT_EQ(cfg.variance_coefficient, kDefaultVarianceCoefficient);
    EXPECT_EQ(cfg.variance_scales, std::vector<double>{1.0});
    EXPECT_TRUE(cfg.units.empty());
    EXPECT_EQ(cfg.schedule(1).da_quantity, 60);
    EXPECT_EQ(cfg.rt_price_at(1), 32);
}

TEST(Scenario, UnknownFieldNamesPath) {
    auto j = nlohmann::json::parse(kMinimal);
    j["vg"]["colour"] = "blue";
    try {
        scenario_from_json(j, "x.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.location(), "$.vg.colour");
    }
    auto k = nlohmann::json::parse(kMinimal);
    k["da_price"] = {30, "x"};
    try {
        scenario_from_json(k, "x.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.location(), "$.da_price[1]");
    }
}

TEST(Scenario, CrossFieldErrorsNamePath) {
    auto j = nlohmann::json::parse(kMinimal);
    j["da_price"] = {30};
    try {
        scenario_from_json(j, "x.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.location(), "$.da_price");
    }

    auto cfg = scenario_from_json(nlohmann::json::parse(kMinimal), "x.json");
    cfg.forecast_mean[1] = 100;
    try {
        validate(cfg);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("vg.forecast_mean[1]"), std::string::npos) << e.what();
    }
}

TEST(Scenario, SeriesFileReferences) {
    const auto dir = temp_dir("refs");
    std::ofstream(dir / "price.csv") << "hour,value\n0,30\n1,32\n";
    auto j = nlohmann::json::parse(kMinimal);
    j["da_price"] = {{"file", "price.csv"}, {"unit", "$/MWh"}};
    std::ofstream(dir / "s.json") << j.dump();
    EXPECT_EQ(load_scenario(dir / "s.json").da_price, (std::vector<double>{30, 32}));

    j["da_price"]["unit"] = "MW";
    std::ofstream(dir / "s.json") << j.dump();
    EXPECT_THROW(load_scenario(dir / "s.json"), ParseError);
}

TEST(ScenarioProperties, RoundTripRandomConfigs) {
    const auto dir = temp_dir("roundtrip");
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto cfg = testing_support::random_scenario(seed);
        ASSERT_NO_THROW(validate(cfg)) << seed;
        EXPECT_EQ(scenario_from_json(scenario_to_json(cfg), "mem"), cfg) << seed;
        save_scenario(cfg, dir / "cfg.json");
        EXPECT_EQ(load_scenario(dir / "cfg.json"), cfg) << seed;
    }
}

TEST(Tables, NumberFormatting) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(1.40625), "1.40625");
    EXPECT_EQ(format_number(1331.25), "1331.25");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333");
    EXPECT_EQ(format_number(123456789.0), "1.23457e+08");
}

TEST(Tables, RoundTripBothFormats) {
    Table t{{"direction", "alpha", "quantity", "marginal_value"}, {}};
    t.add_row({std::string("down_covers_over"), 0.3, 0.0, 4.5});
    t.add_row({std::string("up_covers_under"), 0.1, 12.5, 1.40625});
    t.add_row({std::string("12"), 0.5, 50.0, 0.0});
    t.add_row({std::string("a, \"quoted\""), 0.5, 50.0, 0.0});
    for (auto fmt : {TableFormat::Csv, TableFormat::Json}) {
        EXPECT_EQ(parse_table(format_table(t, fmt), fmt, "mem"), t);
    }
    const auto dir = temp_dir("tables");
    write_table(t, dir / "t.csv");
    write_table(t, dir / "t.json");
    EXPECT_EQ(read_table(dir / "t.csv"), t);
    EXPECT_EQ(read_table(dir / "t.json"), t);
    EXPECT_THROW(write_table(t, dir / "t.txt"), DomainError);
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}
