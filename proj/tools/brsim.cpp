// brsim: command-line driver for the bilateral reserve service simulator.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brs/commands.hpp"
#include "brs/data_io.hpp"
#include "brs/errors.hpp"
#include "brs/simulation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Output {
    std::string path;
    std::string format = "csv";
};

void add_output(CLI::App* cmd, Output& out) {
    cmd->add_option("--out", out.path, "Write the table here instead of stdout");
    cmd->add_option("--format", out.format, "Table format for stdout: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const brs::Table& t, const Output& out) {
    if (out.path.empty()) {
        const auto fmt = out.format == "json" ? brs::TableFormat::Json : brs::TableFormat::Csv;
        std::cout << brs::format_table(t, fmt);
        return;
    }
    brs::write_table(t, out.path);
    std::cout << out.path << "\n";
}

std::vector<double> default_ratios() {
    std::vector<double> r;
    for (int i = 0; i <= 10; ++i) r.push_back(0.05 * i);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilateral reserve service market simulator"};
    app.require_subcommand(1);

    // demand-curve
    std::string dc_scenario;
    int dc_hour = 0;
    std::vector<double> dc_alphas;
    int dc_points = 21;
    Output dc_out;
    auto* dc = app.add_subcommand("demand-curve", "Marginal value of BRS per direction and penalty level");
    dc->add_option("scenario", dc_scenario, "Scenario JSON file")->required();
    dc->add_option("--hour", dc_hour, "Hour index")->required();
    dc->add_option("--alpha", dc_alphas, "Penalty factors (alpha+ = alpha-)");
    dc->add_option("--points", dc_points, "Grid points per curve");
    add_output(dc, dc_out);

    // optimal
    std::string op_scenario;
    int op_hour = 0;
    std::optional<double> op_down;
    std::optional<double> op_up;
    Output op_out;
    auto* op = app.add_subcommand("optimal", "Optimal BRS position and imbalance cost breakdown");
    op->add_option("scenario", op_scenario, "Scenario JSON file")->required();
    op->add_option("--hour", op_hour, "Hour index")->required();
    op->add_option("--down-price", op_down, "Downward BRS price, $/MW");
    op->add_option("--up-price", op_up, "Upward BRS price, $/MW");
    add_output(op, op_out);

    // profit-sweep
    std::string ps_scenario;
    std::vector<double> ps_ratios;
    std::vector<double> ps_scales;
    Output ps_out;
    auto* ps = app.add_subcommand("profit-sweep", "Expected daily profit over BRS price ratios and variance scales");
    ps->add_option("scenario", ps_scenario, "Scenario JSON file")->required();
    ps->add_option("--price-ratios", ps_ratios, "BRS price as a multiple of the DA price");
    ps->add_option("--variance-scales", ps_scales, "Forecast variance multipliers");
    add_output(ps, ps_out);

    // simulate-day
    std::string sd_scenario;
    std::string sd_out_dir;
    std::string sd_format = "both";
    auto* sd = app.add_subcommand("simulate-day", "Run the full BRS lifecycle for every hour");
    sd->add_option("scenario", sd_scenario, "Scenario JSON file")->required();
    sd->add_option("--out-dir", sd_out_dir, "Directory for contracts, ledger and totals");
    sd->add_option("--format", sd_format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

    // supply-risk
    std::string sr_kind = "both";
    brs::cli::SupplyRiskOptions sr;
    Output sr_out;
    auto* srisk = app.add_subcommand("supply-risk", "Incremental cash-flow variance of BRS providers");
    srisk->add_option("--unit-kind", sr_kind, "base_load, marginal or both")
        ->check(CLI::IsMember({"base_load", "marginal", "both"}));
    srisk->add_option("--samples", sr.samples, "Monte Carlo samples");
    srisk->add_option("--seed", sr.seed, "RNG seed");
    srisk->add_option("--correlation", sr.correlation, "Correlation between RT price gap and executed BRS");
    srisk->add_flag("--enumerate", sr.enumerate, "Use the exhaustive four-outcome scenario set");
    add_output(srisk, sr_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*dc) {
            const auto cfg = brs::load_scenario(dc_scenario);
            emit(brs::cli::demand_curve_table(cfg, dc_hour, dc_alphas, dc_points), dc_out);
        } else if (*op) {
            const auto cfg = brs::load_scenario(op_scenario);
            emit(brs::cli::optimal_table(brs::cli::optimal(cfg, op_hour, op_down, op_up)), op_out);
        } else if (*ps) {
            const auto cfg = brs::load_scenario(ps_scenario);
            if (ps_ratios.empty()) ps_ratios = default_ratios();
            if (ps_scales.empty()) ps_scales = cfg.variance_scales;
            emit(brs::cli::profit_sweep_table(cfg, ps_ratios, ps_scales), ps_out);
        } else if (*sd) {
            const auto cfg = brs::load_scenario(sd_scenario);
            const auto day = brs::simulate_day(cfg);
            const auto tables = brs::cli::day_tables(day);
            if (sd_out_dir.empty()) {
                std::cout << brs::format_table(tables.totals, brs::TableFormat::Csv);
            } else {
                fs::create_directories(sd_out_dir);
                std::vector<brs::TableFormat> formats;
                if (sd_format != "json") formats.push_back(brs::TableFormat::Csv);
                if (sd_format != "csv") formats.push_back(brs::TableFormat::Json);
                for (auto fmt : formats) {
                    const std::string ext = fmt == brs::TableFormat::Csv ? ".csv" : ".json";
                    const fs::path dir(sd_out_dir);
                    brs::write_table(tables.contracts, dir / ("contracts" + ext), fmt);
                    brs::write_table(tables.ledger, dir / ("ledger" + ext), fmt);
                    brs::write_table(tables.totals, dir / ("totals" + ext), fmt);
                    brs::write_table(tables.schedules, dir / ("schedules" + ext), fmt);
                    brs::write_table(tables.hours, dir / ("hours" + ext), fmt);
                }
                std::cout << sd_out_dir << "\n";
            }
        } else if (*srisk) {
            if (sr_kind != "both") sr.kind = brs::unit_kind_from_string(sr_kind);
            emit(brs::cli::supply_risk_table(sr), sr_out);
        }
    } catch (const brs::cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const brs::InvariantViolation& e) {
        std::cerr << "invariant failed [" << e.invariant() << "]: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return EXIT_SUCCESS;
}
