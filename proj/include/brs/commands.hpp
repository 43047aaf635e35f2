#pragma once

// Experiment drivers behind the `brsim` subcommands. Each returns a result
// table; the executable only parses flags and writes files.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "brs/data_io.hpp"
#include "brs/scenario.hpp"
#include "brs/simulation.hpp"

namespace brs::cli {

/// Bad flags or arguments (exit code 2).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void require_hour(const ScenarioConfig& cfg, int hour);

/// Rows (direction, alpha, quantity, marginal_value). Empty `alphas` uses the
/// scenario's own penalty factors; otherwise alpha+ = alpha- = alpha.
Table demand_curve_table(const ScenarioConfig& cfg, int hour, std::span<const double> alphas,
                         int points);

struct OptimalResult {
    BrsPosition position;
    OicReport oic;
    double gross_expected_revenue = 0.0;
    double net_expected_revenue = 0.0;
    double no_brs_expected_revenue = 0.0;
};

/// Unset prices fall back to the scenario's BRS price model.
OptimalResult optimal(const ScenarioConfig& cfg, int hour, std::optional<double> down_price,
                      std::optional<double> up_price);
Table optimal_table(const OptimalResult& r);

/// Expected profit summed over the horizon for BRS priced at ratio * lambda_D.
double expected_day_profit(const ScenarioConfig& cfg, double price_ratio, double variance_scale);
/// Expected revenue summed over the horizon with no BRS held.
double no_brs_day_revenue(const ScenarioConfig& cfg, double variance_scale);

/// Rows (scale, ratio, expected_profit, no_brs_revenue) sorted by (scale, ratio).
Table profit_sweep_table(const ScenarioConfig& cfg, std::span<const double> ratios,
                         std::span<const double> scales);

struct SupplyRiskOptions {
    std::optional<UnitKind> kind;  ///< unset: both kinds and the ordering verdict
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    double correlation = 0.0;
    bool enumerate = false;  ///< use the exhaustive four-outcome scenario set
};

/// Units used by supply-risk: identical schedules, differing RT price response.
DispatchableUnit default_base_load_unit();
DispatchableUnit default_marginal_unit();
ScenarioGeneratorConfig default_generator(std::uint64_t seed, double correlation);

Table supply_risk_table(const SupplyRiskOptions& opts);

struct DayTables {
    Table contracts;
    Table ledger;
    Table totals;
    Table schedules;
    Table hours;
};

DayTables day_tables(const DayResult& day);

}  // namespace brs::cli
