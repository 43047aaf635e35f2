#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brs/forecast.hpp"
#include "brs/market_sim.hpp"
#include "brs/provider_economics.hpp"
#include "brs/vg_economics.hpp"

namespace brs {

enum class PriceMode { Absolute, Ratio };

/// BRS price per hour: a fixed $/MW, or a multiple of that hour's DA price.
struct BrsPriceModel {
    PriceMode mode = PriceMode::Ratio;
    double down = 0.1;
    double up = 0.1;

    double down_price(double da_price) const noexcept {
        return mode == PriceMode::Ratio ? down * da_price : down;
    }
    double up_price(double da_price) const noexcept {
        return mode == PriceMode::Ratio ? up * da_price : up;
    }
    bool operator==(const BrsPriceModel&) const = default;
};

struct UnitConfig {
    std::string id;
    UnitKind kind = UnitKind::BaseLoad;
    double p_min = 0.0;
    double p_max = 0.0;
    double marginal_cost = 0.0;
    std::vector<double> da_schedule;  ///< one entry per hour
    std::vector<double> rt_output;    ///< observed RT output; empty -> price-taker dispatch
    std::optional<std::string> zone;

    DispatchableUnit at_hour(int hour) const;
    bool operator==(const UnitConfig&) const = default;
};

struct ScenarioConfig {
    int horizon = 24;

    std::string vg_id = "vg";
    std::optional<std::string> vg_zone;
    double capacity = 0.0;
    std::vector<double> forecast_mean;       ///< MW per hour
    std::vector<double> forecast_variance;   ///< MW^2 per hour; empty -> coefficient rule
    double variance_coefficient = kDefaultVarianceCoefficient;
    std::vector<double> vg_schedule;         ///< DA schedule; empty -> forecast mean

    std::vector<double> da_price;            ///< $/MWh per hour
    std::vector<double> rt_price;            ///< $/MWh per hour; empty -> DA price
    PenaltyFactors penalty{0.3, 0.3};
    std::vector<double> variance_scales{1.0};
    BrsPriceModel brs_price;

    std::vector<UnitConfig> units;
    std::vector<Offer> offers;
    std::vector<double> realized;            ///< MW per hour; empty -> sampled from the forecast
    std::optional<ZonalRule> zonal_rule;
    double claim_error_sd = 0.0;             ///< MW, near-RT forecast error at claim time
    std::uint64_t seed = 0;

    ForecastDistribution forecast(int hour) const;
    VgSchedule schedule(int hour) const;
    double rt_price_at(int hour) const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Cross-field checks: series lengths, id resolution, module bounds.
/// Throws DomainError naming the offending field path.
void validate(const ScenarioConfig& cfg);

}  // namespace brs
