#include "brs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "brs/errors.hpp"

namespace brs {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& reason) {
    throw DomainError(path + ": " + reason);
}

void require_length(const std::vector<double>& v, int horizon, const std::string& path,
                    bool optional) {
    if (optional && v.empty()) return;
    if (static_cast<int>(v.size()) != horizon) {
        std::ostringstream os;
        os << "expected " << horizon << " entries, found " << v.size();
        field_error(path, os.str());
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) field_error(path + "[" + std::to_string(i) + "]", "not finite");
    }
}

std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

}  // namespace

DispatchableUnit UnitConfig::at_hour(int hour) const {
    DispatchableUnit u;
    u.p_min = p_min;
    u.p_max = p_max;
    u.marginal_cost = marginal_cost;
    u.da_schedule = da_schedule.at(static_cast<std::size_t>(hour));
    u.kind = kind;
    return u;
}

ForecastDistribution ScenarioConfig::forecast(int hour) const {
    const auto h = static_cast<std::size_t>(hour);
    if (forecast_variance.empty()) {
        return ForecastDistribution::from_mean(capacity, forecast_mean.at(h), variance_coefficient);
    }
    return ForecastDistribution::from_mean_variance(capacity, forecast_mean.at(h),
                                                    forecast_variance.at(h));
}

VgSchedule ScenarioConfig::schedule(int hour) const {
    const auto h = static_cast<std::size_t>(hour);
    return {vg_schedule.empty() ? forecast_mean.at(h) : vg_schedule.at(h), da_price.at(h)};
}

double ScenarioConfig::rt_price_at(int hour) const {
    const auto h = static_cast<std::size_t>(hour);
    return rt_price.empty() ? da_price.at(h) : rt_price.at(h);
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.horizon <= 0) field_error("horizon", "must be positive");
    if (!(cfg.capacity > 0.0) || !std::isfinite(cfg.capacity)) {
        field_error("vg.capacity", "must be positive");
    }
    require_length(cfg.forecast_mean, cfg.horizon, "vg.forecast_mean", false);
    require_length(cfg.forecast_variance, cfg.horizon, "vg.forecast_variance", true);
    require_length(cfg.vg_schedule, cfg.horizon, "vg.da_schedule", true);
    require_length(cfg.da_price, cfg.horizon, "da_price", false);
    require_length(cfg.rt_price, cfg.horizon, "rt_price", true);
    require_length(cfg.realized, cfg.horizon, "realized", true);

    for (std::size_t i = 0; i < cfg.forecast_mean.size(); ++i) {
        const double m = cfg.forecast_mean[i];
        if (!(m > 0.0 && m < cfg.capacity)) {
            field_error(at("vg.forecast_mean", i), "must lie strictly inside (0, capacity)");
        }
    }
    for (std::size_t i = 0; i < cfg.forecast_variance.size(); ++i) {
        if (!(cfg.forecast_variance[i] >= 0.0)) {
            field_error(at("vg.forecast_variance", i), "must be nonnegative");
        }
    }
    if (!(cfg.variance_coefficient > 0.0 && cfg.variance_coefficient < 1.0)) {
        field_error("vg.variance_coefficient", "must lie in (0, 1)");
    }
    for (std::size_t i = 0; i < cfg.vg_schedule.size(); ++i) {
        if (!(cfg.vg_schedule[i] >= 0.0 && cfg.vg_schedule[i] <= cfg.capacity)) {
            field_error(at("vg.da_schedule", i), "must lie in [0, capacity]");
        }
    }
    for (std::size_t i = 0; i < cfg.da_price.size(); ++i) {
        if (!(cfg.da_price[i] > 0.0)) field_error(at("da_price", i), "must be positive");
    }
    for (std::size_t i = 0; i < cfg.realized.size(); ++i) {
        if (!(cfg.realized[i] >= 0.0 && cfg.realized[i] <= cfg.capacity)) {
            field_error(at("realized", i), "must lie in [0, capacity]");
        }
    }
    if (!(cfg.penalty.over >= 0.0 && cfg.penalty.over <= 1.0)) {
        field_error("penalty.over", "must lie in [0, 1]");
    }
    if (!(cfg.penalty.under >= 0.0)) field_error("penalty.under", "must be nonnegative");
    if (cfg.variance_scales.empty()) field_error("variance_scales", "must not be empty");
    for (std::size_t i = 0; i < cfg.variance_scales.size(); ++i) {
        if (!(cfg.variance_scales[i] >= 0.0)) field_error(at("variance_scales", i), "must be nonnegative");
    }
    if (!(cfg.brs_price.down >= 0.0)) field_error("brs_price.down", "must be nonnegative");
    if (!(cfg.brs_price.up >= 0.0)) field_error("brs_price.up", "must be nonnegative");
    if (!(cfg.claim_error_sd >= 0.0)) field_error("claim_error_sd", "must be nonnegative");

    std::set<std::string> ids{cfg.vg_id, std::string(kPool)};
    if (cfg.vg_id.empty() || cfg.vg_id == kPool) field_error("vg.id", "must be a non-reserved name");
    for (std::size_t i = 0; i < cfg.units.size(); ++i) {
        const auto& u = cfg.units[i];
        const std::string path = at("units", i);
        if (u.id.empty()) field_error(path + ".id", "must not be empty");
        if (!ids.insert(u.id).second) field_error(path + ".id", "duplicate or reserved id '" + u.id + "'");
        if (!(u.p_min <= u.p_max)) field_error(path + ".p_max", "must be >= p_min");
        if (!(u.marginal_cost >= 0.0)) field_error(path + ".marginal_cost", "must be nonnegative");
        require_length(u.da_schedule, cfg.horizon, path + ".da_schedule", false);
        require_length(u.rt_output, cfg.horizon, path + ".rt_output", true);
        for (std::size_t h = 0; h < u.rt_output.size(); ++h) {
            if (!(u.rt_output[h] >= u.p_min && u.rt_output[h] <= u.p_max)) {
                field_error(at(path + ".rt_output", h), "must lie in [p_min, p_max]");
            }
        }
        for (std::size_t h = 0; h < u.da_schedule.size(); ++h) {
            if (!(u.da_schedule[h] >= u.p_min && u.da_schedule[h] <= u.p_max)) {
                field_error(at(path + ".da_schedule", h), "must lie in [p_min, p_max]");
            }
        }
    }
    for (std::size_t i = 0; i < cfg.offers.size(); ++i) {
        const auto& o = cfg.offers[i];
        const std::string path = at("offers", i);
        const bool known = std::any_of(cfg.units.begin(), cfg.units.end(),
                                       [&](const UnitConfig& u) { return u.id == o.seller; });
        if (!known) field_error(path + ".seller", "unknown unit '" + o.seller + "'");
        if (o.hour < 0 || o.hour >= cfg.horizon) field_error(path + ".hour", "outside the horizon");
        if (!(o.price >= 0.0)) field_error(path + ".price", "must be nonnegative");
        if (!(o.quantity > 0.0)) field_error(path + ".quantity", "must be positive");
    }
}

}  // namespace brs
