#include "brs/commands.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace brs::cli {

void require_hour(const ScenarioConfig& cfg, int hour) {
    if (hour < 0 || hour >= cfg.horizon) {
        throw UsageError("hour " + std::to_string(hour) + " outside horizon [0, " +
                         std::to_string(cfg.horizon - 1) + "]");
    }
}

Table demand_curve_table(const ScenarioConfig& cfg, int hour, std::span<const double> alphas,
                         int points) {
    require_hour(cfg, hour);
    if (points < 2) throw UsageError("--points must be at least 2");

    const auto forecast = cfg.forecast(hour);
    const auto schedule = cfg.schedule(hour);

    std::vector<PenaltyFactors> levels;
    if (alphas.empty()) {
        levels.push_back(cfg.penalty);
    } else {
        for (double a : alphas) levels.push_back({a, a});
    }

    Table t{{"direction", "alpha", "quantity", "marginal_value"}, {}};
    for (Direction dir : {Direction::DownCoversOver, Direction::UpCoversUnder}) {
        for (const auto& pf : levels) {
            const auto curve = demand_curve(schedule, pf, forecast, dir, points);
            const double alpha = dir == Direction::DownCoversOver ? pf.over : pf.under;
            for (Eigen::Index i = 0; i < curve.quantity.size(); ++i) {
                t.add_row({std::string(to_string(dir)), alpha, curve.quantity(i),
                           curve.marginal_value(i)});
            }
        }
    }
    return t;
}

OptimalResult optimal(const ScenarioConfig& cfg, int hour, std::optional<double> down_price,
                      std::optional<double> up_price) {
    require_hour(cfg, hour);
    const auto forecast = cfg.forecast(hour);
    const auto schedule = cfg.schedule(hour);
    const double down = down_price.value_or(cfg.brs_price.down_price(schedule.da_price));
    const double up = up_price.value_or(cfg.brs_price.up_price(schedule.da_price));
    if (down < 0.0 || up < 0.0) throw UsageError("BRS prices must be nonnegative");

    OptimalResult r;
    r.position = optimal_position(schedule, cfg.penalty, forecast, down, up);
    r.oic = oic_report(schedule, cfg.penalty, r.position, forecast);
    r.gross_expected_revenue = expected_revenue(schedule, cfg.penalty, r.position, forecast);
    r.net_expected_revenue = r.gross_expected_revenue - r.position.premium();
    r.no_brs_expected_revenue = expected_revenue(schedule, cfg.penalty, BrsPosition{}, forecast);
    return r;
}

Table optimal_table(const OptimalResult& r) {
    Table t{{"field", "value"}, {}};
    auto row = [&](const char* name, double v) { t.add_row({std::string(name), v}); };
    row("down_covers_over_mw", r.position.down_covers_over);
    row("up_covers_under_mw", r.position.up_covers_under);
    row("down_price", r.position.down_price);
    row("up_price", r.position.up_price);
    row("gross_expected_revenue", r.gross_expected_revenue);
    row("net_expected_revenue", r.net_expected_revenue);
    row("no_brs_expected_revenue", r.no_brs_expected_revenue);
    row("premium_paid", r.oic.premium_paid);
    row("expected_residual_penalty", r.oic.expected_residual_penalty);
    row("total_oic", r.oic.total_oic);
    row("consumer_surplus", r.oic.consumer_surplus);
    return t;
}

double expected_day_profit(const ScenarioConfig& cfg, double price_ratio, double variance_scale) {
    double total = 0.0;
    for (int h = 0; h < cfg.horizon; ++h) {
        const auto forecast = scale_variance(cfg.forecast(h), {variance_scale});
        const auto schedule = cfg.schedule(h);
        const double price = price_ratio * schedule.da_price;
        const auto pos = optimal_position(schedule, cfg.penalty, forecast, price, price);
        total += expected_profit(schedule, cfg.penalty, pos, forecast);
    }
    return total;
}

double no_brs_day_revenue(const ScenarioConfig& cfg, double variance_scale) {
    double total = 0.0;
    for (int h = 0; h < cfg.horizon; ++h) {
        const auto forecast = scale_variance(cfg.forecast(h), {variance_scale});
        total += expected_revenue(cfg.schedule(h), cfg.penalty, BrsPosition{}, forecast);
    }
    return total;
}

Table profit_sweep_table(const ScenarioConfig& cfg, std::span<const double> ratios,
                         std::span<const double> scales) {
    for (double r : ratios) {
        if (!(r >= 0.0)) throw UsageError("price ratios must be nonnegative");
    }
    for (double s : scales) {
        if (!(s >= 0.0)) throw UsageError("variance scales must be nonnegative");
    }
    std::vector<double> sorted_ratios(ratios.begin(), ratios.end());
    std::vector<double> sorted_scales(scales.begin(), scales.end());
    std::sort(sorted_ratios.begin(), sorted_ratios.end());
    std::sort(sorted_scales.begin(), sorted_scales.end());

    Table t{{"scale", "ratio", "expected_profit", "no_brs_revenue"}, {}};
    for (double scale : sorted_scales) {
        const double baseline = no_brs_day_revenue(cfg, scale);
        for (double ratio : sorted_ratios) {
            t.add_row({scale, ratio, expected_day_profit(cfg, ratio, scale), baseline});
        }
    }
    return t;
}

DispatchableUnit default_base_load_unit() {
    return {100.0, 300.0, 10.0, 200.0, UnitKind::BaseLoad};
}

DispatchableUnit default_marginal_unit() {
    return {100.0, 300.0, 30.0, 200.0, UnitKind::Marginal};
}

ScenarioGeneratorConfig default_generator(std::uint64_t seed, double correlation) {
    ScenarioGeneratorConfig g;
    g.seed = seed;
    g.correlation = correlation;
    return g;
}

Table supply_risk_table(const SupplyRiskOptions& opts) {
    if (!opts.enumerate && opts.samples < 2) throw UsageError("--samples must be at least 2");
    if (!(opts.correlation >= -1.0 && opts.correlation <= 1.0)) {
        throw UsageError("--correlation must lie in [-1, 1]");
    }

    std::vector<JointScenario> scenarios;
    std::vector<double> weights;
    if (opts.enumerate) {
        scenarios = four_outcome_scenarios();
        weights.assign(scenarios.size(), 1.0);
    } else {
        scenarios = generate_scenarios(default_generator(opts.seed, opts.correlation), opts.samples);
    }

    auto report = [&](const DispatchableUnit& u) {
        return opts.enumerate ? risk_report(u, scenarios, weights) : risk_report(u, scenarios);
    };

    std::vector<std::pair<UnitKind, RiskReport>> reports;
    if (!opts.kind || *opts.kind == UnitKind::BaseLoad) {
        reports.emplace_back(UnitKind::BaseLoad, report(default_base_load_unit()));
    }
    if (!opts.kind || *opts.kind == UnitKind::Marginal) {
        reports.emplace_back(UnitKind::Marginal, report(default_marginal_unit()));
    }

    std::string verdict = "n/a";
    if (reports.size() == 2) {
        verdict = reports[1].second.incremental_variance < reports[0].second.incremental_variance
                      ? "true"
                      : "false";
    }

    Table t{{"unit_kind", "samples", "expected_delta", "delta_stderr", "variance_without",
             "variance_with", "incremental_variance", "marginal_below_base"},
            {}};
    for (const auto& [kind, r] : reports) {
        t.add_row({std::string(to_string(kind)), static_cast<double>(scenarios.size()),
                   r.expected_delta, r.delta_stderr, r.variance_without, r.variance_with,
                   r.incremental_variance, verdict});
    }
    return t;
}

DayTables day_tables(const DayResult& day) {
    DayTables out;
    out.contracts = Table{{"id", "hour", "buyer", "seller", "direction", "quantity",
                           "premium_price", "status", "executed", "released"},
                          {}};
    for (const auto& c : day.contracts) {
        out.contracts.add_row({static_cast<double>(c.id()), static_cast<double>(c.hour()),
                               c.buyer(), c.seller(), std::string(to_string(c.direction())),
                               c.quantity(), c.premium_price(), std::string(to_string(c.status())),
                               c.executed(), c.released()});
    }

    out.ledger = Table{{"hour", "payer", "payee", "tag", "amount", "contract"}, {}};
    for (const auto& e : day.ledger.entries()) {
        out.ledger.add_row({static_cast<double>(e.hour), e.payer, e.payee,
                            std::string(to_string(e.tag)), e.amount,
                            e.contract ? std::to_string(*e.contract) : std::string()});
    }

    out.totals = Table{{"party", "net"}, {}};
    for (const auto& [party, net] : day.party_totals) out.totals.add_row({party, net});

    out.schedules = Table{{"hour", "party", "da_schedule", "modified_schedule"}, {}};
    for (const auto& h : day.hours) {
        for (const auto& [party, original] : h.original_schedules) {
            out.schedules.add_row({static_cast<double>(h.hour), party, original,
                                   h.modified_schedules.at(party)});
        }
    }

    out.hours = Table{{"hour", "da_price", "rt_price", "realized", "claimed", "executed_down",
                       "executed_up", "residual_deviation"},
                      {}};
    for (const auto& h : day.hours) {
        out.hours.add_row({static_cast<double>(h.hour), h.da_price, h.rt_price, h.realized,
                           h.claimed, h.claim.executed_down, h.claim.executed_up,
                           h.claim.residual_deviation});
    }
    return out;
}

}  // namespace brs::cli
