#include "brs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "brs/errors.hpp"
#include "brs/exact_sum.hpp"

namespace brs {

namespace {

constexpr double kRelTolerance = 1e-9;

bool close_rel(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= kRelTolerance * scale;
}

std::string mismatch(int hour, const std::string& party, double ledger, double formula) {
    std::ostringstream os;
    os.precision(17);
    os << "hour " << hour << ", party '" << party << "': ledger " << ledger << " vs formula "
       << formula;
    return os.str();
}

void check_invariants(const ScenarioConfig& cfg, const HourOutcome& outcome,
                      const SettlementLedger& ledger, const HourRecord& record,
                      bool perfect_claim) {
    const int hour = outcome.hour;

    if (ledger.grand_total() != 0.0) {
        throw InvariantViolation("zero-sum", "hour " + std::to_string(hour));
    }

    // Pool position mirrors the other parties exactly.
    ExactSum others;
    for (const auto& e : ledger.entries()) {
        if (e.payee != kPool) others.add(e.amount);
        if (e.payer != kPool) others.add(-e.amount);
    }
    if (others.value() != -ledger.net(kPool)) {
        throw InvariantViolation("pool-mirror", "hour " + std::to_string(hour));
    }

    ExactSum before;
    ExactSum after;
    for (const auto& [id, v] : record.original_schedules) before.add(v);
    for (const auto& [id, v] : record.modified_schedules) after.add(v);
    if (!close_rel(before.value(), after.value())) {
        throw InvariantViolation("schedule-conservation", "hour " + std::to_string(hour));
    }

    for (const auto& u : outcome.units) {
        const double s = record.modified_schedules.at(u.id);
        const double slack = kRelTolerance * std::max(std::abs(u.unit.p_max), 1.0);
        if (s < u.unit.p_min - slack || s > u.unit.p_max + slack) {
            throw InvariantViolation("validation-safety",
                                     "hour " + std::to_string(hour) + ", unit '" + u.id + "'");
        }
    }

    if (!perfect_claim) return;

    // Ledger nets against the closed-form pay-off functions.
    BrsPosition pos;
    double premium_paid = 0.0;
    std::map<std::string, double> premium_received;
    std::map<std::string, double> unit_shift;
    for (const auto& c : outcome.contracts) {
        if (c.status() == ContractStatus::Rejected) continue;
        premium_paid += c.premium();
        premium_received[c.seller()] += c.premium();
        if (c.direction() == Direction::DownCoversOver) {
            pos.down_covers_over += c.quantity();
            unit_shift[c.seller()] -= c.executed();
        } else {
            pos.up_covers_under += c.quantity();
            unit_shift[c.seller()] += c.executed();
        }
    }

    const auto& vg = outcome.producers.front();
    const VgSchedule schedule{vg.da_schedule, outcome.da_price};
    const double vg_formula =
        revenue_with_brs(schedule, outcome.penalty, pos, cfg.capacity, vg.realized) - premium_paid;
    const double vg_ledger = ledger.net(vg.id);
    if (!close_rel(vg_ledger, vg_formula)) {
        throw InvariantViolation("settlement-equivalence", mismatch(hour, vg.id, vg_ledger, vg_formula));
    }

    for (const auto& u : outcome.units) {
        const JointScenario sc{outcome.da_price, outcome.rt_price, unit_shift[u.id]};
        const double formula =
            revenue_unit_with_brs(u.unit, sc, u.rt_actual(outcome.rt_price)) + premium_received[u.id];
        const double net = ledger.net(u.id);
        if (!close_rel(net, formula)) {
            throw InvariantViolation("settlement-equivalence", mismatch(hour, u.id, net, formula));
        }
    }
}

}  // namespace

HourRecord simulate_hour(const ScenarioConfig& cfg, int hour, double realized, double claimed,
                         std::vector<BrsContract>& contracts, SettlementLedger& ledger) {
    const auto forecast = cfg.forecast(hour);
    const auto schedule = cfg.schedule(hour);

    std::map<std::string, ProviderInfo> providers;
    for (const auto& u : cfg.units) providers.emplace(u.id, ProviderInfo{u.at_hour(hour), u.zone});

    HourMarket market(hour);
    market.open_window();
    for (const auto& o : cfg.offers) {
        if (o.hour != hour) continue;
        Offer offer = o;
        if (!offer.zone) offer.zone = providers.at(o.seller).zone;
        market.post_offer(offer);
    }
    market.match(BuyerRequest{cfg.vg_id, cfg.vg_zone, schedule, cfg.penalty, forecast});
    market.close_window();
    market.validate_contracts(providers, cfg.zonal_rule ? &*cfg.zonal_rule : nullptr);

    HourRecord record;
    record.hour = hour;
    record.da_price = schedule.da_price;
    record.rt_price = cfg.rt_price_at(hour);
    record.realized = realized;
    record.claimed = claimed;
    record.claim = market.claim_execution(cfg.vg_id, claimed, schedule.da_quantity);
    market.close_rt();

    HourOutcome outcome;
    outcome.hour = hour;
    outcome.da_price = record.da_price;
    outcome.rt_price = record.rt_price;
    outcome.penalty = cfg.penalty;
    outcome.producers.push_back({cfg.vg_id, schedule.da_quantity, realized});
    for (const auto& u : cfg.units) {
        std::optional<double> rt_output;
        if (!u.rt_output.empty()) rt_output = u.rt_output.at(static_cast<std::size_t>(hour));
        outcome.units.push_back({u.id, providers.at(u.id).unit, rt_output});
    }
    outcome.contracts = market.contracts();

    for (const auto& p : outcome.producers) record.original_schedules[p.id] = p.da_schedule;
    for (const auto& u : outcome.units) record.original_schedules[u.id] = u.unit.da_schedule;
    record.modified_schedules = modified_schedules(outcome);

    auto hour_ledger = settle(outcome);
    check_invariants(cfg, outcome, hour_ledger, record, claimed == realized);
    market.mark_settled();

    contracts.insert(contracts.end(), outcome.contracts.begin(), outcome.contracts.end());
    ledger.append(hour_ledger);
    return record;
}

DayResult simulate_day(const ScenarioConfig& cfg) {
    validate(cfg);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    DayResult day;
    for (int h = 0; h < cfg.horizon; ++h) {
        // Two draws per hour keep the stream aligned whichever inputs are given.
        const double u = uniform(rng);
        const double z = normal(rng);

        const double realized = cfg.realized.empty() ? quantile(cfg.forecast(h), u)
                                                     : cfg.realized[static_cast<std::size_t>(h)];
        const double claimed = cfg.claim_error_sd > 0.0
                                   ? std::clamp(realized + cfg.claim_error_sd * z, 0.0, cfg.capacity)
                                   : realized;
        day.hours.push_back(simulate_hour(cfg, h, realized, claimed, day.contracts, day.ledger));
    }

    if (day.ledger.grand_total() != 0.0) throw InvariantViolation("zero-sum", "whole day");
    for (const auto& party : day.ledger.parties()) day.party_totals[party] = day.ledger.net(party);
    return day;
}

}  // namespace brs
