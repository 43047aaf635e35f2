#pragma once

#include <map>
#include <string>
#include <vector>

#include "brs/market_sim.hpp"
#include "brs/scenario.hpp"

namespace brs {

struct HourRecord {
    int hour = 0;
    double da_price = 0.0;
    double rt_price = 0.0;
    double realized = 0.0;
    double claimed = 0.0;
    ExecutionClaim claim;
    std::map<std::string, double> original_schedules;
    std::map<std::string, double> modified_schedules;
};

struct DayResult {
    std::vector<HourRecord> hours;
    std::vector<BrsContract> contracts;
    SettlementLedger ledger;
    std::map<std::string, double> party_totals;
};

/// Runs one hour end to end and checks the settlement invariants.
HourRecord simulate_hour(const ScenarioConfig& cfg, int hour, double realized, double claimed,
                         std::vector<BrsContract>& contracts, SettlementLedger& ledger);

/// Full lifecycle for every hour of the scenario. Deterministic in (cfg, cfg.seed).
/// Throws InvariantViolation naming the failed invariant.
DayResult simulate_day(const ScenarioConfig& cfg);

}  // namespace brs
