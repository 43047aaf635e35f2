#pragma once

// Cash-flow economics of a dispatchable unit that sells BRS.
//
// Sign convention for executed BRS: positive = upward BRS executed (the unit's
// DA schedule rises), negative = downward BRS executed.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "brs/vg_economics.hpp"

namespace brs {

enum class UnitKind { BaseLoad, Marginal };

std::string_view to_string(UnitKind k) noexcept;
UnitKind unit_kind_from_string(std::string_view s);

struct DispatchableUnit {
    double p_min = 0.0;          ///< MW
    double p_max = 0.0;          ///< MW
    double marginal_cost = 0.0;  ///< $/MWh
    double da_schedule = 0.0;    ///< MW
    UnitKind kind = UnitKind::BaseLoad;

    bool operator==(const DispatchableUnit&) const = default;
};

void validate(const DispatchableUnit& u);

struct JointScenario {
    double da_price = 0.0;  ///< $/MWh
    double rt_price = 0.0;  ///< $/MWh
    double executed = 0.0;  ///< MW, signed
};

struct RiskReport {
    double expected_delta = 0.0;
    double delta_stderr = 0.0;
    double variance_without = 0.0;
    double variance_with = 0.0;
    double incremental_variance = 0.0;
};

/// Price-taker RT output. Base-load units hold their DA schedule; marginal units
/// go to p_max above marginal cost, p_min below, and hold the schedule at a tie.
double rt_dispatch(const DispatchableUnit& u, double rt_price);

/// Revenue without BRS: lambda_D p^g + (p^g(lambda_R) - p^g) lambda_R.
double revenue_unit(const DispatchableUnit& u, const JointScenario& sc);

/// Revenue with `sc.executed` MW of BRS executed. Throws ContractInfeasible when
/// the modified schedule leaves [p_min, p_max].
double revenue_unit_with_brs(const DispatchableUnit& u, const JointScenario& sc);

/// As above with an observed RT output in place of the price-taker dispatch rule.
double revenue_unit_with_brs(const DispatchableUnit& u, const JointScenario& sc, double rt_output);

/// (lambda_D - lambda_R) * executed
double payoff_delta(const JointScenario& sc) noexcept;

/// Variances are taken over the post-DA uncertain part of the cash flow,
/// i.e. the RT settlement term with and without executed BRS; lambda_D p^g is
/// fixed once the DA market clears. Sample moments with n - 1 normalisation.
RiskReport risk_report(const DispatchableUnit& u, std::span<const JointScenario> scenarios);

/// Probability-weighted moments over an enumerated outcome set. Weights are
/// normalised to sum to one.
RiskReport risk_report(const DispatchableUnit& u, std::span<const JointScenario> scenarios,
                       std::span<const double> weights);

struct KindComparison {
    RiskReport base;
    RiskReport marginal;
    bool marginal_below_base = false;
};

KindComparison compare_kinds(const DispatchableUnit& base, const DispatchableUnit& marginal,
                             std::span<const JointScenario> scenarios);

/// Seeded joint generator for (lambda_D, lambda_R, executed).
/// lambda_R = lambda_D + gap where gap and executed are jointly normal with
/// correlation `correlation`; executed is clipped to [-executed_limit, executed_limit].
struct ScenarioGeneratorConfig {
    double da_price_mean = 30.0;
    double da_price_sd = 0.0;
    double gap_mean = 0.0;        ///< mean of lambda_R - lambda_D
    double gap_sd = 5.0;
    double executed_mean = 0.0;
    double executed_sd = 10.0;
    double executed_limit = 50.0;
    double correlation = 0.0;
    std::uint64_t seed = 1;
};

std::vector<JointScenario> generate_scenarios(const ScenarioGeneratorConfig& cfg, std::size_t n);

/// The four equiprobable outcomes of gap in {-5, +5} x executed in {-10, +10}.
std::vector<JointScenario> four_outcome_scenarios(double da_price = 30.0);

/// Offer price for a BRS product: the risk price plus, for base-load units
/// selling upward BRS, an opportunity cost per MW for the headroom withheld.
double brs_offer_price(const DispatchableUnit& u, Direction dir, double risk_price,
                       double opportunity_cost_per_mw = 0.0);

/// Sample variance with n - 1 normalisation.
double sample_variance(const Eigen::Ref<const Eigen::ArrayXd>& x);

}  // namespace brs
