#include "brs/provider_economics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "brs/errors.hpp"

namespace brs {

namespace {

struct CashFlows {
    Eigen::ArrayXd delta;    // (lambda_D - lambda_R) dr
    Eigen::ArrayXd rt_term;  // (p^g(lambda_R) - p^g) lambda_R
};

void require_feasible(const DispatchableUnit& u, double executed) {
    const double modified = u.da_schedule + executed;
    if (modified < u.p_min || modified > u.p_max) {
        std::ostringstream os;
        os << "executed BRS " << executed << " MW moves schedule to " << modified
           << " MW outside [" << u.p_min << ", " << u.p_max << "]";
        throw ContractInfeasible(os.str());
    }
}

CashFlows cash_flows(const DispatchableUnit& u, std::span<const JointScenario> scenarios) {
    validate(u);
    const auto n = static_cast<Eigen::Index>(scenarios.size());
    CashFlows flows{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& sc = scenarios[static_cast<std::size_t>(i)];
        require_feasible(u, sc.executed);
        flows.delta(i) = payoff_delta(sc);
        flows.rt_term(i) = (rt_dispatch(u, sc.rt_price) - u.da_schedule) * sc.rt_price;
    }
    return flows;
}

}  // namespace

std::string_view to_string(UnitKind k) noexcept {
    return k == UnitKind::BaseLoad ? "base_load" : "marginal";
}

UnitKind unit_kind_from_string(std::string_view s) {
    if (s == "base_load") return UnitKind::BaseLoad;
    if (s == "marginal") return UnitKind::Marginal;
    throw DomainError("unknown unit kind '" + std::string(s) + "'");
}

void validate(const DispatchableUnit& u) {
    if (!(u.p_min <= u.da_schedule && u.da_schedule <= u.p_max)) {
        std::ostringstream os;
        os << "unit DA schedule " << u.da_schedule << " outside [" << u.p_min << ", " << u.p_max
           << "]";
        throw DomainError(os.str());
    }
    if (!(u.marginal_cost >= 0.0)) throw DomainError("unit marginal cost must be nonnegative");
}

double rt_dispatch(const DispatchableUnit& u, double rt_price) {
    if (u.kind == UnitKind::BaseLoad) return u.da_schedule;
    if (rt_price > u.marginal_cost) return u.p_max;
    if (rt_price < u.marginal_cost) return u.p_min;
    return u.da_schedule;
}

double revenue_unit(const DispatchableUnit& u, const JointScenario& sc) {
    return sc.da_price * u.da_schedule + (rt_dispatch(u, sc.rt_price) - u.da_schedule) * sc.rt_price;
}

double revenue_unit_with_brs(const DispatchableUnit& u, const JointScenario& sc) {
    return revenue_unit_with_brs(u, sc, rt_dispatch(u, sc.rt_price));
}

double revenue_unit_with_brs(const DispatchableUnit& u, const JointScenario& sc, double rt_output) {
    require_feasible(u, sc.executed);
    const double modified = u.da_schedule + sc.executed;
    return sc.da_price * modified + (rt_output - modified) * sc.rt_price;
}

double payoff_delta(const JointScenario& sc) noexcept {
    return (sc.da_price - sc.rt_price) * sc.executed;
}

double sample_variance(const Eigen::Ref<const Eigen::ArrayXd>& x) {
    const auto n = x.size();
    if (n < 2) throw DomainError("sample variance needs at least two values");
    const double mean = x.mean();
    return (x - mean).square().sum() / static_cast<double>(n - 1);
}

RiskReport risk_report(const DispatchableUnit& u, std::span<const JointScenario> scenarios) {
    if (scenarios.size() < 2) throw DomainError("risk report needs at least two scenarios");
    const auto flows = cash_flows(u, scenarios);
    const double n = static_cast<double>(scenarios.size());

    RiskReport r;
    r.expected_delta = flows.delta.mean();
    r.delta_stderr = std::sqrt(sample_variance(flows.delta) / n);
    r.variance_without = sample_variance(flows.rt_term);
    r.variance_with = sample_variance(flows.delta + flows.rt_term);
    r.incremental_variance = r.variance_with - r.variance_without;
    return r;
}

RiskReport risk_report(const DispatchableUnit& u, std::span<const JointScenario> scenarios,
                       std::span<const double> weights) {
    if (scenarios.empty()) throw DomainError("risk report needs at least one scenario");
    if (weights.size() != scenarios.size()) {
        throw DomainError("scenario weights must match the scenario count");
    }
    Eigen::ArrayXd w = Eigen::Map<const Eigen::ArrayXd>(weights.data(),
                                                        static_cast<Eigen::Index>(weights.size()));
    if ((w < 0.0).any() || !(w.sum() > 0.0)) {
        throw DomainError("scenario weights must be nonnegative with positive total");
    }
    w /= w.sum();

    const auto flows = cash_flows(u, scenarios);
    auto weighted_var = [&](const Eigen::ArrayXd& x) {
        const double m = (w * x).sum();
        return (w * (x - m).square()).sum();
    };

    RiskReport r;
    r.expected_delta = (w * flows.delta).sum();
    r.delta_stderr = 0.0;
    r.variance_without = weighted_var(flows.rt_term);
    r.variance_with = weighted_var(flows.delta + flows.rt_term);
    r.incremental_variance = r.variance_with - r.variance_without;
    return r;
}

KindComparison compare_kinds(const DispatchableUnit& base, const DispatchableUnit& marginal,
                             std::span<const JointScenario> scenarios) {
    KindComparison c;
    c.base = risk_report(base, scenarios);
    c.marginal = risk_report(marginal, scenarios);
    c.marginal_below_base = c.marginal.incremental_variance < c.base.incremental_variance;
    return c;
}

std::vector<JointScenario> generate_scenarios(const ScenarioGeneratorConfig& cfg, std::size_t n) {
    if (!(cfg.correlation >= -1.0 && cfg.correlation <= 1.0)) {
        throw DomainError("correlation must lie in [-1, 1]");
    }
    if (cfg.da_price_sd < 0.0 || cfg.gap_sd < 0.0 || cfg.executed_sd < 0.0 ||
        cfg.executed_limit < 0.0) {
        throw DomainError("scenario generator spreads and limits must be nonnegative");
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double rho = cfg.correlation;
    const double rho_c = std::sqrt(1.0 - rho * rho);

    std::vector<JointScenario> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z_da = normal(rng);
        const double z_gap = normal(rng);
        const double z_exec = normal(rng);

        JointScenario sc;
        sc.da_price = cfg.da_price_mean + cfg.da_price_sd * z_da;
        sc.rt_price = sc.da_price + cfg.gap_mean + cfg.gap_sd * z_gap;
        const double executed =
            cfg.executed_mean + cfg.executed_sd * (rho * z_gap + rho_c * z_exec);
        sc.executed = std::clamp(executed, -cfg.executed_limit, cfg.executed_limit);
        out.push_back(sc);
    }
    return out;
}

std::vector<JointScenario> four_outcome_scenarios(double da_price) {
    std::vector<JointScenario> out;
    for (double gap : {-5.0, 5.0}) {
        for (double executed : {-10.0, 10.0}) {
            out.push_back({da_price, da_price + gap, executed});
        }
    }
    return out;
}

double brs_offer_price(const DispatchableUnit& u, Direction dir, double risk_price,
                       double opportunity_cost_per_mw) {
    if (!(risk_price >= 0.0) || !(opportunity_cost_per_mw >= 0.0)) {
        throw DomainError("offer price components must be nonnegative");
    }
    if (u.kind == UnitKind::BaseLoad && dir == Direction::UpCoversUnder) {
        return risk_price + opportunity_cost_per_mw;
    }
    return risk_price;
}

}  // namespace brs
