#include "brs/vg_economics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "brs/errors.hpp"

namespace brs {

namespace {

// Slack for positions computed as differences of capacities.
constexpr double kQuantitySlack = 1e-9;

[[noreturn]] void fail(const std::string& what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    throw DomainError(os.str());
}

void require_actual(double actual, double capacity) {
    if (!(actual >= 0.0 && actual <= capacity)) {
        fail("actual output must lie in [0, capacity]", actual);
    }
}

void require_inputs(const VgSchedule& s, const PenaltyFactors& pf, const ForecastDistribution& d) {
    validate(pf);
    validate(s, d.capacity());
}

// E[(p - level)^+]
double upper_shortfall(const ForecastDistribution& d, double level) {
    level = std::clamp(level, 0.0, d.capacity());
    return partial_expectation(d, level, d.capacity()) - level * (1.0 - cdf(d, level));
}

// E[(level - p)^+]
double lower_shortfall(const ForecastDistribution& d, double level) {
    level = std::clamp(level, 0.0, d.capacity());
    return level * cdf(d, level) - partial_expectation(d, 0.0, level);
}

}  // namespace

std::string_view to_string(Direction d) noexcept {
    return d == Direction::DownCoversOver ? "down_covers_over" : "up_covers_under";
}

Direction direction_from_string(std::string_view s) {
    if (s == "down_covers_over" || s == "down") return Direction::DownCoversOver;
    if (s == "up_covers_under" || s == "up") return Direction::UpCoversUnder;
    throw DomainError("unknown BRS direction '" + std::string(s) + "'");
}

void validate(const PenaltyFactors& pf) {
    if (!(pf.over >= 0.0 && pf.over <= 1.0)) fail("over-generation penalty must lie in [0, 1]", pf.over);
    if (!(pf.under >= 0.0) || !std::isfinite(pf.under)) {
        fail("under-generation penalty must be nonnegative", pf.under);
    }
}

void validate(const VgSchedule& s, double capacity) {
    if (!(s.da_price > 0.0) || !std::isfinite(s.da_price)) fail("DA price must be positive", s.da_price);
    if (!(s.da_quantity >= 0.0 && s.da_quantity <= capacity)) {
        fail("DA schedule must lie in [0, capacity]", s.da_quantity);
    }
}

void validate(const BrsPosition& pos, const VgSchedule& s, double capacity) {
    const double slack = kQuantitySlack * capacity;
    if (!(pos.down_covers_over >= 0.0 && pos.down_covers_over <= capacity - s.da_quantity + slack)) {
        fail("downward BRS must lie in [0, capacity - schedule]", pos.down_covers_over);
    }
    if (!(pos.up_covers_under >= 0.0 && pos.up_covers_under <= s.da_quantity + slack)) {
        fail("upward BRS must lie in [0, schedule]", pos.up_covers_under);
    }
    if (!(pos.down_price >= 0.0)) fail("downward BRS price must be nonnegative", pos.down_price);
    if (!(pos.up_price >= 0.0)) fail("upward BRS price must be nonnegative", pos.up_price);
}

double headroom(const VgSchedule& s, double capacity, Direction d) noexcept {
    return d == Direction::DownCoversOver ? capacity - s.da_quantity : s.da_quantity;
}

double revenue_realized(const VgSchedule& s, const PenaltyFactors& pf, double capacity,
                        double actual) {
    return revenue_with_brs(s, pf, BrsPosition{}, capacity, actual);
}

double revenue_with_brs(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                        double capacity, double actual) {
    validate(pf);
    validate(s, capacity);
    validate(pos, s, capacity);
    require_actual(actual, capacity);

    const double price = s.da_price;
    const double upper = s.da_quantity + pos.down_covers_over;
    const double lower = s.da_quantity - pos.up_covers_under;
    if (actual > upper) {
        return price * upper + (1.0 - pf.over) * price * (actual - upper);
    }
    if (actual < lower) {
        return price * lower - (1.0 + pf.under) * price * (lower - actual);
    }
    return price * actual;
}

double expected_revenue(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                        const ForecastDistribution& d) {
    require_inputs(s, pf, d);
    validate(pos, s, d.capacity());

    // Each branch equals lambda_D p minus a penalty on the uncovered tail.
    const double upper = s.da_quantity + pos.down_covers_over;
    const double lower = s.da_quantity - pos.up_covers_under;
    const double mean = d.analytic_mean();
    return s.da_price * (mean - pf.over * upper_shortfall(d, upper) -
                         pf.under * lower_shortfall(d, lower));
}

double expected_profit(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                       const ForecastDistribution& d) {
    return expected_revenue(s, pf, pos, d) - pos.premium();
}

double marginal_utility_down(const VgSchedule& s, const PenaltyFactors& pf,
                             const ForecastDistribution& d, double r) {
    require_inputs(s, pf, d);
    const double room = headroom(s, d.capacity(), Direction::DownCoversOver);
    if (!(r >= 0.0 && r <= room + kQuantitySlack * d.capacity())) {
        fail("downward BRS quantity outside [0, headroom]", r);
    }
    return s.da_price * pf.over * (1.0 - cdf(d, s.da_quantity + r));
}

double marginal_utility_up(const VgSchedule& s, const PenaltyFactors& pf,
                           const ForecastDistribution& d, double r) {
    require_inputs(s, pf, d);
    if (!(r >= 0.0 && r <= s.da_quantity + kQuantitySlack * d.capacity())) {
        fail("upward BRS quantity outside [0, schedule]", r);
    }
    return s.da_price * pf.under * cdf(d, s.da_quantity - r);
}

double marginal_utility(const VgSchedule& s, const PenaltyFactors& pf,
                        const ForecastDistribution& d, Direction dir, double r) {
    return dir == Direction::DownCoversOver ? marginal_utility_down(s, pf, d, r)
                                            : marginal_utility_up(s, pf, d, r);
}

double optimal_quantity(const VgSchedule& s, const PenaltyFactors& pf,
                        const ForecastDistribution& d, Direction dir, double price) {
    require_inputs(s, pf, d);
    if (!(price >= 0.0)) fail("BRS price must be nonnegative", price);

    const double alpha = dir == Direction::DownCoversOver ? pf.over : pf.under;
    if (alpha == 0.0) return 0.0;
    const double ceiling = s.da_price * alpha;
    const double room = headroom(s, d.capacity(), dir);

    if (dir == Direction::DownCoversOver) {
        const double level = std::clamp(1.0 - price / ceiling, 0.0, 1.0);
        return std::clamp(quantile(d, level) - s.da_quantity, 0.0, room);
    }
    const double level = std::clamp(price / ceiling, 0.0, 1.0);
    return std::clamp(s.da_quantity - quantile(d, level), 0.0, room);
}

BrsPosition optimal_position(const VgSchedule& s, const PenaltyFactors& pf,
                             const ForecastDistribution& d, double down_price, double up_price) {
    BrsPosition pos;
    pos.down_price = down_price;
    pos.up_price = up_price;
    pos.down_covers_over = optimal_quantity(s, pf, d, Direction::DownCoversOver, down_price);
    pos.up_covers_under = optimal_quantity(s, pf, d, Direction::UpCoversUnder, up_price);
    return pos;
}

DemandCurve demand_curve(const VgSchedule& s, const PenaltyFactors& pf,
                         const ForecastDistribution& d, Direction dir, int n_points) {
    if (n_points < 2) fail("demand curve needs at least two points", n_points);
    require_inputs(s, pf, d);

    const double room = headroom(s, d.capacity(), dir);
    DemandCurve curve;
    curve.direction = dir;
    curve.quantity = Eigen::VectorXd::LinSpaced(n_points, 0.0, room);
    curve.quantity(n_points - 1) = room;
    curve.marginal_value = curve.quantity.unaryExpr(
        [&](double r) { return marginal_utility(s, pf, d, dir, r); });
    return curve;
}

OicReport oic_report(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                     const ForecastDistribution& d) {
    const double ideal = s.da_price * d.analytic_mean();
    const double unhedged_penalty = ideal - expected_revenue(s, pf, BrsPosition{}, d);

    OicReport report;
    report.premium_paid = pos.premium();
    report.expected_residual_penalty = ideal - expected_revenue(s, pf, pos, d);
    report.total_oic = report.premium_paid + report.expected_residual_penalty;
    report.consumer_surplus = unhedged_penalty - report.total_oic;
    return report;
}

}  // namespace brs
