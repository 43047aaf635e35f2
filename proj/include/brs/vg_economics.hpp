#pragma once

// Economics of a VG producer that hedges DA/RT imbalance penalties with BRS.
//
// Direction convention: r+ is DOWNWARD BRS and covers VG over-generation (the
// provider backs down, the VG schedule rises); r- is UPWARD BRS and covers
// VG under-generation (the provider ramps up, the VG schedule falls).

#include <string_view>

#include <Eigen/Dense>

#include "brs/forecast.hpp"

namespace brs {

enum class Direction {
    DownCoversOver,   ///< r+, downward BRS
    UpCoversUnder,    ///< r-, upward BRS
};

std::string_view to_string(Direction d) noexcept;
/// Accepts "down_covers_over"/"down" and "up_covers_under"/"up".
Direction direction_from_string(std::string_view s);

/// Penalty factors alpha+ (over-generation) and alpha- (under-generation).
struct PenaltyFactors {
    double over = 0.0;
    double under = 0.0;

    bool operator==(const PenaltyFactors&) const = default;
};

/// Day-ahead schedule and clearing price of a VG producer.
struct VgSchedule {
    double da_quantity = 0.0;  ///< MW
    double da_price = 0.0;     ///< $/MWh

    bool operator==(const VgSchedule&) const = default;
};

struct BrsPosition {
    double down_covers_over = 0.0;  ///< r+, MW
    double up_covers_under = 0.0;   ///< r-, MW
    double down_price = 0.0;        ///< pi+, $/MW
    double up_price = 0.0;          ///< pi-, $/MW

    double quantity(Direction d) const noexcept {
        return d == Direction::DownCoversOver ? down_covers_over : up_covers_under;
    }
    double premium() const noexcept {
        return down_price * down_covers_over + up_price * up_covers_under;
    }
};

struct DemandCurve {
    Direction direction = Direction::DownCoversOver;
    Eigen::VectorXd quantity;        ///< MW, even grid over [0, headroom]
    Eigen::VectorXd marginal_value;  ///< $/MW
};

struct OicReport {
    double premium_paid = 0.0;
    double expected_residual_penalty = 0.0;
    double total_oic = 0.0;
    double consumer_surplus = 0.0;
};

void validate(const PenaltyFactors& pf);
void validate(const VgSchedule& s, double capacity);
void validate(const BrsPosition& pos, const VgSchedule& s, double capacity);

/// BRS headroom in a direction: capacity - p^ for down, p^ for up.
double headroom(const VgSchedule& s, double capacity, Direction d) noexcept;

/// Realised revenue without BRS (two-price imbalance settlement).
double revenue_realized(const VgSchedule& s, const PenaltyFactors& pf, double capacity,
                        double actual);

/// Realised revenue with executed BRS covering [p^ - r-, p^ + r+]. Premium excluded.
double revenue_with_brs(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                        double capacity, double actual);

/// Expected revenue with the position held, premium excluded.
double expected_revenue(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                        const ForecastDistribution& d);

/// Expected revenue minus premium.
double expected_profit(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                       const ForecastDistribution& d);

/// dE[R]/dr+ = lambda_D alpha+ (1 - F(p^ + r)).
double marginal_utility_down(const VgSchedule& s, const PenaltyFactors& pf,
                             const ForecastDistribution& d, double r);

/// dE[R]/dr- = lambda_D alpha- F(p^ - r).
double marginal_utility_up(const VgSchedule& s, const PenaltyFactors& pf,
                           const ForecastDistribution& d, double r);

double marginal_utility(const VgSchedule& s, const PenaltyFactors& pf,
                        const ForecastDistribution& d, Direction dir, double r);

/// Critical-fractile quantity for one side, clamped to [0, headroom].
double optimal_quantity(const VgSchedule& s, const PenaltyFactors& pf,
                        const ForecastDistribution& d, Direction dir, double price);

BrsPosition optimal_position(const VgSchedule& s, const PenaltyFactors& pf,
                             const ForecastDistribution& d, double down_price, double up_price);

DemandCurve demand_curve(const VgSchedule& s, const PenaltyFactors& pf,
                         const ForecastDistribution& d, Direction dir, int n_points);

OicReport oic_report(const VgSchedule& s, const PenaltyFactors& pf, const BrsPosition& pos,
                     const ForecastDistribution& d);

}  // namespace brs
