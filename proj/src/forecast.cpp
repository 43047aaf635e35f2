#include "brs/forecast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "brs/errors.hpp"

namespace brs {

namespace {


void require_capacity_mean(double capacity, double mean) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
        std::ostringstream os;
        os << "forecast capacity must be positive and finite, got " << capacity;
        throw DomainError(os.str());
    }
    if (!(mean > 0.0 && mean < capacity)) {
        std::ostringstream os;
        os << "forecast mean must lie in (0, " << capacity << "), got " << mean;
        throw DomainError(os.str());
    }
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double min_feasible_variance(double capacity, double mean) {
    const double mu = mean / capacity;
    return kMinVarianceFraction * mu * (1.0 - mu) * capacity * capacity;
}

double max_feasible_variance(double capacity, double mean) {
    const double mu = mean / capacity;
    return kMaxVarianceFraction * mu * (1.0 - mu) * capacity * capacity;
}

ForecastDistribution ForecastDistribution::from_mean_variance(double capacity, double mean,
                                                              double variance) {
    require_capacity_mean(capacity, mean);
    if (std::isnan(variance)) {
        throw DomainError("forecast variance is NaN");
    }
    const double lo = min_feasible_variance(capacity, mean);
    const double hi = max_feasible_variance(capacity, mean);
    const double v = std::clamp(variance, lo, hi);
    const bool clamped = v != variance;

    // Beta moment equations on the normalised scale:
    //   mu = a / (a + b),  sigma^2 = mu (1 - mu) / (a + b + 1).
    const double mu = mean / capacity;
    const double var_n = v / (capacity * capacity);
    const double total = mu * (1.0 - mu) / var_n - 1.0;
    return ForecastDistribution(capacity, mean, v, mu * total, (1.0 - mu) * total, clamped);
}

ForecastDistribution ForecastDistribution::from_mean(double capacity, double mean,
                                                     double coefficient) {
    require_capacity_mean(capacity, mean);
    if (!(coefficient >= 0.0)) {
        throw DomainError("variance coefficient must be nonnegative");
    }
    const double mu = mean / capacity;
    return from_mean_variance(capacity, mean, coefficient * mu * (1.0 - mu) * capacity * capacity);
}

ForecastDistribution ForecastDistribution::from_shapes(double capacity, double shape_a,
                                                       double shape_b) {
    if (!(shape_a > 0.0) || !(shape_b > 0.0)) {
        throw DomainError("Beta shape parameters must be positive");
    }
    const double total = shape_a + shape_b;
    const double mu = shape_a / total;
    const double mean = mu * capacity;
    require_capacity_mean(capacity, mean);
    const double variance = mu * (1.0 - mu) / (total + 1.0) * capacity * capacity;
    return ForecastDistribution(capacity, mean, variance, shape_a, shape_b, false);
}

double ForecastDistribution::analytic_mean() const noexcept {
    return capacity_ * shape_a_ / (shape_a_ + shape_b_);
}

double ForecastDistribution::analytic_variance() const noexcept {
    const double total = shape_a_ + shape_b_;
    return capacity_ * capacity_ * shape_a_ * shape_b_ / (total * total * (total + 1.0));
}

double pdf(const ForecastDistribution& d, double p) {
    const double cap = d.capacity();
    if (!(p >= 0.0 && p <= cap)) {
        std::ostringstream os;
        os << "pdf evaluated at " << p << " MW outside [0, " << cap << "]";
        throw DomainError(os.str());
    }
    const double a = d.shape_a();
    const double b = d.shape_b();
    const double x = p / cap;

    auto endpoint = [](double shape, double at_one) {
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        if (shape > 1.0) return 0.0;
        return at_one;
    };
    if (x == 0.0) return endpoint(a, std::exp(-log_beta(a, b))) / cap;
    if (x == 1.0) return endpoint(b, std::exp(-log_beta(a, b))) / cap;

    const double log_density = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
    return std::exp(log_density) / cap;
}

double cdf(const ForecastDistribution& d, double p) {
    if (std::isnan(p)) throw DomainError("cdf evaluated at NaN");
    if (p <= 0.0) return 0.0;
    if (p >= d.capacity()) return 1.0;
    return boost::math::ibeta(d.shape_a(), d.shape_b(), p / d.capacity());
}

double quantile(const ForecastDistribution& d, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        std::ostringstream os;
        os << "quantile level " << q << " outside [0, 1]";
        throw DomainError(os.str());
    }
    if (q == 0.0) return 0.0;
    if (q == 1.0) return d.capacity();

    // Bisection over the bit patterns of [0, 1]: nonnegative doubles order like
    // their bits, so 64 steps give the smallest x with F(x) >= q even for tiny
    // shapes whose quantiles sit hundreds of decades below one.
    const double a = d.shape_a();
    const double b = d.shape_b();
    auto lo = std::bit_cast<std::uint64_t>(0.0);
    auto hi = std::bit_cast<std::uint64_t>(1.0);
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (boost::math::ibeta(a, b, std::bit_cast<double>(mid)) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::bit_cast<double>(hi) * d.capacity();
}

double partial_expectation(const ForecastDistribution& d, double lo, double hi) {
    const double cap = d.capacity();
    if (!(lo >= 0.0 && hi <= cap && lo <= hi)) {
        std::ostringstream os;
        os << "partial expectation bounds [" << lo << ", " << hi << "] invalid for capacity "
           << cap;
        throw DomainError(os.str());
    }
    if (lo == hi) return 0.0;

    // x f(x; a, b) = a / (a + b) * f(x; a + 1, b)
    const double a = d.shape_a();
    const double b = d.shape_b();
    auto upper_cdf = [&](double p) {
        if (p <= 0.0) return 0.0;
        if (p >= cap) return 1.0;
        return boost::math::ibeta(a + 1.0, b, p / cap);
    };
    return d.analytic_mean() * (upper_cdf(hi) - upper_cdf(lo));
}

ForecastDistribution scale_variance(const ForecastDistribution& d, VarianceScale s) {
    if (!(s.factor >= 0.0)) {
        throw DomainError("variance scale factor must be nonnegative");
    }
    if (s.factor == 1.0) return d;
    return ForecastDistribution::from_mean_variance(d.capacity(), d.mean(),
                                                    d.variance() * s.factor);
}

}  // namespace brs
