#pragma once

// Probabilistic VG output model: a Beta distribution stretched onto
// [0, capacity] and parameterised by its mean and variance in MW.

namespace brs {

/// Multiplier applied to forecast-error variance.
struct VarianceScale {
    double factor = 1.0;
};

/// Feasibility margin on the normalised variance, as fractions of mu(1 - mu).
inline constexpr double kMinVarianceFraction = 1e-6;
inline constexpr double kMaxVarianceFraction = 0.999;

/// Default coefficient c in sigma_n^2 = c * mu_n * (1 - mu_n).
inline constexpr double kDefaultVarianceCoefficient = 0.05;

class ForecastDistribution {
public:
    /// Moment-matched Beta on [0, capacity]. The variance is clamped into the
    /// feasibility margin; `clamped()` reports whether that happened.
    static ForecastDistribution from_mean_variance(double capacity, double mean, double variance);

    /// Mean-conditional variance: sigma_n^2 = coefficient * mu_n (1 - mu_n).
    static ForecastDistribution from_mean(double capacity, double mean,
                                          double coefficient = kDefaultVarianceCoefficient);

    static ForecastDistribution from_shapes(double capacity, double shape_a, double shape_b);

    double capacity() const noexcept { return capacity_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double shape_a() const noexcept { return shape_a_; }
    double shape_b() const noexcept { return shape_b_; }
    bool clamped() const noexcept { return clamped_; }

    /// Mean and variance recomputed from the shape parameters.
    double analytic_mean() const noexcept;
    double analytic_variance() const noexcept;

private:
    ForecastDistribution(double capacity, double mean, double variance, double a, double b,
                         bool clamped)
        : capacity_(capacity), mean_(mean), variance_(variance), shape_a_(a), shape_b_(b),
          clamped_(clamped) {}

    double capacity_;
    double mean_;
    double variance_;
    double shape_a_;
    double shape_b_;
    bool clamped_;
};

/// Density in 1/MW. Throws DomainError outside [0, capacity]. At an endpoint
/// whose shape parameter is below one the density is +infinity.
double pdf(const ForecastDistribution& d, double p);

/// P(output <= p); clamps to {0, 1} outside [0, capacity].
double cdf(const ForecastDistribution& d, double p);

/// Inverse CDF by bracketed root finding. Throws DomainError for q outside [0, 1].
double quantile(const ForecastDistribution& d, double q);

/// Integral of p * f(p) over [lo, hi]. Throws DomainError unless
/// 0 <= lo <= hi <= capacity.
double partial_expectation(const ForecastDistribution& d, double lo, double hi);

/// Same mean, variance times `s.factor`, clamped into the feasibility margin.
ForecastDistribution scale_variance(const ForecastDistribution& d, VarianceScale s);

/// Lowest and highest variance (MW^2) representable for this mean.
double min_feasible_variance(double capacity, double mean);
double max_feasible_variance(double capacity, double mean);

}  // namespace brs
