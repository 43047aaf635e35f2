#pragma once

#include <span>
#include <vector>

namespace brs {

/// Error-free floating-point accumulator (Shewchuk expansion). The result of
/// `value()` is the exact sum correctly rounded, independent of add order.
class ExactSum {
public:
    void add(double x);
    double value() const;

private:
    std::vector<double> partials_;
};

double exact_sum(std::span<const double> xs);

}  // namespace brs
