#include "brs/exact_sum.hpp"

#include <cmath>
#include <cstddef>

namespace brs {

void ExactSum::add(double x) {
    std::size_t used = 0;
    for (double y : partials_) {
        if (std::abs(x) < std::abs(y)) std::swap(x, y);
        const double hi = x + y;
        const double lo = y - (hi - x);
        if (lo != 0.0) partials_[used++] = lo;
        x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
}

double ExactSum::value() const {
    if (partials_.empty()) return 0.0;
    // Round the expansion to nearest, walking from the most significant partial.
    auto i = partials_.size();
    double hi = partials_[--i];
    double lo = 0.0;
    while (i > 0) {
        const double x = hi;
        const double y = partials_[--i];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) break;
    }
    if (i > 0 && ((lo < 0.0 && partials_[i - 1] < 0.0) || (lo > 0.0 && partials_[i - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

double exact_sum(std::span<const double> xs) {
    ExactSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace brs
