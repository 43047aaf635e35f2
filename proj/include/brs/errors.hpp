#pragma once

#include <stdexcept>
#include <string>

namespace brs {

/// Input outside the domain of an economic or statistical operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Market operation attempted in the wrong timeline phase.
class PhaseError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Contract status transition outside the lifecycle graph.
class LifecycleError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Executed BRS would push a unit outside its capacity range.
class ContractInfeasible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A simulation invariant (zero-sum, conservation, ...) failed at runtime.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string invariant, const std::string& detail)
        : std::runtime_error("invariant '" + invariant + "' violated: " + detail),
          invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

}  // namespace brs
