#pragma once

#include <stdexcept>
#include <string>

namespace ntnsim {

/// Input outside the mathematical domain of an operation (bad angle, negative range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent or invalid configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke a precondition between cooperating components (dimension mismatch, empty input).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Ill-conditioned or singular linear algebra.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A UE cannot deliver its payload within the frame at maximum power.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::size_t ue, double max_rate_bps, const std::string& what)
        : std::runtime_error(what), ue_(ue), max_rate_bps_(max_rate_bps) {}

    std::size_t ue() const noexcept { return ue_; }
    double max_rate_bps() const noexcept { return max_rate_bps_; }

private:
    std::size_t ue_;
    double max_rate_bps_;
};

}  // namespace ntnsim
