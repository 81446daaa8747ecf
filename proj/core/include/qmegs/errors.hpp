#pragma once

#include <stdexcept>
#include <string>

namespace qmegs {

/// Iterative solver exceeded its iteration cap. Carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Least-squares matrix is numerically rank deficient.
class RankError : public std::runtime_error {
public:
    RankError(const std::string& what, int estimated_rank)
        : std::runtime_error(what + " (estimated rank " + std::to_string(estimated_rank) + ")"),
          estimated_rank_(estimated_rank) {}
    int estimated_rank() const { return estimated_rank_; }

private:
    int estimated_rank_;
};

/// The sufficiently-dominant condition p_min > p_tail does not hold.
class ModelConditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Peak search ran out of eligible grid points before finding K peaks.
class ExhaustionError : public std::runtime_error {
public:
    ExhaustionError(const std::string& what, int peaks_found)
        : std::runtime_error(what + " (" + std::to_string(peaks_found) + " peaks found)"),
          peaks_found_(peaks_found) {}
    int peaks_found() const { return peaks_found_; }

private:
    int peaks_found_;
};

/// Parameter outside the regime where the routine's guarantees hold.
class OutOfRegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace qmegs
