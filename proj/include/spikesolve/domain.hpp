#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikesolve {

enum class DomainKind { Circle, Interval };

/// Compact metric space the measures live on: the unit circle [0,1) with
/// wrap-around distance, or the interval [-1,1] with absolute distance.
struct Domain {
    DomainKind kind = DomainKind::Circle;

    static Domain circle() { return Domain{DomainKind::Circle}; }
    static Domain interval() { return Domain{DomainKind::Interval}; }

    bool is_circle() const { return kind == DomainKind::Circle; }

    double length() const { return is_circle() ? 1.0 : 2.0; }

    double lower() const { return is_circle() ? 0.0 : -1.0; }
    double upper() const { return is_circle() ? 1.0 : 1.0; }

    /// Wraps circle points into [0,1); interval points pass through.
    double canonical(double x) const {
        if (!is_circle()) return x;
        double r = x - std::floor(x);
        if (r >= 1.0) r -= 1.0;  // guard against floor rounding at integers
        return r;
    }

    bool contains(double x) const {
        if (is_circle()) return std::isfinite(x);
        return x >= -1.0 && x <= 1.0;
    }

    double distance(double x, double y) const {
        if (is_circle()) {
            double d = std::fabs(canonical(x) - canonical(y));
            return std::min(d, 1.0 - d);
        }
        return std::fabs(x - y);
    }

    bool operator==(const Domain&) const = default;

    std::string name() const { return is_circle() ? "circle" : "interval"; }
};

/// Thrown on violated preconditions and invalid inputs.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace spikesolve
