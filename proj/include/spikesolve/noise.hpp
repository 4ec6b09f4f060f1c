#pragma once

#include <cstdint>
#include <vector>

#include "spikesolve/family.hpp"

namespace spikesolve {

/// SplitMix64: counter-based 64-bit generator. One instance per substream;
/// substream for trial t is seeded with seed ^ t.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1].
    double uniform_pos() {
        return (double(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian();

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class NoiseKind { ComplexGaussian, RealGaussian };

struct NoiseModel {
    NoiseKind kind = NoiseKind::ComplexGaussian;
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

/// Closed-form tail bound value with its regime-of-validity flag. Outside
/// the proposition's stated domain the bound is the vacuous 1 and
/// regime_valid is false.
struct TailBound {
    double u = 0.0;
    double probability_bound = 1.0;
    bool regime_valid = false;
};

/// Rice bound for the sup of |sum xi_k phi_k| over [-1,1], Chebyshev family
/// with i.i.d. standard normal coefficients. Valid for m >= 12 and
/// u > sqrt(1+2m).
TailBound rice_poly_tail(int m, double u);

/// Rice bound for the sup of the complex Fourier noise polynomial with
/// standard complex Gaussian coefficients. Valid for u > sqrt(2).
TailBound rice_fourier_tail(int f_c, double u);

/// lambda_F = 2 sigma sqrt(6 f_c log f_c) (natural log). Requires f_c >= 2.
double lambda_fourier(int f_c, double sigma);

/// lambda_M = sigma sqrt(6 m log m). Requires m >= 9.
double lambda_moment(int m, double sigma);

/// Complement-event bound 2 exp(-(log f_c) lambda^2 / lambda_F^2), clamped.
/// Requires lambda >= lambda_F.
double failure_probability_fourier(int f_c, double sigma, double lambda);

/// Complement-event bound (8 sqrt6/sqrt(2 pi)) (lambda/lambda_M) sqrt(log m)
/// exp(-(2 lambda^2/lambda_M^2 - 1) log m), clamped. Requires
/// lambda >= lambda_M.
double failure_probability_moment(int m, double sigma, double lambda);

/// Draws the noise vector for the family; complex <-> Fourier,
/// real <-> Chebyshev. Deterministic given the model seed.
SampleVector sample_noise(const NoiseModel& model,
                          const MeasurementFamily& fam);

/// The noise polynomial sum_k conj(eps_k) phi_k as a generalized polynomial.
GeneralizedPolynomial noise_polynomial(const SampleVector& eps);

struct CalibrationPoint {
    double u = 0.0;
    double analytic_bound = 1.0;
    bool regime_valid = false;
    double exceedance = 0.0;  // empirical fraction (grid max > u)
    double wilson_low = 0.0;
    double wilson_high = 1.0;
    int trials = 0;
};

/// 95% Wilson score interval for k successes out of n.
void wilson_interval(long long k, long long n, double& low, double& high);

/// Empirical exceedance of the noise-polynomial sup against each threshold,
/// with the matching closed-form bound evaluated at u / sigma. The grid max
/// lower-bounds the true sup, so the fractions are lower-bound estimates.
/// Requires trials >= 100 and grid_size >= 8 * family size.
std::vector<CalibrationPoint> monte_carlo_sup_tail(
    const MeasurementFamily& fam, const NoiseModel& model,
    const std::vector<double>& u_list, int trials, int grid_size);

}  // namespace spikesolve
