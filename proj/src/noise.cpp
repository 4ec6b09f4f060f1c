#include "spikesolve/noise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "spikesolve/parallel.hpp"

namespace spikesolve {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
}  // namespace

double SplitMix64::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(2.0 * kPi * u2);
    return r * std::cos(2.0 * kPi * u2);
}

TailBound rice_poly_tail(int m, double u) {
    if (u <= 0.0) throw DomainError("rice_poly_tail: u must be positive");
    TailBound tb;
    tb.u = u;
    if (m >= 12 && u > std::sqrt(1.0 + 2.0 * m)) {
        tb.regime_valid = true;
        const double raw = 4.0 * m * (1.0 + u) / kSqrt2Pi *
                           std::exp(-u * u / (1.0 + 2.0 * m));
        tb.probability_bound = std::min(1.0, raw);
    }
    return tb;
}

TailBound rice_fourier_tail(int f_c, double u) {
    if (f_c < 1) throw DomainError("rice_fourier_tail: f_c must be >= 1");
    TailBound tb;
    tb.u = u;
    if (u > std::sqrt(2.0)) {
        tb.regime_valid = true;
        const double n = 2.0 * f_c + 1.0;
        const double raw =
            4.0 * (std::exp(-u * u / (2.0 * n)) +
                   std::sqrt(double(f_c) * (f_c + 1.0) / 3.0) *
                       std::exp(-u * u / (4.0 * n)));
        tb.probability_bound = std::min(1.0, raw);
    }
    return tb;
}

double lambda_fourier(int f_c, double sigma) {
    if (f_c < 2) throw DomainError("lambda_fourier requires f_c >= 2");
    if (sigma <= 0.0) throw DomainError("lambda_fourier requires sigma > 0");
    return 2.0 * sigma * std::sqrt(6.0 * f_c * std::log(double(f_c)));
}

double lambda_moment(int m, double sigma) {
    if (m < 9) throw DomainError("lambda_moment requires m >= 9");
    if (sigma <= 0.0) throw DomainError("lambda_moment requires sigma > 0");
    return sigma * std::sqrt(6.0 * m * std::log(double(m)));
}

double failure_probability_fourier(int f_c, double sigma, double lambda) {
    const double lf = lambda_fourier(f_c, sigma);
    if (lambda < lf) {
        throw DomainError("failure_probability_fourier: lambda below lambda_F");
    }
    const double ratio = lambda / lf;
    const double raw = 2.0 * std::exp(-std::log(double(f_c)) * ratio * ratio);
    return std::clamp(raw, 0.0, 1.0);
}

double failure_probability_moment(int m, double sigma, double lambda) {
    const double lm = lambda_moment(m, sigma);
    if (lambda < lm) {
        throw DomainError("failure_probability_moment: lambda below lambda_M");
    }
    const double logm = std::log(double(m));
    const double ratio = lambda / lm;
    const double raw = (8.0 * std::sqrt(6.0) / kSqrt2Pi) * ratio *
                       std::sqrt(logm) *
                       std::exp(-(2.0 * ratio * ratio - 1.0) * logm);
    return std::clamp(raw, 0.0, 1.0);
}

SampleVector sample_noise(const NoiseModel& model,
                          const MeasurementFamily& fam) {
    const bool complex_model = model.kind == NoiseKind::ComplexGaussian;
    if (complex_model != fam.is_fourier()) {
        throw DomainError(
            "noise kind must match the family (complex <-> Fourier, real <-> "
            "Chebyshev)");
    }
    if (model.sigma < 0.0) throw DomainError("sigma must be nonnegative");
    Eigen::VectorXcd eps(fam.size());
    SplitMix64 rng(model.seed);
    for (int k = 0; k < fam.size(); ++k) {
        if (complex_model) {
            eps[k] = model.sigma * std::complex<double>(rng.gaussian(),
                                                        rng.gaussian());
        } else {
            eps[k] = model.sigma * rng.gaussian();
        }
    }
    return SampleVector(fam, std::move(eps));
}

GeneralizedPolynomial noise_polynomial(const SampleVector& eps) {
    return GeneralizedPolynomial(eps.family, eps.y);
}

void wilson_interval(long long k, long long n, double& low, double& high) {
    const double z = 1.959963984540054;  // 97.5% standard normal quantile
    const double p = double(k) / double(n);
    const double z2n = z * z / double(n);
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half =
        z * std::sqrt(p * (1.0 - p) / double(n) + z2n / (4.0 * double(n))) /
        (1.0 + z2n);
    low = (k == 0) ? 0.0 : std::max(0.0, center - half);
    high = (k == n) ? 1.0 : std::min(1.0, center + half);
}

std::vector<CalibrationPoint> monte_carlo_sup_tail(
    const MeasurementFamily& fam, const NoiseModel& model,
    const std::vector<double>& u_list, int trials, int grid_size) {
    if (trials < 100) throw DomainError("monte_carlo_sup_tail: trials >= 100");
    if (grid_size < 8 * fam.size()) {
        throw DomainError("monte_carlo_sup_tail: grid must be >= 8 * size");
    }
    std::vector<double> maxima(trials, 0.0);
    parallel_for(std::size_t(trials), [&](std::size_t t) {
        NoiseModel sub = model;
        sub.seed = model.seed ^ std::uint64_t(t);
        const SampleVector eps = sample_noise(sub, fam);
        const Eigen::VectorXcd vals =
            values_on_scan_grid(noise_polynomial(eps), grid_size);
        double mx = 0.0;
        for (Eigen::Index g = 0; g < vals.size(); ++g) {
            mx = std::max(mx, std::abs(vals[g]));
        }
        maxima[t] = mx;
    });

    std::vector<CalibrationPoint> out;
    out.reserve(u_list.size());
    for (double u : u_list) {
        CalibrationPoint pt;
        pt.u = u;
        pt.trials = trials;
        long long count = 0;
        for (double m : maxima) {
            if (m > u) ++count;
        }
        pt.exceedance = double(count) / double(trials);
        wilson_interval(count, trials, pt.wilson_low, pt.wilson_high);
        const double u_std = model.sigma > 0.0 ? u / model.sigma : u;
        const TailBound tb = fam.is_fourier()
                                 ? rice_fourier_tail(fam.f_c(), u_std)
                                 : rice_poly_tail(fam.degree(), u_std);
        pt.analytic_bound = tb.probability_bound;
        pt.regime_valid = tb.regime_valid;
        out.push_back(pt);
    }
    return out;
}

}  // namespace spikesolve
