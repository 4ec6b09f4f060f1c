#pragma once

#include <vector>

#include "spikesolve/family.hpp"
#include "spikesolve/measure.hpp"

namespace spikesolve {

/// Parameters of the quadratic isolation condition: 1 - |P(x)| must dominate
/// min{C_a m^2 d(x,S)^2, C_b} everywhere. c0 = sqrt(C_b/C_a) marks the
/// crossover radius (in units of 1/m) between the two regimes.
struct QicConstants {
    double C_a = 0.0;
    double C_b = 0.0;

    QicConstants(double ca, double cb) : C_a(ca), C_b(cb) {
        if (!(C_a > 0.0) || !(C_b > 0.0) || !(C_b < 1.0)) {
            throw DomainError("QIC requires C_a > 0 and 0 < C_b < 1");
        }
    }

    double c0() const { return std::sqrt(C_b / C_a); }
};

/// Fourier QIC constants established by the squared-Fejer construction at
/// separation 2.5/f_c.
QicConstants fourier_default_qic();

/// Outcome of a certified QIC check. qic_margin is the certified minimum of
/// 1 - |P(x)| - min{C_a m^2 d(x,S)^2, C_b} over the region outside small
/// per-spike radii (those are certified by a Taylor argument instead, since
/// the inequality is tight at the spikes); inflation uses Bernstein
/// derivative bounds. Interpolation holds up to phase_residual at the nodes.
struct CertificateReport {
    bool passed = false;
    double phase_residual = 0.0;       // max_k |P(T_k) - e^{-i theta_k}|
    double derivative_residual = 0.0;  // max_k |P'(T_k)|
    double qic_margin = 0.0;
    int grid_size = 0;
    bool local_curvature_ok = false;   // per-spike Taylor checks
    double sup_norm_upper = 0.0;       // certified ||P||_inf upper bound
};

/// Dual certificate for the Fourier family: squared Fejer kernel with
/// frequency budget floor(f_c/2), coefficients solved from the phase
/// interpolation P(T_k) = e^{-i theta_k} and the stationarity P'(T_k) = 0.
/// Requires f_c >= 128 and min separation >= 2.5/f_c.
GeneralizedPolynomial construct_fourier_certificate(
    const std::vector<double>& support, const std::vector<double>& phases,
    int f_c);

/// Certified check of QIC(C_a, C_b) for a candidate polynomial. Failure is
/// reported, not thrown. Requires grid_size >= 16 * family size.
CertificateReport verify_qic(const GeneralizedPolynomial& p,
                             const std::vector<double>& support,
                             const std::vector<double>& phases,
                             const QicConstants& qic, int grid_size);

/// Grid size at which verify_qic's inflation is small enough to certify the
/// default Fourier constants.
int suggested_qic_grid(const MeasurementFamily& fam);

/// Empirical falsification sweep of the Bernstein isolation property: the
/// worst observed |P''| / (C_c m^2 ||P||_inf) over the near set, for random
/// coefficient vectors. Deterministic (internally seeded).
struct BipReport {
    double worst_ratio = 0.0;
    int trials = 0;
    bool passed = false;  // worst_ratio <= 1
};

BipReport verify_bip(const MeasurementFamily& fam,
                     const std::vector<double>& support, double c0,
                     double C_c, int trials);

/// Sign-pattern interpolation polynomial: Q_j = (P + Ptilde)/2 where P
/// interpolates +1 at every spike and Ptilde interpolates +1 at T_j, -1
/// elsewhere. Q_j(T_k) = delta_{kj} to 1e-8 and |Q_j| <= 1 - C_b on the far
/// set (checked with the default Fourier constants).
GeneralizedPolynomial build_interpolation_qj(const std::vector<double>& support,
                                             std::size_t j, int f_c);

/// Certified grid check that |Q| <= bound on the far set F(c0, S).
/// Returns the certified margin (min over far cells of bound - |Q|).
double far_bound_certified_margin(const GeneralizedPolynomial& q,
                                  const std::vector<double>& support,
                                  double c0, double bound, int grid_size);

}  // namespace spikesolve
