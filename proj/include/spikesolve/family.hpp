#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <vector>

#include "spikesolve/domain.hpp"
#include "spikesolve/measure.hpp"

namespace spikesolve {

enum class FamilyKind { Fourier, Chebyshev };

/// Orthonormal measurement family.
///
/// Fourier(f_c): phi_k(x) = exp(i 2 pi k x) on the circle, k in [-f_c, f_c],
/// orthonormal under Lebesgue measure on [0,1). Chebyshev(m): phi_0 = 1,
/// phi_k = sqrt(2) T_k on [-1,1], orthonormal under the arcsine weight
/// (1/pi) (1-t^2)^{-1/2} dt. The theorem-facing "m" is effective_m(): 2 f_c
/// for Fourier, m for Chebyshev.
class MeasurementFamily {
  public:
    static MeasurementFamily fourier(int f_c);
    static MeasurementFamily chebyshev(int degree);

    FamilyKind kind() const { return kind_; }
    bool is_fourier() const { return kind_ == FamilyKind::Fourier; }
    int f_c() const;
    int degree() const;

    int size() const;         // number of family members
    int effective_m() const;  // 2 f_c (Fourier) or m (Chebyshev)
    Domain domain() const;

    /// Frequency of member i (Fourier: i - f_c; Chebyshev: i).
    int index(int i) const;

    /// Rows (phi_i(x))_i and their first/second x-derivatives.
    void basis_row(double x, Eigen::VectorXcd& out) const;
    void basis_row_d1(double x, Eigen::VectorXcd& out) const;
    void basis_row_d2(double x, Eigen::VectorXcd& out) const;

    /// sup over the domain of |phi_i|.
    double basis_sup(int i) const;

    bool operator==(const MeasurementFamily& other) const {
        return kind_ == other.kind_ && param_ == other.param_;
    }

  private:
    MeasurementFamily(FamilyKind kind, int param) : kind_(kind), param_(param) {}
    FamilyKind kind_;
    int param_;  // f_c or degree
};

/// Observation vector y, one entry per family member.
struct SampleVector {
    MeasurementFamily family;
    Eigen::VectorXcd y;
    std::optional<double> sigma;  // noise level when known

    SampleVector(MeasurementFamily fam, Eigen::VectorXcd values)
        : family(fam), y(std::move(values)) {
        if (y.size() != family.size()) {
            throw DomainError("sample vector length must equal family size");
        }
    }
};

/// Generalized polynomial P(x) = sum_k conj(a_k) phi_k(x).
class GeneralizedPolynomial {
  public:
    GeneralizedPolynomial(MeasurementFamily fam, Eigen::VectorXcd coeffs)
        : family_(fam), coeff_(std::move(coeffs)) {
        if (coeff_.size() != family_.size()) {
            throw DomainError("coefficient length must equal family size");
        }
    }

    static GeneralizedPolynomial zero(MeasurementFamily fam) {
        return GeneralizedPolynomial(fam,
                                     Eigen::VectorXcd::Zero(fam.size()));
    }

    const MeasurementFamily& family() const { return family_; }
    const Eigen::VectorXcd& coefficients() const { return coeff_; }
    double coeff_l2() const { return coeff_.norm(); }

    std::complex<double> eval(double x) const;
    std::complex<double> eval_d1(double x) const;
    std::complex<double> eval_d2(double x) const;

  private:
    MeasurementFamily family_;
    Eigen::VectorXcd coeff_;
};

/// Generalized moments y_k = sum_j amp_j e^{i phase_j} phi_k(T_j).
SampleVector forward(const DiscreteMeasure& mu, const MeasurementFamily& fam);

/// Scan grid adapted to the family: uniform on the circle (grid_size points),
/// Chebyshev-angle nodes on the interval (grid_size+1 points incl. +-1).
std::vector<double> scan_points(const MeasurementFamily& fam, int grid_size);

/// P evaluated at scan_points(fam, grid_size); O(grid * size), no FFT.
Eigen::VectorXcd values_on_scan_grid(const GeneralizedPolynomial& p,
                                     int grid_size);

/// Certified bound on the scan-parameter derivative of |P|: Cauchy-Schwarz
/// against ||a||_2 (x-derivative on the circle, theta-derivative on the
/// interval, matching the scan grid's spacing).
double scan_derivative_bound(const MeasurementFamily& fam, double coeff_l2);

/// Same for the second scan-parameter derivative.
double scan_second_derivative_bound(const MeasurementFamily& fam,
                                    double coeff_l2);

struct SupNormBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Certified enclosure of ||P||_inf. lower is the scan-grid maximum; upper
/// adds h*L inflation (h = scan spacing, L from scan_derivative_bound),
/// tightened by the piecewise-linear interpolation remainder h^2/8 * L2.
/// Requires grid_size >= 4 * family size.
SupNormBounds sup_norm_certified(const GeneralizedPolynomial& p, int grid_size);

/// sup_norm_certified on a grid chosen so upper - lower <= target (derived
/// from the derivative bounds, capped at max_grid cells).
SupNormBounds sup_norm_certified_adaptive(const GeneralizedPolynomial& p,
                                          double target,
                                          int max_grid = 2000000);

// ---------------------------------------------------------------------------
// Bernstein second-derivative constants (|P''| <= C * effective_m^2 * ||P||_inf
// for the first two; absolute bounds for the rest).

/// Fourier: pi^2, valid on the whole circle.
double bernstein_fourier_constant();

/// Chebyshev span restricted to {x : sqrt(1-x^2) >= r_min}: 4 / r_min^2.
/// r_min <= 0 (region touching the endpoints) is a domain error.
double bernstein_chebyshev_constant(double r_min);

/// Laplace family exp(-lambda_i x): absolute bound (9 sum lambda_i)^2.
double bernstein_laplace_bound(const std::vector<double>& rates);

/// Muntz family {1, x^a1, ...} on (0, 1-eta): c_eta / x_min^2 with the
/// existential constant c_eta supplied by the caller.
double bernstein_muntz1_bound(double c_eta, double x_min);

/// Muntz family {x^a0, ...}, a0 > 1, on (0,1]: 81 (sum a)(sum a + 1) / x_min^2.
double bernstein_muntz2_bound(const std::vector<double>& exponents,
                              double x_min);

/// Dispatcher over the five families of supported Bernstein inequalities.
struct BernsteinQuery {
    enum class Family { Fourier, Chebyshev, Laplace, Muntz1, Muntz2 };
    Family family = Family::Fourier;
    double region_r_min = 1.0;         // Chebyshev: min sqrt(1-x^2) over region
    double region_x_min = 1.0;         // Muntz: min x over region
    std::vector<double> parameters;    // Laplace rates / Muntz exponents
    double c_eta = 0.0;                // Muntz1 existential constant
};

double bernstein_constant(const BernsteinQuery& query);

// ---------------------------------------------------------------------------
// Quadrature exact for products of family members (Parseval checks, Gram
// matrices): trapezoid on the circle, Gauss-Chebyshev on the interval.

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule orthonormality_quadrature(const MeasurementFamily& fam);

/// integral of |P|^2 dPi by the quadrature above.
double squared_l2_norm_by_quadrature(const GeneralizedPolynomial& p);

}  // namespace spikesolve
