#include "spikesolve/family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spikesolve {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

// sum of k^2 (resp. k^4) for k = 1..n, exact in double for desk sizes
double sum_k2(int n) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += double(k) * k;
    return s;
}
double sum_k4(int n) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
        double k2 = double(k) * k;
        s += k2 * k2;
    }
    return s;
}

// T_k(x), T_k'(x), T_k''(x) rows by the differentiated three-term recurrence;
// exact polynomial identities, stable at the endpoints.
void chebyshev_rows(int m, double x, double* t, double* t1, double* t2) {
    t[0] = 1.0;
    if (t1) t1[0] = 0.0;
    if (t2) t2[0] = 0.0;
    if (m >= 1) {
        t[1] = x;
        if (t1) t1[1] = 1.0;
        if (t2) t2[1] = 0.0;
    }
    for (int k = 2; k <= m; ++k) {
        t[k] = 2.0 * x * t[k - 1] - t[k - 2];
        if (t1) t1[k] = 2.0 * t[k - 1] + 2.0 * x * t1[k - 1] - t1[k - 2];
        if (t2) t2[k] = 4.0 * t1[k - 1] + 2.0 * x * t2[k - 1] - t2[k - 2];
    }
}

}  // namespace

MeasurementFamily MeasurementFamily::fourier(int f_c) {
    if (f_c < 1) throw DomainError("Fourier family requires f_c >= 1");
    return MeasurementFamily(FamilyKind::Fourier, f_c);
}

MeasurementFamily MeasurementFamily::chebyshev(int degree) {
    if (degree < 1) throw DomainError("Chebyshev family requires degree >= 1");
    return MeasurementFamily(FamilyKind::Chebyshev, degree);
}

int MeasurementFamily::f_c() const {
    if (!is_fourier()) throw DomainError("f_c only defined for Fourier");
    return param_;
}

int MeasurementFamily::degree() const {
    if (is_fourier()) throw DomainError("degree only defined for Chebyshev");
    return param_;
}

int MeasurementFamily::size() const {
    return is_fourier() ? 2 * param_ + 1 : param_ + 1;
}

int MeasurementFamily::effective_m() const {
    return is_fourier() ? 2 * param_ : param_;
}

Domain MeasurementFamily::domain() const {
    return is_fourier() ? Domain::circle() : Domain::interval();
}

int MeasurementFamily::index(int i) const {
    return is_fourier() ? i - param_ : i;
}

void MeasurementFamily::basis_row(double x, Eigen::VectorXcd& out) const {
    const int n = size();
    out.resize(n);
    if (is_fourier()) {
        for (int i = 0; i < n; ++i) {
            out[i] = std::polar(1.0, kTwoPi * index(i) * x);
        }
    } else {
        std::vector<double> t(n);
        chebyshev_rows(param_, x, t.data(), nullptr, nullptr);
        out[0] = 1.0;
        const double s2 = std::sqrt(2.0);
        for (int k = 1; k <= param_; ++k) out[k] = s2 * t[k];
    }
}

void MeasurementFamily::basis_row_d1(double x, Eigen::VectorXcd& out) const {
    const int n = size();
    out.resize(n);
    if (is_fourier()) {
        for (int i = 0; i < n; ++i) {
            const double w = kTwoPi * index(i);
            out[i] = std::complex<double>(0.0, w) * std::polar(1.0, w * x);
        }
    } else {
        std::vector<double> t(n), t1(n);
        chebyshev_rows(param_, x, t.data(), t1.data(), nullptr);
        out[0] = 0.0;
        const double s2 = std::sqrt(2.0);
        for (int k = 1; k <= param_; ++k) out[k] = s2 * t1[k];
    }
}

void MeasurementFamily::basis_row_d2(double x, Eigen::VectorXcd& out) const {
    const int n = size();
    out.resize(n);
    if (is_fourier()) {
        for (int i = 0; i < n; ++i) {
            const double w = kTwoPi * index(i);
            out[i] = -w * w * std::polar(1.0, w * x);
        }
    } else {
        std::vector<double> t(n), t1(n), t2(n);
        chebyshev_rows(param_, x, t.data(), t1.data(), t2.data());
        out[0] = 0.0;
        const double s2 = std::sqrt(2.0);
        for (int k = 1; k <= param_; ++k) out[k] = s2 * t2[k];
    }
}

double MeasurementFamily::basis_sup(int i) const {
    if (is_fourier()) return 1.0;
    return i == 0 ? 1.0 : std::sqrt(2.0);
}

std::complex<double> GeneralizedPolynomial::eval(double x) const {
    Eigen::VectorXcd row;
    family_.basis_row(x, row);
    return coeff_.dot(row);  // dot conjugates the first argument
}

std::complex<double> GeneralizedPolynomial::eval_d1(double x) const {
    Eigen::VectorXcd row;
    family_.basis_row_d1(x, row);
    return coeff_.dot(row);
}

std::complex<double> GeneralizedPolynomial::eval_d2(double x) const {
    Eigen::VectorXcd row;
    family_.basis_row_d2(x, row);
    return coeff_.dot(row);
}

SampleVector forward(const DiscreteMeasure& mu, const MeasurementFamily& fam) {
    if (mu.domain() != fam.domain()) {
        throw DomainError("measure domain does not match family domain");
    }
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(fam.size());
    Eigen::VectorXcd row;
    for (const Atom& a : mu.atoms()) {
        fam.basis_row(a.t, row);
        y += a.weight() * row;
    }
    return SampleVector(fam, std::move(y));
}

std::vector<double> scan_points(const MeasurementFamily& fam, int grid_size) {
    if (grid_size < 2) throw DomainError("scan grid too small");
    std::vector<double> pts;
    if (fam.is_fourier()) {
        pts.reserve(grid_size);
        for (int g = 0; g < grid_size; ++g) {
            pts.push_back(double(g) / grid_size);
        }
    } else {
        pts.reserve(grid_size + 1);
        for (int g = 0; g <= grid_size; ++g) {
            pts.push_back(std::cos(kPi * double(g) / grid_size));
        }
    }
    return pts;
}

Eigen::VectorXcd values_on_scan_grid(const GeneralizedPolynomial& p,
                                     int grid_size) {
    const MeasurementFamily& fam = p.family();
    const Eigen::VectorXcd& a = p.coefficients();
    if (fam.is_fourier()) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid_size);
        const int n = fam.size();
        for (int i = 0; i < n; ++i) {
            const std::complex<double> c = std::conj(a[i]);
            if (c == std::complex<double>(0.0, 0.0)) continue;
            const double w = kTwoPi * fam.index(i) / grid_size;
            // four interleaved recurrence chains keep the complex-multiply
            // latency off the critical path; re-anchoring kills drift
            const std::complex<double> step4 = std::polar(1.0, 4.0 * w);
            const int blocks = grid_size / 4;
            std::complex<double> p0(1.0, 0.0);
            std::complex<double> p1 = std::polar(1.0, w);
            std::complex<double> p2 = std::polar(1.0, 2.0 * w);
            std::complex<double> p3 = std::polar(1.0, 3.0 * w);
            for (int blk = 0; blk < blocks; ++blk) {
                const int g = 4 * blk;
                if ((blk & 127) == 0) {
                    p0 = std::polar(1.0, w * g);
                    p1 = std::polar(1.0, w * (g + 1));
                    p2 = std::polar(1.0, w * (g + 2));
                    p3 = std::polar(1.0, w * (g + 3));
                }
                out[g] += c * p0;
                out[g + 1] += c * p1;
                out[g + 2] += c * p2;
                out[g + 3] += c * p3;
                p0 *= step4;
                p1 *= step4;
                p2 *= step4;
                p3 *= step4;
            }
            for (int g = 4 * blocks; g < grid_size; ++g) {
                out[g] += c * std::polar(1.0, w * g);
            }
        }
        return out;
    }
    const auto pts = scan_points(fam, grid_size);
    Eigen::VectorXcd out(pts.size());
    const int m = fam.degree();
    const double s2 = std::sqrt(2.0);
    std::vector<double> t(m + 1);
    for (std::size_t g = 0; g < pts.size(); ++g) {
        chebyshev_rows(m, pts[g], t.data(), nullptr, nullptr);
        std::complex<double> v = std::conj(a[0]);
        for (int k = 1; k <= m; ++k) v += std::conj(a[k]) * (s2 * t[k]);
        out[g] = v;
    }
    return out;
}

double scan_derivative_bound(const MeasurementFamily& fam, double coeff_l2) {
    if (fam.is_fourier()) {
        return coeff_l2 * kTwoPi * std::sqrt(2.0 * sum_k2(fam.f_c()));
    }
    return coeff_l2 * std::sqrt(2.0 * sum_k2(fam.degree()));
}

double scan_second_derivative_bound(const MeasurementFamily& fam,
                                    double coeff_l2) {
    if (fam.is_fourier()) {
        return coeff_l2 * kTwoPi * kTwoPi * std::sqrt(2.0 * sum_k4(fam.f_c()));
    }
    return coeff_l2 * std::sqrt(2.0 * sum_k4(fam.degree()));
}

SupNormBounds sup_norm_certified(const GeneralizedPolynomial& p,
                                 int grid_size) {
    const MeasurementFamily& fam = p.family();
    if (grid_size < 4 * fam.size()) {
        throw DomainError("sup_norm_certified: grid must be >= 4 * family size");
    }
    const Eigen::VectorXcd vals = values_on_scan_grid(p, grid_size);
    double lower = 0.0;
    for (Eigen::Index g = 0; g < vals.size(); ++g) {
        lower = std::max(lower, std::abs(vals[g]));
    }
    const double l2 = p.coeff_l2();
    const double h =
        fam.is_fourier() ? 1.0 / grid_size : kPi / grid_size;
    const double upper_slope = lower + h * scan_derivative_bound(fam, l2);
    const double upper_interp =
        lower + h * h / 8.0 * scan_second_derivative_bound(fam, l2);
    return SupNormBounds{lower, std::min(upper_slope, upper_interp)};
}

SupNormBounds sup_norm_certified_adaptive(const GeneralizedPolynomial& p,
                                          double target,
                                          int max_grid) {
    const MeasurementFamily& fam = p.family();
    if (!(target > 0.0)) throw DomainError("inflation target must be positive");
    const double len = fam.is_fourier() ? 1.0 : kPi;
    const double l2 = p.coeff_l2();
    const double l1b = scan_derivative_bound(fam, l2);
    if (l1b <= 0.0) return sup_norm_certified(p, 4 * fam.size());

    // coarse pass gives a certified rough sup, which tightens the
    // second-derivative (Bernstein) bound used to size the fine grid
    const SupNormBounds rough = sup_norm_certified(p, 8 * fam.size());
    const double m = fam.effective_m();
    const double bern_base = fam.is_fourier() ? kPi * m : m;
    const double l2b = std::min(scan_second_derivative_bound(fam, l2),
                                bern_base * bern_base * rough.upper);
    if (rough.upper - rough.lower <= target) return rough;
    const double by_slope = len * l1b / target;
    const double by_interp = len * std::sqrt(l2b / (8.0 * target));
    const double cells =
        std::max(4.0 * fam.size(), std::min(by_slope, by_interp));
    const int grid = int(std::min(double(max_grid), std::ceil(cells)));
    return sup_norm_certified(p, std::max(grid, 4 * fam.size()));
}

double bernstein_fourier_constant() { return kPi * kPi; }

double bernstein_chebyshev_constant(double r_min) {
    if (!(r_min > 0.0)) {
        throw DomainError(
            "Chebyshev Bernstein constant requires a region bounded away from "
            "the endpoints (r_min > 0)");
    }
    return 4.0 / (r_min * r_min);
}

double bernstein_laplace_bound(const std::vector<double>& rates) {
    double s = 0.0;
    for (double r : rates) {
        if (r <= 0.0) throw DomainError("Laplace rates must be positive");
        s += r;
    }
    return (9.0 * s) * (9.0 * s);
}

double bernstein_muntz1_bound(double c_eta, double x_min) {
    if (c_eta <= 0.0) throw DomainError("Muntz I requires a positive c_eta");
    if (x_min <= 0.0) throw DomainError("Muntz I region must exclude 0");
    return c_eta / (x_min * x_min);
}

double bernstein_muntz2_bound(const std::vector<double>& exponents,
                              double x_min) {
    if (x_min <= 0.0) throw DomainError("Muntz II region must exclude 0");
    double s = 0.0;
    for (double a : exponents) {
        if (a <= 1.0) throw DomainError("Muntz II exponents must exceed 1");
        s += a;
    }
    return 81.0 * s * (s + 1.0) / (x_min * x_min);
}

double bernstein_constant(const BernsteinQuery& q) {
    using F = BernsteinQuery::Family;
    switch (q.family) {
        case F::Fourier:
            return bernstein_fourier_constant();
        case F::Chebyshev:
            return bernstein_chebyshev_constant(q.region_r_min);
        case F::Laplace:
            return bernstein_laplace_bound(q.parameters);
        case F::Muntz1:
            return bernstein_muntz1_bound(q.c_eta, q.region_x_min);
        case F::Muntz2:
            return bernstein_muntz2_bound(q.parameters, q.region_x_min);
    }
    throw DomainError("unknown Bernstein family");
}

QuadratureRule orthonormality_quadrature(const MeasurementFamily& fam) {
    QuadratureRule rule;
    if (fam.is_fourier()) {
        const int n = 4 * fam.size();
        rule.nodes.reserve(n);
        rule.weights.assign(n, 1.0 / n);
        for (int j = 0; j < n; ++j) rule.nodes.push_back(double(j) / n);
    } else {
        const int n = 2 * (fam.degree() + 1);
        rule.nodes.reserve(n);
        rule.weights.assign(n, 1.0 / n);
        for (int j = 0; j < n; ++j) {
            rule.nodes.push_back(std::cos(kPi * (j + 0.5) / n));
        }
    }
    return rule;
}

double squared_l2_norm_by_quadrature(const GeneralizedPolynomial& p) {
    const QuadratureRule rule = orthonormality_quadrature(p.family());
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        s += rule.weights[j] * std::norm(p.eval(rule.nodes[j]));
    }
    return s;
}

}  // namespace spikesolve
