#include "spikesolve/certificate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "spikesolve/noise.hpp"

namespace spikesolve {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kPhaseTolerance = 1e-8;
constexpr double kNodeBudget = 1e-7;  // |e0| + r|e1| allowance in local checks

// Squared Fejer kernel with frequency budget M: K = (F_M / (M+1))^2, a real
// even trigonometric polynomial of degree 2M with K(0) = 1 = max K.
class SquaredFejerKernel {
  public:
    explicit SquaredFejerKernel(int budget) : M_(budget) {
        // triangle coefficients of F_M/(M+1), then self-convolution
        const double mp1 = double(M_) + 1.0;
        std::vector<double> h(2 * M_ + 1);
        for (int j = -M_; j <= M_; ++j) {
            h[j + M_] = (mp1 - std::abs(j)) / (mp1 * mp1);
        }
        coeff_.assign(2 * M_ + 1, 0.0);  // c_q for q = 0..2M
        for (int q = 0; q <= 2 * M_; ++q) {
            double s = 0.0;
            for (int j = std::max(-M_, q - M_); j <= M_; ++j) {
                const int l = q - j;
                if (l < -M_ || l > M_) continue;
                s += h[j + M_] * h[l + M_];
            }
            coeff_[q] = s;
        }
    }

    int degree() const { return 2 * M_; }
    double coefficient(int k) const { return coeff_[std::abs(k)]; }

    double eval(double t) const {
        double s = coeff_[0];
        for (int k = 1; k <= 2 * M_; ++k) {
            s += 2.0 * coeff_[k] * std::cos(kTwoPi * k * t);
        }
        return s;
    }
    double eval_d1(double t) const {
        double s = 0.0;
        for (int k = 1; k <= 2 * M_; ++k) {
            s -= 2.0 * kTwoPi * k * coeff_[k] * std::sin(kTwoPi * k * t);
        }
        return s;
    }
    double eval_d2(double t) const {
        double s = 0.0;
        for (int k = 1; k <= 2 * M_; ++k) {
            const double w = kTwoPi * k;
            s -= 2.0 * w * w * coeff_[k] * std::cos(kTwoPi * k * t);
        }
        return s;
    }

  private:
    int M_;
    std::vector<double> coeff_;
};

double circle_diff(double a, double b) {
    // signed representative of a - b in (-1/2, 1/2]
    double d = a - b;
    d -= std::round(d);
    return d;
}

// scan parameter of a domain point: x itself on the circle, arccos on [-1,1]
double scan_param(const MeasurementFamily& fam, double x) {
    return fam.is_fourier() ? x : std::acos(std::clamp(x, -1.0, 1.0));
}

double scan_param_distance(const MeasurementFamily& fam, double a, double b) {
    if (fam.is_fourier()) return std::fabs(circle_diff(a, b));
    return std::fabs(a - b);
}

// Bernstein bound on the p-th scan-parameter derivative of P relative to a
// certified sup bound: (pi m)^p on the circle, m^p in the Chebyshev angle.
double scan_bernstein_factor(const MeasurementFamily& fam, int p) {
    const double m = fam.effective_m();
    const double base = fam.is_fourier() ? kPi * m : m;
    double f = 1.0;
    for (int i = 0; i < p; ++i) f *= base;
    return f;
}

}  // namespace

QicConstants fourier_default_qic() { return QicConstants(0.0838, 0.0092); }

GeneralizedPolynomial construct_fourier_certificate(
    const std::vector<double>& support, const std::vector<double>& phases,
    int f_c) {
    if (support.empty()) {
        throw DomainError("certificate construction needs at least one spike");
    }
    if (support.size() != phases.size()) {
        throw DomainError("support/phases size mismatch");
    }
    if (f_c < 128) {
        throw DomainError("Fourier certificate construction requires f_c >= 128");
    }
    const Domain circle = Domain::circle();
    std::vector<double> nodes;
    nodes.reserve(support.size());
    for (double t : support) nodes.push_back(circle.canonical(t));
    if (nodes.size() >= 2 &&
        min_separation(nodes, circle) < 2.5 / double(f_c) - 1e-15) {
        throw DomainError("certificate requires min separation >= 2.5/f_c");
    }

    const int s = int(nodes.size());
    const SquaredFejerKernel kernel(f_c / 2);
    const double curv = std::sqrt(std::fabs(kernel.eval_d2(0.0)));

    // Interpolation system in (alpha, beta*curv); scaling balances the
    // derivative rows against the value rows.
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * s, 2 * s);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * s);
    for (int k = 0; k < s; ++k) {
        rhs[k] = std::polar(1.0, -phases[k]);
        for (int j = 0; j < s; ++j) {
            const double d = circle_diff(nodes[k], nodes[j]);
            A(k, j) = kernel.eval(d);
            A(k, s + j) = kernel.eval_d1(d) / curv;
            A(s + k, j) = kernel.eval_d1(d) / curv;
            A(s + k, s + j) = kernel.eval_d2(d) / (curv * curv);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) {
        throw NumericalError("certificate interpolation system is singular");
    }
    const Eigen::VectorXcd sol = lu.solve(rhs);

    const MeasurementFamily fam = MeasurementFamily::fourier(f_c);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(fam.size());
    for (int i = 0; i < fam.size(); ++i) {
        const int k = fam.index(i);
        if (std::abs(k) > kernel.degree()) continue;
        std::complex<double> b(0.0, 0.0);
        for (int j = 0; j < s; ++j) {
            const std::complex<double> alpha = sol[j];
            const std::complex<double> beta = sol[s + j] / curv;
            b += (alpha + std::complex<double>(0.0, kTwoPi * k) * beta) *
                 std::polar(1.0, -kTwoPi * k * nodes[j]);
        }
        a[i] = std::conj(kernel.coefficient(k) * b);
    }
    GeneralizedPolynomial p(fam, std::move(a));

    double resid = 0.0;
    for (int k = 0; k < s; ++k) {
        resid = std::max(
            resid, std::abs(p.eval(nodes[k]) - std::polar(1.0, -phases[k])));
    }
    if (resid > kPhaseTolerance) {
        throw NumericalError("certificate interpolation residual above 1e-8");
    }
    return p;
}

CertificateReport verify_qic(const GeneralizedPolynomial& p,
                             const std::vector<double>& support,
                             const std::vector<double>& phases,
                             const QicConstants& qic, int grid_size) {
    const MeasurementFamily& fam = p.family();
    if (grid_size < 16 * fam.size()) {
        throw DomainError("verify_qic: grid must be >= 16 * family size");
    }
    if (support.size() != phases.size()) {
        throw DomainError("support/phases size mismatch");
    }
    const Domain dom = fam.domain();
    const double m = fam.effective_m();
    const double m2 = m * m;
    const int s = int(support.size());

    CertificateReport rep;
    rep.grid_size = grid_size;

    // node residuals (value and scan-parameter derivative)
    std::vector<double> node_param(s), e0(s), e1(s);
    std::vector<std::complex<double>> psi2(s);
    for (int k = 0; k < s; ++k) {
        const double t = dom.canonical(support[k]);
        node_param[k] = scan_param(fam, t);
        const std::complex<double> target = std::polar(1.0, -phases[k]);
        const std::complex<double> ph = std::polar(1.0, phases[k]);
        e0[k] = std::abs(p.eval(t) - target);
        if (fam.is_fourier()) {
            e1[k] = std::abs(p.eval_d1(t));
            psi2[k] = ph * p.eval_d2(t);
        } else {
            const double th = node_param[k];
            const std::complex<double> d1 = p.eval_d1(t);
            const std::complex<double> d2 = p.eval_d2(t);
            e1[k] = std::abs(-std::sin(th) * d1);
            psi2[k] =
                ph * (-std::cos(th) * d1 + std::sin(th) * std::sin(th) * d2);
        }
        rep.phase_residual = std::max(rep.phase_residual, e0[k]);
        rep.derivative_residual = std::max(rep.derivative_residual, e1[k]);
    }

    // certified sup-norm of P over the same scan grid
    const Eigen::VectorXcd vals = values_on_scan_grid(p, grid_size);
    double lower = 0.0;
    for (Eigen::Index g = 0; g < vals.size(); ++g) {
        lower = std::max(lower, std::abs(vals[g]));
    }
    const double h = (fam.is_fourier() ? 1.0 : kPi) / grid_size;
    const double l2c = p.coeff_l2();
    const double u1 = lower + h * scan_derivative_bound(fam, l2c);
    double b2 = std::min(scan_second_derivative_bound(fam, l2c),
                         scan_bernstein_factor(fam, 2) * u1);
    const double usup = std::min(u1, lower + h * h / 8.0 * b2);
    rep.sup_norm_upper = usup;
    b2 = std::min(b2, scan_bernstein_factor(fam, 2) * usup);
    const double b3 = scan_bernstein_factor(fam, 3) * usup;

    // Per-spike Taylor certification on a radius r_k: the inequality is tight
    // at the spikes, so grid inflation cannot certify it there. Needs
    // gamma_k = -Re(psi'')/2 - C_a m^2 slope^2 > 0 and
    // r b3/6 + r^2 |psi''|^2 / 8 <= gamma_k / 2 on the radius.
    const double c0 = qic.c0();
    const double cross_radius = c0 / m;  // also caps the local radius
    std::vector<double> local_radius(s, 0.0);
    rep.local_curvature_ok = true;
    for (int k = 0; k < s; ++k) {
        double slope = 1.0;
        if (!fam.is_fourier()) {
            slope = std::min(
                1.0, std::sin(node_param[k]) + cross_radius);
        }
        const double gamma = -psi2[k].real() / 2.0 - qic.C_a * m2 * slope * slope;
        if (!(gamma > 0.0)) {
            rep.local_curvature_ok = false;
            continue;
        }
        const double a2 = std::norm(psi2[k]) / 8.0;
        const double a1 = b3 / 6.0;
        // largest r with a1 r + a2 r^2 <= gamma/2
        double r = (a2 > 0.0)
                       ? (-a1 + std::sqrt(a1 * a1 + 2.0 * a2 * gamma)) /
                             (2.0 * a2)
                       : gamma / (2.0 * a1);
        r = std::min(r, cross_radius);
        // keep the quadratic modulus expansion in its contractive range
        if (std::abs(psi2[k]) > 0.0) {
            r = std::min(r, std::sqrt(1.0 / std::abs(psi2[k])));
        }
        if (e0[k] + r * e1[k] > kNodeBudget) {
            rep.local_curvature_ok = false;
            continue;
        }
        local_radius[k] = r;
    }

    // Outer certified scan: every cell not entirely inside a local radius.
    // |P| on a cell <= max endpoint value + h^2/8 * B2 (linear interpolation
    // remainder); the right-hand side is raised to its cell maximum.
    const auto pts = scan_points(fam, grid_size);
    const int cells = fam.is_fourier() ? grid_size : int(pts.size()) - 1;
    double margin = std::numeric_limits<double>::infinity();
    const double infl = h * h / 8.0 * b2;
    for (int g = 0; g < cells; ++g) {
        const int g2 = fam.is_fourier() ? (g + 1) % grid_size : g + 1;
        const double s_lo = fam.is_fourier() ? double(g) / grid_size
                                             : kPi * double(g) / grid_size;
        const double s_hi = s_lo + h;
        bool inside_local = false;
        for (int k = 0; k < s; ++k) {
            if (local_radius[k] <= 0.0) continue;
            const double d_lo = scan_param_distance(fam, s_lo, node_param[k]);
            const double d_hi = scan_param_distance(fam, s_hi, node_param[k]);
            if (d_lo <= local_radius[k] && d_hi <= local_radius[k]) {
                inside_local = true;
                break;
            }
        }
        if (inside_local) continue;

        const double vmax = std::max(std::abs(vals[g]), std::abs(vals[g2]));
        const double lhs_low = 1.0 - (vmax + infl);

        double rhs_up = qic.C_b;
        if (s > 0) {
            const double x1 = pts[g];
            const double x2 = pts[g2];
            const double xw = dom.distance(x1, x2);
            double dmax_s = std::numeric_limits<double>::infinity();
            for (int k = 0; k < s; ++k) {
                const double t = dom.canonical(support[k]);
                double dk = std::max(dom.distance(x1, t), dom.distance(x2, t)) +
                            xw / 2.0;
                if (dom.is_circle()) dk = std::min(dk, 0.5);
                dmax_s = std::min(dmax_s, dk);
            }
            rhs_up = std::min(qic.C_b, qic.C_a * m2 * dmax_s * dmax_s);
        }
        margin = std::min(margin, lhs_low - rhs_up);
    }
    rep.qic_margin = margin;
    rep.passed = rep.phase_residual <= kPhaseTolerance &&
                 rep.local_curvature_ok && margin >= 0.0;
    return rep;
}

int suggested_qic_grid(const MeasurementFamily& fam) {
    const int base = 192 * fam.effective_m();
    const int scaled = fam.is_fourier() ? base : int(base * kPi) + 1;
    return std::max(16 * fam.size(), scaled);
}

BipReport verify_bip(const MeasurementFamily& fam,
                     const std::vector<double>& support, double c0,
                     double C_c, int trials) {
    if (support.empty()) throw DomainError("verify_bip: empty support");
    if (c0 <= 0.0 || C_c <= 0.0) {
        throw DomainError("verify_bip: c0 and C_c must be positive");
    }
    const Domain dom = fam.domain();
    const double m = fam.effective_m();
    const double radius = c0 / m;
    for (double t : support) {
        if (!dom.contains(t)) throw DomainError("support outside the domain");
        if (!fam.is_fourier()) {
            if (1.0 - std::fabs(t) < 2.0 * radius) {
                throw DomainError(
                    "moment-case BIP check needs the support at least 2 c0/m "
                    "from the endpoints");
            }
        }
    }

    // near-set sample points
    std::vector<double> probes;
    const int per_spike = 64;
    for (double t : support) {
        const double tc = dom.canonical(t);
        for (int i = 0; i <= per_spike; ++i) {
            double x = tc - radius + 2.0 * radius * i / per_spike;
            if (dom.is_circle()) {
                x = dom.canonical(x);
            } else {
                x = std::clamp(x, -1.0, 1.0);
            }
            probes.push_back(x);
        }
    }

    BipReport rep;
    rep.trials = trials;
    SplitMix64 rng(0x5b1fULL);
    Eigen::VectorXcd a(fam.size());
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < fam.size(); ++i) {
            a[i] = fam.is_fourier()
                       ? std::complex<double>(rng.gaussian(), rng.gaussian())
                       : std::complex<double>(rng.gaussian(), 0.0);
        }
        GeneralizedPolynomial p(fam, a);
        double d2max = 0.0;
        for (double x : probes) {
            d2max = std::max(d2max, std::abs(p.eval_d2(x)));
        }
        const double sup = sup_norm_certified(p, 8 * fam.size()).lower;
        if (sup <= 0.0) continue;
        rep.worst_ratio = std::max(rep.worst_ratio, d2max / (C_c * m * m * sup));
    }
    rep.passed = rep.worst_ratio <= 1.0;
    return rep;
}

GeneralizedPolynomial build_interpolation_qj(const std::vector<double>& support,
                                             std::size_t j, int f_c) {
    if (j >= support.size()) {
        throw DomainError("build_interpolation_qj: index out of range");
    }
    const std::vector<double> all_plus(support.size(), 0.0);
    std::vector<double> flipped(support.size(), kPi);
    flipped[j] = 0.0;

    const GeneralizedPolynomial p = construct_fourier_certificate(
        support, all_plus, f_c);
    const GeneralizedPolynomial pt = construct_fourier_certificate(
        support, flipped, f_c);
    GeneralizedPolynomial q(p.family(),
                            0.5 * (p.coefficients() + pt.coefficients()));

    const Domain circle = Domain::circle();
    double resid = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
        const double target = (k == j) ? 1.0 : 0.0;
        resid = std::max(resid,
                         std::abs(q.eval(circle.canonical(support[k])) - target));
    }
    if (resid > kPhaseTolerance) {
        throw NumericalError("Q_j interpolation residual above 1e-8");
    }

    const QicConstants qic = fourier_default_qic();
    const double margin = far_bound_certified_margin(
        q, support, qic.c0(), 1.0 - qic.C_b, suggested_qic_grid(q.family()));
    if (margin < 0.0) {
        throw NumericalError("Q_j violates the far-region bound");
    }
    return q;
}

double far_bound_certified_margin(const GeneralizedPolynomial& q,
                                  const std::vector<double>& support,
                                  double c0, double bound, int grid_size) {
    const MeasurementFamily& fam = q.family();
    const Domain dom = fam.domain();
    const double radius = c0 / fam.effective_m();

    const Eigen::VectorXcd vals = values_on_scan_grid(q, grid_size);
    const auto pts = scan_points(fam, grid_size);
    const double h = (fam.is_fourier() ? 1.0 : kPi) / grid_size;
    const double l2c = q.coeff_l2();
    const double u1 = vals.cwiseAbs().maxCoeff() +
                      h * scan_derivative_bound(fam, l2c);
    const double b2 = std::min(scan_second_derivative_bound(fam, l2c),
                               scan_bernstein_factor(fam, 2) * u1);
    const double infl = h * h / 8.0 * b2;

    const int cells = fam.is_fourier() ? grid_size : int(pts.size()) - 1;
    double margin = std::numeric_limits<double>::infinity();
    for (int g = 0; g < cells; ++g) {
        const int g2 = fam.is_fourier() ? (g + 1) % grid_size : g + 1;
        const double dmin =
            std::min(distance_to_support(pts[g], support, dom),
                     distance_to_support(pts[g2], support, dom));
        if (dmin < radius) continue;  // certified region is the h-interior of F
        const double vmax = std::max(std::abs(vals[g]), std::abs(vals[g2]));
        margin = std::min(margin, bound - (vmax + infl));
    }
    return margin;
}

}  // namespace spikesolve
