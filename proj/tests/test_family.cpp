#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "spikesolve/family.hpp"
#include "spikesolve/noise.hpp"

using namespace spikesolve;
using cd = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

Eigen::VectorXcd random_coeffs(int n, SplitMix64& rng) {
    Eigen::VectorXcd a(n);
    for (int i = 0; i < n; ++i) a[i] = cd(rng.gaussian(), rng.gaussian());
    return a;
}
}  // namespace

TEST_CASE("forward moments") {
    SUBCASE("unit Dirac at 0, Fourier") {
        auto fam = MeasurementFamily::fourier(2);
        DiscreteMeasure mu(Domain::circle(), {{0.0, 1.0, 0.0}});
        auto y = forward(mu, fam);
        for (int i = 0; i < 5; ++i) {
            CHECK(std::abs(y.y[i] - cd(1.0, 0.0)) < 1e-14);
        }
    }
    SUBCASE("unit Dirac at 1, Chebyshev m=3") {
        auto fam = MeasurementFamily::chebyshev(3);
        DiscreteMeasure mu(Domain::interval(), {{1.0, 1.0, 0.0}});
        auto y = forward(mu, fam);
        CHECK(y.y[0].real() == doctest::Approx(1.0));
        for (int k = 1; k <= 3; ++k) {
            CHECK(y.y[k].real() == doctest::Approx(std::sqrt(2.0)));
            CHECK(y.y[k].imag() == doctest::Approx(0.0));
        }
    }
    SUBCASE("two opposite atoms, Fourier f_c=1") {
        auto fam = MeasurementFamily::fourier(1);
        DiscreteMeasure mu(Domain::circle(),
                           {{0.25, 1.0, 0.0}, {0.75, 1.0, 0.0}});
        auto y = forward(mu, fam);
        CHECK(std::abs(y.y[1] - cd(2.0, 0.0)) < 1e-14);  // k = 0
        CHECK(std::abs(y.y[0]) < 1e-14);                 // k = -1
        CHECK(std::abs(y.y[2]) < 1e-14);                 // k = +1
    }
    SUBCASE("domain mismatch") {
        auto fam = MeasurementFamily::chebyshev(3);
        DiscreteMeasure mu(Domain::circle(), {{0.0, 1.0, 0.0}});
        CHECK_THROWS_AS(forward(mu, fam), DomainError);
    }
    SUBCASE("linearity in the measure") {
        auto fam = MeasurementFamily::fourier(4);
        SplitMix64 rng(3);
        std::vector<Atom> a1{{0.12, 1.4, 0.3}, {0.55, 0.7, 2.0}};
        std::vector<Atom> a2{{0.33, 2.2, 1.1}};
        std::vector<Atom> joint = a1;
        joint.insert(joint.end(), a2.begin(), a2.end());
        auto y1 = forward(DiscreteMeasure(Domain::circle(), a1), fam);
        auto y2 = forward(DiscreteMeasure(Domain::circle(), a2), fam);
        auto ys = forward(DiscreteMeasure(Domain::circle(), joint), fam);
        CHECK((ys.y - y1.y - y2.y).norm() < 1e-12);
    }
}

TEST_CASE("generalized polynomial evaluation") {
    SUBCASE("Dirichlet peak") {
        const int fc = 7;
        auto fam = MeasurementFamily::fourier(fc);
        GeneralizedPolynomial p(fam, Eigen::VectorXcd::Ones(fam.size()));
        CHECK(p.eval(0.0).real() == doctest::Approx(2.0 * fc + 1.0));
        CHECK(std::abs(p.eval(0.0).imag()) < 1e-13);
    }
    SUBCASE("derivative of |P|^2 vanishes at an interior maximizer") {
        const int fc = 7;
        auto fam = MeasurementFamily::fourier(fc);
        const double x0 = 0.371;
        Eigen::VectorXcd a(fam.size());
        for (int i = 0; i < fam.size(); ++i) {
            a[i] = std::polar(1.0, 2.0 * kPi * fam.index(i) * x0);
        }
        GeneralizedPolynomial p(fam, a);  // translated Dirichlet, peak at x0
        const cd val = p.eval(x0);
        const cd der = p.eval_d1(x0);
        CHECK(std::abs(val) == doctest::Approx(2.0 * fc + 1.0));
        CHECK(std::abs(std::real(std::conj(val) * der)) < 1e-9);
    }
    SUBCASE("finite-difference oracle, both families") {
        SplitMix64 rng(17);
        for (int rep = 0; rep < 50; ++rep) {
            auto fam = MeasurementFamily::fourier(6);
            GeneralizedPolynomial p(fam, random_coeffs(fam.size(), rng));
            const double x = rng.uniform();
            const cd d1 = p.eval_d1(x);
            CHECK(std::abs(d1 - oracles::fd1(p, x)) <=
                  1e-5 * (1.0 + std::abs(d1)));
            const cd d2 = p.eval_d2(x);
            CHECK(std::abs(d2 - oracles::fd2(p, x)) <=
                  1e-4 * (1.0 + std::abs(d2)));
        }
        for (int rep = 0; rep < 50; ++rep) {
            auto fam = MeasurementFamily::chebyshev(9);
            GeneralizedPolynomial p(fam, random_coeffs(fam.size(), rng));
            const double x = -0.95 + 1.9 * rng.uniform();
            const cd d1 = p.eval_d1(x);
            CHECK(std::abs(d1 - oracles::fd1(p, x)) <=
                  1e-5 * (1.0 + std::abs(d1)));
            const cd d2 = p.eval_d2(x);
            CHECK(std::abs(d2 - oracles::fd2(p, x)) <=
                  1e-4 * (1.0 + std::abs(d2)));
        }
    }
    SUBCASE("Chebyshev derivatives at the endpoints") {
        const int m = 8;
        auto fam = MeasurementFamily::chebyshev(m);
        for (int k = 1; k <= m; ++k) {
            Eigen::VectorXcd a = Eigen::VectorXcd::Zero(fam.size());
            a[k] = 1.0 / std::sqrt(2.0);  // P = T_k
            GeneralizedPolynomial p(fam, a);
            CHECK(p.eval_d1(1.0).real() == doctest::Approx(double(k) * k));
            const double sign = (k % 2 == 0) ? -1.0 : 1.0;
            CHECK(p.eval_d1(-1.0).real() ==
                  doctest::Approx(sign * double(k) * k));
            CHECK(p.eval_d2(1.0).real() ==
                  doctest::Approx(double(k) * k * (double(k) * k - 1.0) / 3.0));
        }
    }
}

TEST_CASE("certified sup-norm enclosure") {
    SUBCASE("zero polynomial") {
        auto fam = MeasurementFamily::fourier(4);
        auto b = sup_norm_certified(GeneralizedPolynomial::zero(fam), 64);
        CHECK(b.lower == 0.0);
        CHECK(b.upper == 0.0);
    }
    SUBCASE("constant polynomial") {
        auto fam = MeasurementFamily::fourier(3);
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(fam.size());
        a[3] = cd(0.0, 2.0);  // P = conj(a_0) phi_0 = -2i
        auto b = sup_norm_certified(GeneralizedPolynomial(fam, a), 64);
        CHECK(b.lower == doctest::Approx(2.0));
        CHECK(b.upper <= 2.0 + 1.0);
        CHECK(b.upper >= b.lower);
    }
    SUBCASE("Dirichlet kernel, f_c=16, grid 4096") {
        auto fam = MeasurementFamily::fourier(16);
        GeneralizedPolynomial p(fam, Eigen::VectorXcd::Ones(fam.size()));
        auto b = sup_norm_certified(p, 4096);
        CHECK(b.lower >= 32.9);
        CHECK(b.lower <= 33.0);
        CHECK(b.upper - b.lower <= 0.5);
        CHECK(b.upper >= 33.0);  // encloses the true sup
    }
    SUBCASE("grid too coarse") {
        auto fam = MeasurementFamily::fourier(16);
        GeneralizedPolynomial p(fam, Eigen::VectorXcd::Ones(fam.size()));
        CHECK_THROWS_AS(sup_norm_certified(p, 2 * fam.size()), DomainError);
    }
    SUBCASE("enclosure property on random polynomials") {
        // dense_sup lower-bounds the true sup on a much finer grid than the
        // certified scan, so it must sit inside [lower - slack, upper]
        SplitMix64 rng(23);
        for (auto fam : {MeasurementFamily::fourier(5),
                         MeasurementFamily::chebyshev(7)}) {
            for (int rep = 0; rep < 10; ++rep) {
                GeneralizedPolynomial p(fam, random_coeffs(fam.size(), rng));
                auto b = sup_norm_certified(p, 16 * fam.size());
                const double dense = oracles::dense_sup(p, 200001);
                CHECK(dense <= b.upper + 1e-12);
                CHECK(b.lower <= dense * (1.0 + 1e-6) + 1e-9);
                CHECK(b.lower <= b.upper);
            }
        }
    }
}

TEST_CASE("Bernstein constants") {
    CHECK(bernstein_fourier_constant() == doctest::Approx(kPi * kPi));

    const double c0 = 0.05;
    CHECK(bernstein_chebyshev_constant(std::sqrt(1.0 - c0 * c0)) ==
          doctest::Approx(4.0 / (1.0 - c0 * c0)));
    CHECK_THROWS_AS(bernstein_chebyshev_constant(0.0), DomainError);

    CHECK(bernstein_laplace_bound({1.0, 0.5, 0.3, 0.2}) ==
          doctest::Approx(324.0));

    CHECK(bernstein_muntz1_bound(3.0, 0.5) == doctest::Approx(12.0));
    CHECK(bernstein_muntz2_bound({1.5, 2.5}, 1.0) ==
          doctest::Approx(81.0 * 4.0 * 5.0));
    CHECK_THROWS_AS(bernstein_muntz2_bound({0.5, 2.0}, 1.0), DomainError);

    BernsteinQuery q;
    q.family = BernsteinQuery::Family::Laplace;
    q.parameters = {1.0, 1.0};
    CHECK(bernstein_constant(q) == doctest::Approx(324.0));
}

TEST_CASE("empirical Bernstein check") {
    SplitMix64 rng(31);
    SUBCASE("Fourier") {
        auto fam = MeasurementFamily::fourier(8);
        const double m2 = double(fam.effective_m()) * fam.effective_m();
        const double cc = bernstein_fourier_constant();
        for (int rep = 0; rep < 100; ++rep) {
            GeneralizedPolynomial p(fam, random_coeffs(fam.size(), rng));
            double d2max = 0.0;
            for (int g = 0; g < 600; ++g) {
                d2max = std::max(d2max, std::abs(p.eval_d2(g / 600.0)));
            }
            const double sup = sup_norm_certified(p, 8 * fam.size()).lower;
            CHECK(d2max <= cc * m2 * sup * (1.0 + 1e-9));
        }
    }
    SUBCASE("Chebyshev on a region away from the endpoints") {
        auto fam = MeasurementFamily::chebyshev(12);
        const double m2 = double(fam.effective_m()) * fam.effective_m();
        const double xcap = 0.9;
        const double cc =
            bernstein_chebyshev_constant(std::sqrt(1.0 - xcap * xcap));
        for (int rep = 0; rep < 100; ++rep) {
            GeneralizedPolynomial p(fam, random_coeffs(fam.size(), rng));
            double d2max = 0.0;
            for (int g = 0; g <= 500; ++g) {
                const double x = -xcap + 2.0 * xcap * g / 500.0;
                d2max = std::max(d2max, std::abs(p.eval_d2(x)));
            }
            const double sup = sup_norm_certified(p, 8 * fam.size()).lower;
            CHECK(d2max <= cc * m2 * sup * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("orthonormality and Parseval") {
    SplitMix64 rng(37);
    for (auto fam : {MeasurementFamily::fourier(4),
                     MeasurementFamily::fourier(16),
                     MeasurementFamily::chebyshev(8),
                     MeasurementFamily::chebyshev(33)}) {
        // Gram matrix under the quadrature is the identity
        const auto rule = orthonormality_quadrature(fam);
        const int n = fam.size();
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
        Eigen::VectorXcd row;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            fam.basis_row(rule.nodes[j], row);
            gram += rule.weights[j] * row * row.adjoint();
        }
        const double resid =
            (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
        CHECK(resid <= 1e-10);

        // Parseval: ||a||_2^2 = integral |P|^2 dPi
        for (int rep = 0; rep < 5; ++rep) {
            GeneralizedPolynomial p(fam, random_coeffs(n, rng));
            const double lhs = p.coeff_l2() * p.coeff_l2();
            const double rhs = squared_l2_norm_by_quadrature(p);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + lhs));
        }
    }
}
