#include <doctest.h>

#include <cmath>

#include "spikesolve/noise.hpp"

using namespace spikesolve;

TEST_CASE("polynomial-case Rice tail bound") {
    // regime boundary u = sqrt(1+2m) is excluded
    auto tb = rice_poly_tail(12, 5.0);
    CHECK_FALSE(tb.regime_valid);
    CHECK(tb.probability_bound == 1.0);

    tb = rice_poly_tail(12, 20.0);
    CHECK(tb.regime_valid);
    CHECK(tb.probability_bound ==
          doctest::Approx(4.5254199541697894e-05).epsilon(1e-12));

    // m=100, u=30: raw value 56.2 clamps to 1
    tb = rice_poly_tail(100, 30.0);
    CHECK(tb.regime_valid);
    CHECK(tb.probability_bound == 1.0);

    // m below 12 is outside the stated regime
    CHECK_FALSE(rice_poly_tail(8, 100.0).regime_valid);

    CHECK_THROWS_AS(rice_poly_tail(12, 0.0), DomainError);
    CHECK_THROWS_AS(rice_poly_tail(12, -1.0), DomainError);
}

TEST_CASE("Fourier-case Rice tail bound") {
    CHECK_FALSE(rice_fourier_tail(4, 1.0).regime_valid);

    auto tb = rice_fourier_tail(1, 10.0);
    CHECK(tb.regime_valid);
    CHECK(tb.probability_bound ==
          doctest::Approx(7.852745325644604e-04).epsilon(1e-12));

    const double lf = lambda_fourier(128, 1.0);
    tb = rice_fourier_tail(128, lf);
    CHECK(tb.probability_bound ==
          doctest::Approx(1.4975008573328677e-04).epsilon(1e-12));

    CHECK_THROWS_AS(rice_fourier_tail(0, 3.0), DomainError);
}

TEST_CASE("tail bounds decrease on their valid regime") {
    double prev = 2.0;
    for (double u = 6.0; u < 40.0; u += 1.0) {
        auto tb = rice_poly_tail(12, u);
        CHECK(tb.regime_valid);
        CHECK(tb.probability_bound <= prev);
        prev = tb.probability_bound;
    }
    prev = 2.0;
    for (double u = 1.5; u < 40.0; u += 0.5) {
        auto tb = rice_fourier_tail(16, u);
        CHECK(tb.regime_valid);
        CHECK(tb.probability_bound <= prev);
        prev = tb.probability_bound;
    }
}

TEST_CASE("regularization level rules") {
    CHECK(lambda_fourier(128, 1.0) ==
          doctest::Approx(122.08782482606964).epsilon(1e-14));
    CHECK(lambda_fourier(128, 2.0) ==
          doctest::Approx(2.0 * 122.08782482606964).epsilon(1e-14));
    CHECK(lambda_fourier(4, 1.0) > lambda_fourier(3, 1.0));
    CHECK_THROWS_AS(lambda_fourier(1, 1.0), DomainError);

    CHECK(lambda_moment(9, 1.0) ==
          doctest::Approx(10.892663915505512).epsilon(1e-14));
    CHECK(lambda_moment(100, 1.0) ==
          doctest::Approx(52.565217697569324).epsilon(1e-14));
    CHECK(lambda_moment(100, 0.5) ==
          doctest::Approx(0.5 * 52.565217697569324).epsilon(1e-14));
    CHECK_THROWS_AS(lambda_moment(8, 1.0), DomainError);

    // strictly increasing in both arguments
    CHECK(lambda_fourier(64, 1.0) < lambda_fourier(65, 1.0));
    CHECK(lambda_moment(20, 1.0) < lambda_moment(21, 1.0));
}

TEST_CASE("failure probability bounds") {
    const double lf = lambda_fourier(128, 1.0);
    CHECK(failure_probability_fourier(128, 1.0, lf) ==
          doctest::Approx(1.0 / 64.0).epsilon(1e-13));
    CHECK(failure_probability_fourier(128, 1.0, 2.0 * lf) ==
          doctest::Approx(7.450580596923828e-09).epsilon(1e-10));
    CHECK_THROWS_AS(failure_probability_fourier(128, 1.0, 0.9 * lf),
                    DomainError);

    const double lm = lambda_moment(100, 1.0);
    CHECK(failure_probability_moment(100, 1.0, lm) ==
          doctest::Approx(0.16776390254452833).epsilon(1e-12));

    double prev = 1.0;
    for (double mult = 1.0; mult < 3.0; mult += 0.25) {
        const double p = failure_probability_fourier(128, 1.0, mult * lf);
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("noise sampling") {
    auto fam = MeasurementFamily::fourier(64);

    SUBCASE("sigma 0 gives the zero vector") {
        auto eps = sample_noise({NoiseKind::ComplexGaussian, 0.0, 5}, fam);
        CHECK(eps.y.norm() == 0.0);
    }
    SUBCASE("determinism") {
        auto e1 = sample_noise({NoiseKind::ComplexGaussian, 1.0, 42}, fam);
        auto e2 = sample_noise({NoiseKind::ComplexGaussian, 1.0, 42}, fam);
        CHECK((e1.y - e2.y).norm() == 0.0);
        auto e3 = sample_noise({NoiseKind::ComplexGaussian, 1.0, 43}, fam);
        CHECK((e1.y - e3.y).norm() > 0.0);
    }
    SUBCASE("kind mismatch") {
        CHECK_THROWS_AS(
            sample_noise({NoiseKind::RealGaussian, 1.0, 1}, fam),
            DomainError);
        CHECK_THROWS_AS(sample_noise({NoiseKind::ComplexGaussian, 1.0, 1},
                                     MeasurementFamily::chebyshev(5)),
                        DomainError);
    }
    SUBCASE("real-part variance across 10^4 substreams") {
        const int draws = 10000;
        const int n = fam.size();
        std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
        for (int t = 0; t < draws; ++t) {
            NoiseModel model{NoiseKind::ComplexGaussian, 1.0,
                             std::uint64_t(900) ^ std::uint64_t(t)};
            auto eps = sample_noise(model, fam);
            for (int k = 0; k < n; ++k) {
                const double re = eps.y[k].real();
                sum[k] += re;
                sumsq[k] += re * re;
            }
        }
        for (int k = 0; k < n; ++k) {
            const double mean = sum[k] / draws;
            const double var = sumsq[k] / draws - mean * mean;
            CHECK(var >= 0.95);
            CHECK(var <= 1.05);
        }
    }
}

TEST_CASE("Monte Carlo sup tail") {
    auto fam = MeasurementFamily::fourier(8);

    SUBCASE("sigma 0 never exceeds positive thresholds") {
        auto pts = monte_carlo_sup_tail(fam,
                                        {NoiseKind::ComplexGaussian, 0.0, 3},
                                        {0.5, 1.0, 5.0}, 100, 8 * fam.size());
        for (const auto& p : pts) CHECK(p.exceedance == 0.0);
    }
    SUBCASE("deterministic given the seed") {
        NoiseModel model{NoiseKind::ComplexGaussian, 1.0, 77};
        auto a = monte_carlo_sup_tail(fam, model, {8.0}, 200, 8 * fam.size());
        auto b = monte_carlo_sup_tail(fam, model, {8.0}, 200, 8 * fam.size());
        CHECK(a[0].exceedance == b[0].exceedance);
    }
    SUBCASE("closed-form bound dominates the empirical tail") {
        NoiseModel model{NoiseKind::ComplexGaussian, 1.0, 2024};
        std::vector<double> us;
        for (double mult : {1.2, 1.6, 2.0}) {
            us.push_back(mult * std::sqrt(2.0 * (2.0 * 8 + 1.0)));
        }
        auto pts = monte_carlo_sup_tail(fam, model, us, 400, 8 * fam.size());
        for (const auto& p : pts) {
            CHECK(p.regime_valid);
            const double half = (p.wilson_high - p.wilson_low) / 2.0;
            CHECK(p.exceedance <= p.analytic_bound + half);
        }
    }
    SUBCASE("preconditions") {
        NoiseModel model{NoiseKind::ComplexGaussian, 1.0, 1};
        CHECK_THROWS_AS(monte_carlo_sup_tail(fam, model, {3.0}, 50, 200),
                        DomainError);
        CHECK_THROWS_AS(monte_carlo_sup_tail(fam, model, {3.0}, 200, 16),
                        DomainError);
    }
}

TEST_CASE("Wilson interval") {
    double lo = 0.0, hi = 0.0;
    wilson_interval(0, 100, lo, hi);
    CHECK(lo == 0.0);
    CHECK(hi > 0.0);
    CHECK(hi < 0.05);
    wilson_interval(50, 100, lo, hi);
    CHECK(lo == doctest::Approx(0.4038315).epsilon(1e-4));
    CHECK(hi == doctest::Approx(0.5961685).epsilon(1e-4));
}
