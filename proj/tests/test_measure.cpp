#include <doctest.h>

#include <cmath>

#include "spikesolve/measure.hpp"
#include "spikesolve/noise.hpp"

using namespace spikesolve;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_CASE("tv_norm of discrete measures") {
    const Domain circle = Domain::circle();
    CHECK(tv_norm(DiscreteMeasure(circle)) == 0.0);

    DiscreteMeasure mu(circle, {{0.3, 1.0, 0.0}, {0.7, 2.5, kPi / 3.0}});
    CHECK(tv_norm(mu) == doctest::Approx(3.5).epsilon(1e-15));

    DiscreteMeasure dirac(circle, {{0.5, 1.0, 0.0}});
    CHECK(tv_norm(dirac) == doctest::Approx(1.0));
}

TEST_CASE("construction canonicalizes polar form") {
    const Domain circle = Domain::circle();
    // zero-amplitude atoms are dropped
    DiscreteMeasure mu(circle, {{0.1, 0.0, 1.0}, {0.2, 1.0, 0.0}});
    CHECK(mu.size() == 1);

    // negative amplitude folds into the phase
    DiscreteMeasure neg(circle, {{0.1, -2.0, 0.0}});
    CHECK(neg.atoms()[0].amplitude == doctest::Approx(2.0));
    CHECK(neg.atoms()[0].phase == doctest::Approx(kPi));

    // phases land in [0, 2 pi)
    DiscreteMeasure ph(circle, {{0.1, 1.0, -kPi / 2.0}});
    CHECK(ph.atoms()[0].phase == doctest::Approx(1.5 * kPi));

    // pairwise-distinct invariant: near-coincident atoms are rejected
    CHECK_THROWS_AS(
        DiscreteMeasure(circle, {{0.5, 1.0, 0.0}, {0.5 + 1e-13, 1.0, 0.0}}),
        DomainError);

    // circle locations wrap
    DiscreteMeasure wrapped(circle, {{1.25, 1.0, 0.0}});
    CHECK(wrapped.atoms()[0].t == doctest::Approx(0.25));

    CHECK_THROWS_AS(DiscreteMeasure(Domain::interval(), {{1.5, 1.0, 0.0}}),
                    DomainError);
}

TEST_CASE("tv_norm scaling and disjoint additivity") {
    const Domain circle = Domain::circle();
    SplitMix64 rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Atom> a1, a2;
        for (int i = 0; i < 4; ++i) {
            a1.push_back({rng.uniform() * 0.45, rng.uniform_pos(),
                          rng.uniform() * 2 * kPi});
            a2.push_back({0.5 + rng.uniform() * 0.45, rng.uniform_pos(),
                          rng.uniform() * 2 * kPi});
        }
        DiscreteMeasure m1(circle, a1), m2(circle, a2);
        const double c = 0.25 + rng.uniform() * 4.0;
        std::vector<Atom> scaled = a1;
        for (Atom& a : scaled) a.amplitude *= c;
        CHECK(tv_norm(DiscreteMeasure(circle, scaled)) ==
              doctest::Approx(c * tv_norm(m1)).epsilon(1e-12));
        std::vector<Atom> joint = a1;
        joint.insert(joint.end(), a2.begin(), a2.end());
        CHECK(tv_norm(DiscreteMeasure(circle, joint)) ==
              doctest::Approx(tv_norm(m1) + tv_norm(m2)).epsilon(1e-12));
    }
}

TEST_CASE("min_separation") {
    const Domain circle = Domain::circle();
    const Domain interval = Domain::interval();

    CHECK(min_separation({1.0 / 6.0, 5.0 / 6.0}, circle) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(min_separation({0.0, 0.5}, circle) == doctest::Approx(0.5));
    CHECK(min_separation({-0.5, 0.0, 0.9}, interval) == doctest::Approx(0.5));
    CHECK_THROWS_AS(min_separation({0.3}, circle), DomainError);

    // invariance under relabeling and common rotation on the circle
    SplitMix64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(rng.uniform());
        const double base = min_separation(pts, circle);
        std::vector<double> rev(pts.rbegin(), pts.rend());
        CHECK(min_separation(rev, circle) == doctest::Approx(base));
        const double shift = rng.uniform();
        std::vector<double> rot;
        for (double p : pts) rot.push_back(std::fmod(p + shift, 1.0));
        CHECK(min_separation(rot, circle) ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("partition_near_far") {
    const Domain circle = Domain::circle();
    const std::vector<double> support{0.5};
    const double c0 = 0.3313;
    const int m = 256;

    // boundary is inclusive (ties assigned to near)
    auto part = partition_near_far({0.5 + c0 / m}, support, c0, m, circle);
    CHECK(part.near_indices.size() == 1);
    CHECK(part.far_indices.empty());

    part = partition_near_far({0.9}, support, c0, m, circle);
    CHECK(part.far_indices.size() == 1);

    // wrap-around distance decides membership
    part = partition_near_far({0.99}, {0.2, 0.8}, 1.0, 10, circle);
    CHECK(part.far_indices.size() == 1);  // d = 0.19 > 0.1

    CHECK_THROWS_AS(partition_near_far({0.1}, {}, 1.0, 10, circle),
                    DomainError);

    // monotonicity: growing c0 never moves a point from near to far,
    // and {near, far} is always a partition of the queried points
    SplitMix64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> pts, sup;
        for (int i = 0; i < 12; ++i) pts.push_back(rng.uniform());
        for (int i = 0; i < 3; ++i) sup.push_back(rng.uniform());
        const double c_small = 0.1 + rng.uniform();
        const double c_big = c_small + rng.uniform();
        auto a = partition_near_far(pts, sup, c_small, 16, circle);
        auto b = partition_near_far(pts, sup, c_big, 16, circle);
        CHECK(a.near_indices.size() + a.far_indices.size() == pts.size());
        for (std::size_t idx : a.near_indices) {
            CHECK(std::find(b.near_indices.begin(), b.near_indices.end(),
                            idx) != b.near_indices.end());
        }
    }
}
