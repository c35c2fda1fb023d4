#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corrband/limiter.hpp"

#include <random>

using namespace corrband;

TEST_CASE("van Leer limiter pointwise") {
    CHECK(van_leer_phi(-2.0) == 0.0);
    CHECK(van_leer_phi(1.0) == doctest::Approx(1.0));
    CHECK(van_leer_phi(3.0) == doctest::Approx(1.5));
    CHECK(van_leer_phi(0.0) == 0.0);
}

TEST_CASE("van Leer limiter properties") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> wide(-50.0, 50.0);
    std::uniform_real_distribution<double> pos(1e-8, 50.0);
    for (int k = 0; k < 100000; ++k) {
        const double t = wide(gen);
        const double p = van_leer_phi(t);
        if (t <= 0.0) CHECK(p == 0.0);
        if (t > 0.0) {
            CHECK(p >= 0.0);
            CHECK(p <= 2.0 * std::min(1.0, t) + 1e-15);
        }
        const double tp = pos(gen);
        const double sym = van_leer_phi(tp) - tp * van_leer_phi(1.0 / tp);
        CHECK(std::abs(sym) <= 1e-13);
        const double a = wide(gen), b = wide(gen);
        CHECK(std::abs(van_leer_phi(a) - van_leer_phi(b)) <= 2.0 * std::abs(a - b) + 1e-15);
    }
}

namespace {

Field random_field(const Mesh& m, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Field f{m, ArrayXX(m.n1, m.n2)};
    for (Index j = 0; j < m.n2; ++j)
        for (Index i = 0; i < m.n1; ++i) f.values(i, j) = U(gen);
    return f;
}

}  // namespace

TEST_CASE("gradient ratios") {
    const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 5, 5);
    const RatioConfig cfg;

    SUBCASE("ratio of slopes") {
        // u(x1) with backward slope 1 and forward slope 2 at node 3
        Field f = Field::constant(m, 0.0);
        for (Index j = 1; j <= 5; ++j) {
            f.at(2, j) = 0.0;
            f.at(3, j) = 0.25;       // backward slope 1
            f.at(4, j) = 0.25 + 0.5; // forward slope 2
        }
        const GhostFrame g = extrapolate_ghost(f);
        CHECK(gradient_ratio(f, g, 3, 3, Axis::X1, cfg) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("uniform field gives theta = 1") {
        const Field f = Field::constant(m, 3.0);
        const GhostFrame g = extrapolate_ghost(f);
        CHECK(gradient_ratio(f, g, 3, 3, Axis::X1, cfg) == doctest::Approx(1.0));
        CHECK(gradient_ratio(f, g, 3, 3, Axis::X2, cfg) == doctest::Approx(1.0));
    }

    SUBCASE("local extremum gives a non-positive ratio and Phi = 0") {
        Field f = Field::constant(m, 0.0);
        for (Index j = 1; j <= 5; ++j) {
            f.at(2, j) = 0.0;
            f.at(3, j) = 0.25;   // up
            f.at(4, j) = 0.0;    // down
        }
        const GhostFrame g = extrapolate_ghost(f);
        const double theta = gradient_ratio(f, g, 3, 3, Axis::X1, cfg);
        CHECK(theta == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(van_leer_phi(theta) == 0.0);
    }
}

TEST_CASE("limiter factors") {
    const RatioConfig cfg;

    SUBCASE("linear field gives unit factors") {
        const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 9, 9);
        const Field f =
            Field::from_function(m, [](double a, double b) { return 3.0 * a - 2.0 * b + 1.0; });
        const GhostFrame g = extrapolate_ghost(f);
        for (Index i = 2; i <= 8; ++i)
            for (Index j = 2; j <= 8; ++j) {
                const LimiterFactors lf = lambda_factors(f, g, i, j, cfg);
                CHECK(lf.l1_pos == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(lf.l1_neg == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(lf.l2_pos == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(lf.l2_neg == doctest::Approx(1.0).epsilon(1e-12));
            }
    }

    SUBCASE("local maximum: opposed slopes drop the limited correction") {
        const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 7, 7);
        Field f = Field::constant(m, 0.0);
        for (Index j = 1; j <= 7; ++j) f.at(4, j) = 1.0;  // ridge along x2
        const GhostFrame g = extrapolate_ghost(f);
        // At the peak both one-sided ratios are negative, so the Phi terms of
        // Lambda1 vanish and the factors are exactly 1.
        const LimiterFactors lf = lambda_factors(f, g, 4, 4, cfg);
        CHECK(lf.l1_pos == doctest::Approx(1.0));
        CHECK(lf.l1_neg == doctest::Approx(1.0));
    }

    SUBCASE("factors stay inside [0,2] on random fields") {
        std::mt19937_64 gen(99);
        const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 12, 9);
        for (int rep = 0; rep < 1000; ++rep) {
            const Field f = random_field(m, gen);
            const GhostFrame g = extrapolate_ghost(f);
            for (Index i = 1; i <= m.n1; ++i)
                for (Index j = 1; j <= m.n2; ++j) {
                    const LimiterFactors lf = lambda_factors(f, g, i, j, cfg);
                    for (double v : {lf.l1_pos, lf.l1_neg, lf.l2_pos, lf.l2_neg}) {
                        CHECK(v >= 0.0);
                        CHECK(v <= 2.0);
                    }
                }
        }
    }
}

TEST_CASE("explicit convection") {
    const RatioConfig cfg;
    const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 9, 9);

    SUBCASE("constant field gives zero") {
        const Field f = Field::constant(m, 2.0);
        const GhostFrame g = extrapolate_ghost(f);
        DriftPair d;
        d.a1_pos = 0.3;
        d.a2_neg = 0.7;
        CHECK(explicit_convection(f, g, 5, 5, d, cfg) == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("vanishing drift in the varying direction") {
        const Field f = Field::from_function(m, [](double, double b) { return b * b; });
        const GhostFrame g = extrapolate_ghost(f);
        DriftPair d;  // A2 = 0, field varies only in x2
        d.a1_pos = 0.5;
        CHECK(explicit_convection(f, g, 5, 5, d, cfg) == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("linear field recovers A1 exactly") {
        const Field f = Field::from_function(m, [](double a, double) { return a; });
        const GhostFrame g = extrapolate_ghost(f);
        DriftPair d;
        d.a1_pos = 0.37;
        for (Index i = 2; i <= 8; ++i)
            CHECK(explicit_convection(f, g, i, 5, d, cfg) == doctest::Approx(0.37).epsilon(1e-12));
        // second-order consistency: the limited slope equals the true
        // directional derivative times the drift on globally linear data
        DriftPair dn;
        dn.a1_neg = 0.21;
        for (Index i = 2; i <= 8; ++i)
            CHECK(explicit_convection(f, g, i, 5, dn, cfg) == doctest::Approx(-0.21).epsilon(1e-12));
    }
}
