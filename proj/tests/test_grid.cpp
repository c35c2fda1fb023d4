#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corrband/grid.hpp"

#include <random>

using namespace corrband;

TEST_CASE("mesh layout") {
    const Mesh m = Mesh::make(-1.0, 1.0, 0.0, 3.0, 21, 31);
    CHECK(m.h1 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m.h2 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m.x1(1) == -1.0);
    CHECK(m.x1(21) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.x2(31) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS(Mesh::make(0, 1, 0, 1, 2, 5));
    CHECK_THROWS(Mesh::make(1, 0, 0, 1, 5, 5));
}

TEST_CASE("difference operators") {
    const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 11, 11);

    SUBCASE("bilinear gives exact mixed derivatives") {
        const Field f = Field::from_function(m, [](double a, double b) { return a * b; });
        for (Index i = 2; i <= 10; ++i)
            for (Index j = 2; j <= 10; ++j) {
                CHECK(diff(f, nullptr, i, j, DiffKind::MixedMinus) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(diff(f, nullptr, i, j, DiffKind::MixedPlus) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(diff(f, nullptr, i, j, DiffKind::MixedCentral) == doctest::Approx(1.0).epsilon(1e-12));
            }
    }

    SUBCASE("constants vanish under every stencil") {
        const Field f = Field::constant(m, 4.25);
        for (DiffKind k : {DiffKind::Backward1, DiffKind::Forward1, DiffKind::Central1,
                           DiffKind::Second, DiffKind::MixedMinus, DiffKind::MixedPlus,
                           DiffKind::MixedCentral})
            CHECK(diff(f, nullptr, 5, 5, k, Axis::X1) == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("mixed central on x^2 y^2 near (1,1)") {
        const Mesh fine = Mesh::make(0.5, 1.5, 0.5, 1.5, 11, 11);  // h = 0.1, node 6 at 1.0
        const Field f =
            Field::from_function(fine, [](double a, double b) { return a * a * b * b; });
        const double v = diff(f, nullptr, 6, 6, DiffKind::MixedCentral);
        CHECK(std::abs(v - 4.0) <= 0.05);
    }

    SUBCASE("out of range without ghosts throws") {
        const Field f = Field::constant(m, 1.0);
        CHECK_THROWS(diff(f, nullptr, 1, 5, DiffKind::Backward1, Axis::X1));
        CHECK_THROWS(diff(f, nullptr, 11, 5, DiffKind::Forward1, Axis::X1));
    }

    SUBCASE("linearity on random fields") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        Field u{m, ArrayXX(m.n1, m.n2)}, v{m, ArrayXX(m.n1, m.n2)}, w{m, ArrayXX(m.n1, m.n2)};
        const double alpha = 1.7, beta = -0.4;
        for (Index j = 0; j < m.n2; ++j)
            for (Index i = 0; i < m.n1; ++i) {
                u.values(i, j) = U(gen);
                v.values(i, j) = U(gen);
                w.values(i, j) = alpha * u.values(i, j) + beta * v.values(i, j);
            }
        for (DiffKind k : {DiffKind::Second, DiffKind::MixedMinus, DiffKind::MixedPlus,
                           DiffKind::MixedCentral}) {
            const double lhs = diff(w, nullptr, 6, 6, k, Axis::X2);
            const double rhs = alpha * diff(u, nullptr, 6, 6, k, Axis::X2) +
                               beta * diff(v, nullptr, 6, 6, k, Axis::X2);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }

    SUBCASE("mixed central is the average of the one-sided pairs") {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            Field u{m, ArrayXX(m.n1, m.n2)};
            for (Index j = 0; j < m.n2; ++j)
                for (Index i = 0; i < m.n1; ++i) u.values(i, j) = U(gen);
            for (Index i = 2; i <= 10; ++i)
                for (Index j = 2; j <= 10; ++j) {
                    const double c = diff(u, nullptr, i, j, DiffKind::MixedCentral);
                    const double avg = 0.5 * (diff(u, nullptr, i, j, DiffKind::MixedMinus) +
                                              diff(u, nullptr, i, j, DiffKind::MixedPlus));
                    CHECK(std::abs(c - avg) <= 1e-13 * std::max(1.0, std::abs(c)));
                }
        }
    }
}

TEST_CASE("ghost extrapolation") {
    SUBCASE("three-point formula") {
        const Mesh m = Mesh::make(0.0, 1.0, 0.0, 1.0, 3, 3);
        Field f = Field::constant(m, 0.0);
        f.at(1, 1) = 1.0;
        f.at(2, 1) = 2.0;
        f.at(3, 1) = 4.0;
        const GhostFrame g = extrapolate_ghost(f);
        CHECK(g.west_at(1) == doctest::Approx(3.0 - 6.0 + 4.0));
    }

    SUBCASE("linear fields continue exactly") {
        const Mesh m = Mesh::make(0.0, 1.0, 0.0, 2.0, 9, 7);
        const Field f =
            Field::from_function(m, [](double a, double b) { return 2.0 * a - 3.0 * b + 0.5; });
        const GhostFrame g = extrapolate_ghost(f);
        for (Index j = 1; j <= m.n2; ++j) {
            CHECK(g.west_at(j) ==
                  doctest::Approx(2.0 * (m.x1_min - m.h1) - 3.0 * m.x2(j) + 0.5).epsilon(1e-13));
            CHECK(g.east_at(j) ==
                  doctest::Approx(2.0 * (m.x1_max + m.h1) - 3.0 * m.x2(j) + 0.5).epsilon(1e-13));
        }
    }

    SUBCASE("quadratics are reproduced to rounding") {
        const Mesh m = Mesh::make(-1.0, 1.0, -1.0, 1.0, 15, 15);
        auto quad = [](double a, double b) { return 1.0 + a + 0.5 * b + a * a - 0.3 * b * b; };
        const Field f = Field::from_function(m, quad);
        const GhostFrame g = extrapolate_ghost(f);
        for (Index i = 1; i <= m.n1; ++i) {
            const double lo = quad(m.x1(i), m.x2_min - m.h2);
            const double hi = quad(m.x1(i), m.x2_max + m.h2);
            CHECK(std::abs(g.south_at(i) - lo) <= 1e-12 * std::max(1.0, std::abs(lo)));
            CHECK(std::abs(g.north_at(i) - hi) <= 1e-12 * std::max(1.0, std::abs(hi)));
        }
    }
}
