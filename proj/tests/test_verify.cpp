#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corrband/verify.hpp"

#include <random>

using namespace corrband;

namespace {

MarketParams reference_params() {
    MarketParams p;
    p.sigma1 = p.sigma2 = 0.2;
    p.r = 0.0953102;
    p.d1 = 0.0487902;
    p.d2 = 0.0;
    return p;
}

}  // namespace

TEST_CASE("manufactured solution values") {
    CHECK(mms_exact(0.0, 0.0, 0.0) == 1.0);
    CHECK(mms_exact(1.5, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mms_exact(1.0, 1.0, 0.5) == doctest::Approx(std::exp(-0.25) / 4.0).epsilon(1e-14));
}

TEST_CASE("residual degenerates to the bare time derivative") {
    MarketParams p;
    p.sigma1 = p.sigma2 = 0.0;
    p.r = 0.0;
    p.d1 = p.d2 = 0.0;  // then A1 = A2 = 0 as well
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double x1 = U(gen), x2 = U(gen), tau = std::abs(U(gen));
        CHECK(mms_residual(x1, x2, tau, p, band) ==
              doctest::Approx(-0.5 * mms_exact(x1, x2, tau)).epsilon(1e-13));
    }
}

TEST_CASE("hand derivatives agree with finite differences of the exact solution") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const DriftPair drift = drift_coefficients(p);
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    std::uniform_real_distribution<double> Ut(0.0, 2.0);
    const double h = 1e-5;
    int checked = 0;
    for (int k = 0; checked < 1000; ++k) {
        const double x1 = U(gen), x2 = U(gen), tau = 0.01 + Ut(gen);
        const double cross = mms_cross_gamma(x1, x2, tau);
        // skip the switching locus where the residual is one-sided
        if (std::abs(cross) < 1e-3) continue;
        ++checked;
        auto u = [&](double a, double b, double t) { return mms_exact(a, b, t); };
        const double u_tau = (u(x1, x2, tau + h) - u(x1, x2, tau - h)) / (2 * h);
        const double u_11 = (u(x1 + h, x2, tau) - 2 * u(x1, x2, tau) + u(x1 - h, x2, tau)) / (h * h);
        const double u_22 = (u(x1, x2 + h, tau) - 2 * u(x1, x2, tau) + u(x1, x2 - h, tau)) / (h * h);
        const double u_12 = (u(x1 + h, x2 + h, tau) - u(x1 + h, x2 - h, tau) -
                             u(x1 - h, x2 + h, tau) + u(x1 - h, x2 - h, tau)) /
                            (4 * h * h);
        const double u_1 = (u(x1 + h, x2, tau) - u(x1 - h, x2, tau)) / (2 * h);
        const double u_2 = (u(x1, x2 + h, tau) - u(x1, x2 - h, tau)) / (2 * h);
        const double rho = select_rho(sign_class(u_12), band).value();
        const double fd = u_tau - 0.5 * p.sigma1 * p.sigma1 * u_11 -
                          0.5 * p.sigma2 * p.sigma2 * u_22 - rho * p.sigma1 * p.sigma2 * u_12 -
                          drift.a1() * u_1 - drift.a2() * u_2 + p.r * u(x1, x2, tau);
        CHECK(std::abs(mms_residual(x1, x2, tau, p, band) - fd) <= 1e-6);
    }
}

TEST_CASE("manufactured run converges at second order on a smooth linear case") {
    // degenerate band: the switch never fires and the scheme is linear
    const CorrelationBand band{0.3, 0.3, Scenario::WorstCase};
    MmsConfig cfg;
    cfg.params = reference_params();
    const MmsResult res = run_mms(MmsDomain::A, band, {11, 21, 41}, cfg);
    CHECK(res.report.rate[1] >= 1.9);
    CHECK(res.report.rate[2] >= 1.9);
    CHECK(res.report.rate[1] <= 2.6);
}

TEST_CASE("two-grid rates bracket the exact-error rate on a known solution") {
    // smooth linear case (degenerate band): both error definitions see plain
    // second-order decay and must agree on the measured rate
    const MarketParams p = reference_params();
    const CorrelationBand band{0.3, 0.3, Scenario::WorstCase};
    const ProblemBindings b = mms_bindings(p, band);
    const DriftPair drift = drift_coefficients(p);
    SolverConfig cfg;
    cfg.enforce_positivity_conditions = false;

    std::vector<Field> finals;
    std::vector<double> exact_err;
    const double T = 0.5;
    for (Index n : {11, 21, 41, 81}) {
        const Mesh mesh = Mesh::square(-1.0, 1.0, n);
        const Field u0 = Field::from_function(mesh, b.initial);
        const StepContext ctx{b, p, band, drift, cfg};
        auto [f, run] = integrate(u0, T, ctx);
        double err = 0;
        for (Index j = 1; j <= n; ++j)
            for (Index i = 1; i <= n; ++i)
                err = std::max(err, std::abs(f.at(i, j) - mms_exact(mesh.x1(i), mesh.x2(j), T)));
        exact_err.push_back(err);
        finals.push_back(std::move(f));
    }
    std::vector<double> two_grid;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        double e = 0;
        const Index n = finals[k].mesh.n1;
        for (Index j = 1; j <= n; ++j)
            for (Index i = 1; i <= n; ++i)
                e = std::max(e, std::abs(finals[k].at(i, j) - finals[k + 1].at(2 * i - 1, 2 * j - 1)));
        two_grid.push_back(e);
    }
    for (std::size_t k = 0; k + 1 < two_grid.size(); ++k) {
        const double rate_two_grid = std::log2(two_grid[k] / two_grid[k + 1]);
        const double rate_exact = std::log2(exact_err[k] / exact_err[k + 1]);
        CHECK(std::abs(rate_two_grid - rate_exact) <= 0.15);
    }
}

TEST_CASE("self-convergence harness") {
    TpOptions o;
    o.params = reference_params();
    o.band = CorrelationBand{-0.2, 0.6, Scenario::WorstCase};
    o.maturity = 0.25;
    const ProblemSpec spec = make_tp(1, o);
    SolverConfig solver;

    SUBCASE("non-nested sequences are rejected") {
        CHECK_THROWS(self_convergence(spec, {11, 20}, solver));
        CHECK_THROWS(self_convergence(spec, {11}, solver));
    }

    SUBCASE("identical runs give exactly zero two-grid error against themselves") {
        // determinism check: run the harness twice, errors must coincide bitwise
        const SelfConvergenceResult a = self_convergence(spec, {11, 21}, solver);
        const SelfConvergenceResult b = self_convergence(spec, {11, 21}, solver);
        CHECK(a.report.error[0] == b.report.error[0]);
        CHECK((a.finals[0].values - b.finals[0].values).abs().maxCoeff() == 0.0);
    }
}

TEST_CASE("assembly oracle: banded rows match the pointwise equations") {
    SUBCASE("all-Dirichlet layouts are identity rows") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull})
            CHECK(oracle_row_check(5, 5, OracleLayout::AllDirichlet, seed) <= 1e-14);
    }

    SUBCASE("all-Neumann layout") {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 25; ++seed)
            worst = std::max(worst, oracle_row_check(6, 7, OracleLayout::AllNeumann, seed));
        CHECK(worst <= 1e-12);
    }

    SUBCASE("mixed layout") {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 25; ++seed)
            worst = std::max(worst, oracle_row_check(8, 6, OracleLayout::MixedWest, seed));
        CHECK(worst <= 1e-12);
    }
}
