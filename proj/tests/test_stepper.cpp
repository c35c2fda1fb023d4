#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corrband/stepper.hpp"
#include "corrband/verify.hpp"

#include <cmath>

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

ProblemBindings homogeneous_dirichlet(SpaceFn initial) {
    ProblemBindings b;
    b.layout = BoundaryLayout::all_dirichlet();
    auto zero = [](double, double, double) { return 0.0; };
    for (auto& g : b.dirichlet_data) g = zero;
    b.initial = std::move(initial);
    return b;
}

}  // namespace

TEST_CASE("explicit-side time step bound") {
    const MarketParams p = reference_params();
    const DriftPair d = drift_coefficients(p);

    SUBCASE("reference parameters give about 4.91 h") {
        const double h = 0.05;
        CHECK(max_timestep(d, h, h) == doctest::Approx(4.910140181 * h).epsilon(1e-6));
    }

    SUBCASE("no drift means no bound") {
        DriftPair z;
        CHECK(std::isinf(max_timestep(z, 0.1, 0.1)));
    }

    SUBCASE("direct substitution") {
        DriftPair d1;
        d1.a1_pos = 1.0;
        d1.a2_pos = 1.0;
        CHECK(max_timestep(d1, 0.1, 0.1) == doctest::Approx(0.025).epsilon(1e-14));
    }
}

TEST_CASE("zero data is a fixed point") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const ProblemBindings b = homogeneous_dirichlet([](double, double) { return 0.0; });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 11);
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    auto [u, run] = integrate(u0, 0.25, ctx);
    CHECK(u.max_norm() == 0.0);
    CHECK(run.global_min == 0.0);
    CHECK(run.all_conditions);
}

TEST_CASE("zero maturity returns the initial field") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const ProblemBindings b =
        homogeneous_dirichlet([](double a, double c) { return std::abs(a) + std::abs(c); });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 9);
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    auto [u, run] = integrate(u0, 0.0, ctx);
    CHECK((u.values - u0.values).abs().maxCoeff() == 0.0);
    CHECK(run.steps.empty());
}

TEST_CASE("homogeneous data contracts in the maximum norm") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    // non-negative bump vanishing on the boundary
    const ProblemBindings b = homogeneous_dirichlet([](double a, double c) {
        const double f1 = std::max(0.0, 1.0 - a * a);
        const double f2 = std::max(0.0, 1.0 - c * c);
        return f1 * f1 * f2 * f2;
    });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 21);
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    auto [u, run] = integrate(u0, 0.25, ctx);

    double prev = run.initial_max_norm;
    for (const StepReport& s : run.steps) {
        CHECK(s.max_norm * (1.0 + p.r * s.dt) <= prev + 1e-12);
        CHECK(s.contraction_ok);
        prev = s.max_norm;
    }
    CHECK(run.global_min >= -1e-12 * std::max(1.0, run.initial_max_norm));
    CHECK(run.all_conditions);
}

TEST_CASE("determinism: identical runs produce identical fields") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const ProblemBindings b = homogeneous_dirichlet(
        [](double a, double c) { return std::max(0.0, (1.0 - a * a) * (1.0 - c * c)); });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 15);
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    auto [ua, ra] = integrate(u0, 0.1, ctx);
    auto [ub, rb] = integrate(u0, 0.1, ctx);
    CHECK((ua.values - ub.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("ratio violation is rejected before stepping") {
    MarketParams p = reference_params();
    p.sigma1 = 0.4;
    p.sigma2 = 0.2;
    const CorrelationBand band{-0.6, 0.6, Scenario::WorstCase};
    const ProblemBindings b = homogeneous_dirichlet([](double, double) { return 0.0; });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 11);  // h1/h2 = 1 < 1.2 required
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    CHECK_THROWS_AS(integrate(u0, 0.1, ctx), ConditionError);
}

TEST_CASE("oversized explicit step is rejected when enforcement is on") {
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const ProblemBindings b = homogeneous_dirichlet([](double, double) { return 0.0; });
    const Mesh mesh = Mesh::square(-1.0, 1.0, 11);
    const Field u0 = Field::from_function(mesh, b.initial);
    SolverConfig cfg;
    cfg.policy = DtPolicy::Explicit;
    cfg.dt = 10.0 * max_timestep(drift_coefficients(p), mesh.h1, mesh.h2);
    const StepContext ctx{b, p, band, drift_coefficients(p), cfg};
    CHECK_THROWS_AS(integrate(u0, 1.0, ctx), ConditionError);
    SolverConfig loose = cfg;
    loose.enforce_positivity_conditions = false;
    const StepContext ctx2{b, p, band, drift_coefficients(p), loose};
    CHECK_NOTHROW(integrate(u0, 1.0, ctx2));
}

TEST_CASE("one-step error shrinks at the combined implicit-explicit order") {
    // start from the exact manufactured solution and advance a single step
    // of dt = h^2; the defect against the exact solution must fall roughly
    // like h^4 (first order in dt stacked on second order in space).
    const MarketParams p = reference_params();
    const CorrelationBand band{-0.2, 0.6, Scenario::WorstCase};
    const ProblemBindings b = mms_bindings(p, band);
    const DriftPair d = drift_coefficients(p);

    std::vector<double> errs;
    for (Index n : {11, 21, 41}) {
        const Mesh mesh = Mesh::square(-1.0, 1.0, n);
        const Field u0 = Field::from_function(mesh, b.initial);
        const double dt = mesh.h1 * mesh.h1;
        SolverConfig cfg;
        cfg.enforce_positivity_conditions = false;
        const StepContext ctx{b, p, band, d, cfg};
        auto [u1, rep] = step(u0, 0.0, dt, ctx);
        double err = 0.0;
        for (Index j = 1; j <= n; ++j)
            for (Index i = 1; i <= n; ++i)
                err = std::max(err, std::abs(u1.at(i, j) - mms_exact(mesh.x1(i), mesh.x2(j), dt)));
        errs.push_back(err);
    }
    // halving h divides the one-step defect by ~16; accept anything >= 8
    CHECK(errs[0] / errs[1] >= 8.0);
    CHECK(errs[1] / errs[2] >= 8.0);
}
