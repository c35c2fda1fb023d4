#pragma once

#include "corrband/linsolve.hpp"

#include <vector>

namespace corrband {

enum class DtPolicy {
    FixedHSquared,  // dt = h1*h2, the convergence-study step
    RTEquality,     // dt equal to the explicit-convection bound
    Explicit,       // user-supplied dt
};

struct SolverConfig {
    DtPolicy policy = DtPolicy::FixedHSquared;
    double dt = 0.0;  // used by DtPolicy::Explicit
    bool enforce_positivity_conditions = true;
    RatioConfig ratio;
    SolveOptions linear;
    MixedStencil stencil = MixedStencil::SignSwitched;
};

/// Largest time step for which the explicit upwind side keeps the right-hand
/// side a non-negative combination: dt <= h1 h2 / (2 (|A1| h2 + |A2| h1)).
inline double max_timestep(const DriftPair& drift, double h1, double h2) {
    const double denom = 2.0 * (drift.abs1() * h2 + drift.abs2() * h1);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return h1 * h2 / denom;
}

struct StepReport {
    double tau = 0;          // time reached after the step
    double dt = 0;
    double min_value = 0;
    double max_norm = 0;
    bool p1 = true, p2 = true, p3 = true, p4 = true;
    double slack_deviation = 0;
    SolveStats solve;
    // ||u_new|| (1 + r dt) <= ||u_old|| + dt (A1+ + A2+) max g1' (+ tolerance);
    // with homogeneous data the data term vanishes.
    bool contraction_ok = true;
    double contraction_excess = 0;
};

struct RunReport {
    std::vector<StepReport> steps;
    double initial_min = 0;
    double initial_max_norm = 0;
    double global_min = 0;           // over all time levels including tau = 0
    double final_max_norm = 0;
    bool all_conditions = true;      // P1-P4 on every step
    bool all_p123 = true;
    double worst_slack_deviation = 0;
    bool zero_rate = false;          // r == 0 accepted but flagged
    double ratio_margin = 0;         // admissibility margin of (RH)

    double worst_min() const { return global_min; }
};

struct StepContext {
    const ProblemBindings& problem;
    MarketParams params;
    CorrelationBand band;
    DriftPair drift;
    SolverConfig config;
};

namespace detail {

inline double max_neumann_data(const ProblemBindings& problem, const Mesh& m, double tau) {
    double best = 0.0;
    for (Edge e : {Edge::West, Edge::East, Edge::South, Edge::North}) {
        if (!problem.layout.neumann(e)) continue;
        const auto& g = problem.g1(e);
        if (e == Edge::West || e == Edge::East) {
            const double x1 = (e == Edge::West) ? m.x1_min : m.x1_max;
            for (Index j = 1; j <= m.n2; ++j) best = std::max(best, std::abs(g(x1, m.x2(j), tau)));
        } else {
            const double x2 = (e == Edge::South) ? m.x2_min : m.x2_max;
            for (Index i = 1; i <= m.n1; ++i) best = std::max(best, std::abs(g(m.x1(i), x2, tau)));
        }
    }
    return best;
}

}  // namespace detail

/// One implicit-explicit step from tau_old to tau_old + dt.
inline std::pair<Field, StepReport> step(const Field& u, double tau_old, double dt,
                                         const StepContext& ctx) {
    const Mesh& mesh = u.mesh;
    const GhostFrame ghosts = extrapolate_ghost(u);
    const RhoField rho = rho_field(u, ctx.problem.layout, ctx.problem, ctx.band, tau_old);
    const AssemblyInputs in{u,          ghosts,  rho,
                            ctx.problem, ctx.params, ctx.drift,
                            ctx.config.ratio, dt, tau_old,
                            tau_old + dt, ctx.config.stencil};
    auto [M, F] = assemble(in);

    StepReport rep;
    rep.tau = tau_old + dt;
    rep.dt = dt;
    const PositivityReport pos = verify_positivity_conditions(M, F);
    rep.p1 = pos.p1; rep.p2 = pos.p2; rep.p3 = pos.p3; rep.p4 = pos.p4;
    rep.slack_deviation = interior_slack_deviation(M, ctx.problem.layout, dt, ctx.params.r);

    const VectorX guess = u.flat();
    auto [x, stats] = solve(M, F, ctx.config.linear, &guess);
    rep.solve = stats;

    Field out{mesh, Eigen::Map<const ArrayXX>(x.data(), mesh.n1, mesh.n2)};
    require(out.all_finite(), "step: non-finite values in solution");

    rep.min_value = out.min_value();
    rep.max_norm = out.max_norm();

    const double g1_max = detail::max_neumann_data(ctx.problem, mesh, tau_old + dt);
    const double allowance =
        dt * (ctx.drift.a1_pos + ctx.drift.a2_pos) * g1_max + 1e-12 * std::max(1.0, u.max_norm());
    rep.contraction_excess =
        rep.max_norm * (1.0 + ctx.params.r * dt) - (u.max_norm() + allowance);
    rep.contraction_ok = rep.contraction_excess <= 0.0;

    return {std::move(out), rep};
}

/// Integrate from tau = 0 to tau = T; the final step is shortened to land on
/// T exactly.
inline std::pair<Field, RunReport> integrate(const Field& initial, double maturity,
                                             const StepContext& ctx) {
    ctx.params.validate();
    ctx.band.validate();
    ctx.problem.validate();
    const Mesh& mesh = initial.mesh;

    const RatioCheck rc = mesh_ratio_check(ctx.params, ctx.band, ctx.problem.layout, mesh.h1,
                                           mesh.h2, mesh.n1, mesh.n2);
    if (!rc.pass)
        throw ConditionError("integrate: mesh aspect ratio violates the admissibility bound "
                             "(ratio " + std::to_string(rc.ratio) + " outside [" +
                             std::to_string(rc.lower) + ", " + std::to_string(rc.upper) + "])");

    const double dt_bound = max_timestep(ctx.drift, mesh.h1, mesh.h2);
    double dt = 0;
    switch (ctx.config.policy) {
        case DtPolicy::FixedHSquared: dt = mesh.h1 * mesh.h2; break;
        case DtPolicy::RTEquality: dt = dt_bound; break;
        case DtPolicy::Explicit: dt = ctx.config.dt; break;
    }
    require(dt > 0.0 || maturity == 0.0, "integrate: time step must be positive");
    if (ctx.config.enforce_positivity_conditions && dt > dt_bound * (1.0 + 1e-12))
        throw ConditionError("integrate: time step " + std::to_string(dt) +
                             " exceeds the positivity bound " + std::to_string(dt_bound));

    RunReport run;
    run.zero_rate = (ctx.params.r == 0.0);
    run.ratio_margin = rc.margin;
    run.initial_min = initial.min_value();
    run.initial_max_norm = initial.max_norm();
    run.global_min = run.initial_min;

    Field u = initial;
    double tau = 0.0;
    if (maturity > 0.0) {
        const double n_steps_real = maturity / dt;
        const Index n_full = static_cast<Index>(std::floor(n_steps_real * (1.0 + 1e-14)));
        run.steps.reserve(static_cast<std::size_t>(n_full) + 1);
        for (Index k = 0; k < n_full; ++k) {
            auto [next, rep] = step(u, tau, dt, ctx);
            u = std::move(next);
            tau = rep.tau;
            run.global_min = std::min(run.global_min, rep.min_value);
            run.all_conditions = run.all_conditions && rep.p1 && rep.p2 && rep.p3 && rep.p4;
            run.all_p123 = run.all_p123 && rep.p1 && rep.p2 && rep.p3;
            run.worst_slack_deviation = std::max(run.worst_slack_deviation, rep.slack_deviation);
            run.steps.push_back(std::move(rep));
            if (ctx.config.enforce_positivity_conditions && !run.all_conditions)
                throw ConditionError("integrate: positivity conditions violated at tau = " +
                                     std::to_string(tau));
        }
        const double rest = maturity - tau;
        if (rest > 1e-12 * dt) {
            auto [next, rep] = step(u, tau, rest, ctx);
            u = std::move(next);
            run.global_min = std::min(run.global_min, rep.min_value);
            run.all_conditions = run.all_conditions && rep.p1 && rep.p2 && rep.p3 && rep.p4;
            run.all_p123 = run.all_p123 && rep.p1 && rep.p2 && rep.p3;
            run.worst_slack_deviation = std::max(run.worst_slack_deviation, rep.slack_deviation);
            run.steps.push_back(std::move(rep));
        }
    }
    run.final_max_norm = u.max_norm();
    return {std::move(u), std::move(run)};
}

struct FullStepResult {
    Field field;
    RunReport run;
    double tau_reached = 0;
};

/// Verification-harness time grid: full steps of the policy step until
/// tau >= end (the final level may overshoot). The reference convergence
/// tables compare solutions at the reached level, not at an exact landing.
inline FullStepResult integrate_full_steps(const Field& initial, double end,
                                           const StepContext& ctx) {
    ctx.params.validate();
    ctx.band.validate();
    ctx.problem.validate();
    const Mesh& mesh = initial.mesh;
    const RatioCheck rc = mesh_ratio_check(ctx.params, ctx.band, ctx.problem.layout, mesh.h1,
                                           mesh.h2, mesh.n1, mesh.n2);
    if (!rc.pass) throw ConditionError("integrate_full_steps: mesh aspect ratio inadmissible");

    double dt = 0;
    switch (ctx.config.policy) {
        case DtPolicy::FixedHSquared: dt = mesh.h1 * mesh.h2; break;
        case DtPolicy::RTEquality: dt = max_timestep(ctx.drift, mesh.h1, mesh.h2); break;
        case DtPolicy::Explicit: dt = ctx.config.dt; break;
    }
    require(dt > 0.0, "integrate_full_steps: time step must be positive");
    const Index n_steps = static_cast<Index>(std::ceil(end / dt * (1.0 - 1e-14)));

    FullStepResult out{initial, {}, 0.0};
    out.run.zero_rate = (ctx.params.r == 0.0);
    out.run.ratio_margin = rc.margin;
    out.run.initial_min = initial.min_value();
    out.run.initial_max_norm = initial.max_norm();
    out.run.global_min = out.run.initial_min;
    for (Index k = 0; k < n_steps; ++k) {
        auto [next, rep] = step(out.field, out.tau_reached, dt, ctx);
        out.field = std::move(next);
        out.tau_reached = rep.tau;
        out.run.global_min = std::min(out.run.global_min, rep.min_value);
        out.run.all_conditions = out.run.all_conditions && rep.p1 && rep.p2 && rep.p3 && rep.p4;
        out.run.all_p123 = out.run.all_p123 && rep.p1 && rep.p2 && rep.p3;
        out.run.worst_slack_deviation =
            std::max(out.run.worst_slack_deviation, rep.slack_deviation);
        out.run.steps.push_back(std::move(rep));
    }
    out.run.final_max_norm = out.field.max_norm();
    return out;
}

}  // namespace corrband
