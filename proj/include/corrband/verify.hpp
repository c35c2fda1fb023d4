#pragma once

#include "corrband/pricing.hpp"
#include "corrband/stepper.hpp"

#include <chrono>
#include <numbers>
#include <random>

namespace corrband {

// ---------------------------------------------------------------------------
// Manufactured-solution study
// ---------------------------------------------------------------------------

/// u(x1, x2, tau) = e^{-tau/2} cos(pi x1 / 3) cos(pi x2 / 3).
inline double mms_exact(double x1, double x2, double tau) {
    constexpr double k = std::numbers::pi / 3.0;
    return std::exp(-0.5 * tau) * std::cos(k * x1) * std::cos(k * x2);
}

/// Analytic cross derivative of the manufactured solution; its sign drives
/// the correlation switch inside the residual.
inline double mms_cross_gamma(double x1, double x2, double tau) {
    constexpr double k = std::numbers::pi / 3.0;
    return k * k * std::exp(-0.5 * tau) * std::sin(k * x1) * std::sin(k * x2);
}

/// Volume source that makes the manufactured solution solve the switched
/// equation: R = u_tau + L_rho u on the exact solution, hand-differentiated.
inline double mms_residual(double x1, double x2, double tau, const MarketParams& p,
                           const CorrelationBand& band) {
    constexpr double k = std::numbers::pi / 3.0;
    const double decay = std::exp(-0.5 * tau);
    const double c1 = std::cos(k * x1), c2 = std::cos(k * x2);
    const double s1 = std::sin(k * x1), s2 = std::sin(k * x2);
    const double u = decay * c1 * c2;
    const double cross = k * k * decay * s1 * s2;
    const double rho = select_rho(sign_class(cross), band).value();
    const DriftPair drift = drift_coefficients(p);
    // u_tau = -u/2, u_x1x1 = u_x2x2 = -k^2 u, u_xs = -k decay sin cos.
    return u * (-0.5 + 0.5 * k * k * (p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2) + p.r) -
           rho * p.sigma1 * p.sigma2 * cross +
           k * decay * (drift.a1() * s1 * c2 + drift.a2() * c1 * s2);
}

enum class MmsDomain { A, B };

inline std::pair<double, double> mms_domain_bounds(MmsDomain d) {
    if (d == MmsDomain::A) return {-1.0, 1.0};
    const double l = std::log(200.0);
    return {-l, l};
}

/// Dirichlet on the west wall from the exact solution, Neumann data on the
/// other three walls from its outward x-space derivative, forcing as above.
inline ProblemBindings mms_bindings(const MarketParams& p, const CorrelationBand& band) {
    constexpr double k = std::numbers::pi / 3.0;
    ProblemBindings b;
    b.layout.set(Edge::West, EdgeKind::Dirichlet);
    b.layout.set(Edge::East, EdgeKind::Neumann);
    b.layout.set(Edge::South, EdgeKind::Neumann);
    b.layout.set(Edge::North, EdgeKind::Neumann);
    b.dirichlet_data[edge_index(Edge::West)] = mms_exact;
    b.neumann_data[edge_index(Edge::East)] = [](double x1, double x2, double tau) {
        return -k * std::exp(-0.5 * tau) * std::sin(k * x1) * std::cos(k * x2);
    };
    b.neumann_data[edge_index(Edge::North)] = [](double x1, double x2, double tau) {
        return -k * std::exp(-0.5 * tau) * std::cos(k * x1) * std::sin(k * x2);
    };
    b.neumann_data[edge_index(Edge::South)] = [](double x1, double x2, double tau) {
        return k * std::exp(-0.5 * tau) * std::cos(k * x1) * std::sin(k * x2);
    };
    b.initial = [](double x1, double x2) { return mms_exact(x1, x2, 0.0); };
    b.forcing = [p, band](double x1, double x2, double tau) {
        return mms_residual(x1, x2, tau, p, band);
    };
    return b;
}

// ---------------------------------------------------------------------------
// Convergence reports
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    enum class ErrorKind { Exact, TwoGrid };
    ErrorKind kind = ErrorKind::Exact;
    std::vector<Index> mesh;      // node counts per direction
    std::vector<double> error;    // Exact: per mesh. TwoGrid: per consecutive pair,
                                  // aligned with the coarse mesh; last entry NaN.
    std::vector<double> rate;     // log2 of consecutive error quotients; NaN where undefined
    std::vector<double> runtime;  // seconds per mesh run
};

namespace detail {

inline std::vector<double> rates_from_errors(const std::vector<double>& err) {
    std::vector<double> r(err.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k < err.size(); ++k)
        if (std::isfinite(err[k - 1]) && std::isfinite(err[k]) && err[k] > 0.0)
            r[k] = std::log2(err[k - 1] / err[k]);
    return r;
}

}  // namespace detail

struct MmsConfig {
    double maturity = 0.5;
    SolverConfig solver{.policy = DtPolicy::FixedHSquared,
                        .dt = 0.0,
                        .enforce_positivity_conditions = false,
                        .ratio = {},
                        .linear = {}};
    MarketParams params{};
};

struct MmsResult {
    ConvergenceReport report;
    std::vector<RunReport> runs;
};

/// Exact-error convergence study for the manufactured solution. The time
/// grid takes full steps of dt = h^2 and the error is measured at the level
/// actually reached (the reference tables' convention; T/h^2 need not be an
/// integer).
inline MmsResult run_mms(MmsDomain domain, const CorrelationBand& band,
                         const std::vector<Index>& meshes, const MmsConfig& cfg = {}) {
    const auto [lo, hi] = mms_domain_bounds(domain);
    const ProblemBindings bindings = mms_bindings(cfg.params, band);
    const DriftPair drift = drift_coefficients(cfg.params);

    MmsResult out;
    out.report.kind = ConvergenceReport::ErrorKind::Exact;
    for (Index n : meshes) {
        const auto t0 = std::chrono::steady_clock::now();
        const Mesh mesh = Mesh::square(lo, hi, n);
        const Field initial = Field::from_function(mesh, bindings.initial);
        StepContext ctx{bindings, cfg.params, band, drift, cfg.solver};
        FullStepResult res = integrate_full_steps(initial, cfg.maturity, ctx);
        double err = 0.0;
        for (Index j = 1; j <= mesh.n2; ++j)
            for (Index i = 1; i <= mesh.n1; ++i)
                err = std::max(err, std::abs(res.field.at(i, j) -
                                             mms_exact(mesh.x1(i), mesh.x2(j), res.tau_reached)));
        out.report.mesh.push_back(n);
        out.report.error.push_back(err);
        out.report.runtime.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        out.runs.push_back(std::move(res.run));
    }
    out.report.rate = detail::rates_from_errors(out.report.error);
    return out;
}

struct SelfConvergenceResult {
    ConvergenceReport report;
    std::vector<RunReport> runs;
    std::vector<Field> finals;
};

/// Two-grid convergence study on a nested mesh sequence (n -> 2n-1), errors
/// measured at coincident nodes.
inline SelfConvergenceResult self_convergence(const ProblemSpec& spec,
                                              const std::vector<Index>& meshes,
                                              const SolverConfig& solver) {
    require(meshes.size() >= 2, "self_convergence: need at least two meshes");
    for (std::size_t k = 1; k < meshes.size(); ++k)
        require(meshes[k] == 2 * meshes[k - 1] - 1,
                "self_convergence: mesh sequence must be nested (n -> 2n-1)");

    const ProblemBindings bindings = to_bindings(spec);
    const DriftPair drift = drift_coefficients(spec.params);

    SelfConvergenceResult out;
    out.report.kind = ConvergenceReport::ErrorKind::TwoGrid;
    for (Index n : meshes) {
        const auto t0 = std::chrono::steady_clock::now();
        const Mesh mesh = make_mesh(spec, n, n);
        const Field initial = Field::from_function(mesh, bindings.initial);
        StepContext ctx{bindings, spec.params, spec.band, drift, solver};
        auto [final_field, run] = integrate(initial, spec.maturity, ctx);
        out.report.mesh.push_back(n);
        out.report.runtime.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        out.runs.push_back(std::move(run));
        out.finals.push_back(std::move(final_field));
    }
    out.report.error.assign(meshes.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k + 1 < out.finals.size(); ++k) {
        const Field& coarse = out.finals[k];
        const Field& fine = out.finals[k + 1];
        double err = 0.0;
        for (Index j = 1; j <= coarse.mesh.n2; ++j)
            for (Index i = 1; i <= coarse.mesh.n1; ++i)
                err = std::max(err, std::abs(coarse.at(i, j) - fine.at(2 * i - 1, 2 * j - 1)));
        out.report.error[k] = err;
    }
    out.report.rate = detail::rates_from_errors(out.report.error);
    return out;
}

// ---------------------------------------------------------------------------
// Assembly oracle: straight-line evaluation of the fully discrete equations
// ---------------------------------------------------------------------------

enum class OracleLayout { AllDirichlet, AllNeumann, MixedWest };

namespace oracle {

/// Independent transcription of the per-node scheme equations. Everything is
/// recomputed locally (slopes, limiter weights, ghost extrapolation, switch
/// signs) so a bookkeeping slip in the banded assembly cannot cancel here.
struct Pointwise {
    const Mesh& mesh;
    const ArrayXX& u_old;   // previous time level (drives the explicit side)
    const ArrayXX& u_new;   // candidate vector tested against the matrix rows
    const ProblemBindings& problem;
    MarketParams par;
    CorrelationBand band;
    double dt;
    double tau_old;
    double tau_new;
    double eps;

    double uo(Index i, Index j) const {
        const Index n1 = mesh.n1, n2 = mesh.n2;
        if (i == 0) return 3 * uo(1, j) - 3 * uo(2, j) + uo(3, j);
        if (i == n1 + 1) return 3 * uo(n1, j) - 3 * uo(n1 - 1, j) + uo(n1 - 2, j);
        if (j == 0) return 3 * uo(i, 1) - 3 * uo(i, 2) + uo(i, 3);
        if (j == n2 + 1) return 3 * uo(i, n2) - 3 * uo(i, n2 - 1) + uo(i, n2 - 2);
        return u_old(i - 1, j - 1);
    }
    double un(Index i, Index j) const { return u_new(i - 1, j - 1); }

    double phi(double th) const { return (std::abs(th) + th) / (1.0 + std::abs(th)); }
    double slope1(Index i, Index j) const { return (uo(i, j) - uo(i - 1, j)) / mesh.h1; }
    double slope2(Index i, Index j) const { return (uo(i, j) - uo(i, j - 1)) / mesh.h2; }

    double lam1(Index i, Index j, bool plus) const {
        auto rat = [&](double a, double b) { return (a + eps) / (b + eps); };
        if (plus)
            return 1.0 + 0.5 * phi(rat(slope1(i, j), slope1(i + 1, j))) -
                   0.5 * phi(rat(slope1(i + 2, j), slope1(i + 1, j)));
        return 1.0 + 0.5 * phi(rat(slope1(i + 1, j), slope1(i, j))) -
               0.5 * phi(rat(slope1(i - 1, j), slope1(i, j)));
    }
    double lam2(Index i, Index j, bool plus) const {
        auto rat = [&](double a, double b) { return (a + eps) / (b + eps); };
        if (plus)
            return 1.0 + 0.5 * phi(rat(slope2(i, j), slope2(i, j + 1))) -
                   0.5 * phi(rat(slope2(i, j + 2), slope2(i, j + 1)));
        return 1.0 + 0.5 * phi(rat(slope2(i, j + 1), slope2(i, j))) -
               0.5 * phi(rat(slope2(i, j - 1), slope2(i, j)));
    }

    double conv1_fwd(Index i, Index j, const DriftPair& d) const {
        return d.a1_pos * lam1(i, j, true) * slope1(i + 1, j);
    }
    double conv1_bwd(Index i, Index j, const DriftPair& d) const {
        return -d.a1_neg * lam1(i, j, false) * slope1(i, j);
    }
    double conv2_fwd(Index i, Index j, const DriftPair& d) const {
        return d.a2_pos * lam2(i, j, true) * slope2(i, j + 1);
    }
    double conv2_bwd(Index i, Index j, const DriftPair& d) const {
        return -d.a2_neg * lam2(i, j, false) * slope2(i, j);
    }

    double g1(Edge e, Index i, Index j, double tau) const {
        return problem.g1(e)(mesh.x1(i), mesh.x2(j), tau);
    }
    double forcing(Index i, Index j) const {
        return problem.forcing ? problem.forcing(mesh.x1(i), mesh.x2(j), tau_new) : 0.0;
    }

    RhoSplit rho_at(Index i, Index j) const {
        const Index n1 = mesh.n1, n2 = mesh.n2;
        const double h1 = mesh.h1, h2 = mesh.h2;
        auto dW = [&](Index jj) {
            return (g1(Edge::West, 1, jj + 1, tau_old) - g1(Edge::West, 1, jj - 1, tau_old)) / (2 * h2);
        };
        auto dE = [&](Index jj) {
            return (g1(Edge::East, n1, jj + 1, tau_old) - g1(Edge::East, n1, jj - 1, tau_old)) / (2 * h2);
        };
        auto dS = [&](Index ii) {
            return (g1(Edge::South, ii + 1, 1, tau_old) - g1(Edge::South, ii - 1, 1, tau_old)) / (2 * h1);
        };
        auto dN = [&](Index ii) {
            return (g1(Edge::North, ii + 1, n2, tau_old) - g1(Edge::North, ii - 1, n2, tau_old)) / (2 * h1);
        };
        double gamma = 0.0;
        switch (classify(i, j, n1, n2, problem.layout)) {
            case RowKind::Interior:
                gamma = (uo(i + 1, j + 1) - uo(i - 1, j + 1) - uo(i + 1, j - 1) + uo(i - 1, j - 1)) /
                        (4 * h1 * h2);
                break;
            case RowKind::EdgeWest: gamma = -dW(j); break;
            case RowKind::EdgeEast: gamma = dE(j); break;
            case RowKind::EdgeNorth: gamma = dN(i); break;
            case RowKind::EdgeSouth: gamma = -dS(i); break;
            case RowKind::CornerNW: gamma = dN(1) - dW(n2); break;
            case RowKind::CornerNE: gamma = dN(n1) + dE(n2); break;
            case RowKind::CornerSE: gamma = dE(1) - dS(n1); break;
            case RowKind::CornerSW: gamma = -dW(1) - dS(1); break;
            case RowKind::DirichletNode: gamma = 0.0; break;
        }
        return select_rho(sign_class(gamma), band);
    }

    /// Residual of the discrete equation at node (i, j): LHS(u_new) - RHS(u_old).
    double equation(Index i, Index j) const {
        const Index n1 = mesh.n1, n2 = mesh.n2;
        const double h1 = mesh.h1, h2 = mesh.h2;
        const double s1 = par.sigma1, s2 = par.sigma2, q = par.sigma1 * par.sigma2;
        const DriftPair d = drift_coefficients(par);
        const RhoSplit rho = rho_at(i, j);
        const double ut = (un(i, j) - uo(i, j)) / dt;
        const double r_u = par.r * un(i, j);

        auto uxx1 = [&](Index a, Index b) {
            return (un(a + 1, b) - 2 * un(a, b) + un(a - 1, b)) / (h1 * h1);
        };
        auto uxx2 = [&](Index a, Index b) {
            return (un(a, b + 1) - 2 * un(a, b) + un(a, b - 1)) / (h2 * h2);
        };
        auto ux1 = [&](Index a, Index b) { return (un(a + 1, b) - un(a, b)) / h1; };
        auto uxb1 = [&](Index a, Index b) { return (un(a, b) - un(a - 1, b)) / h1; };
        auto ux2 = [&](Index a, Index b) { return (un(a, b + 1) - un(a, b)) / h2; };
        auto uxb2 = [&](Index a, Index b) { return (un(a, b) - un(a, b - 1)) / h2; };

        switch (classify(i, j, n1, n2, problem.layout)) {
            case RowKind::DirichletNode: {
                const Edge e = dirichlet_edge_for(i, j, n1, n2, problem.layout);
                const double g = problem.g2(e)(mesh.x1(i), mesh.x2(j), tau_new);
                return un(i, j) - g;
            }
            case RowKind::Interior: {
                const double u_pp = 0.5 * (((un(i + 1, j + 1) - un(i, j + 1) - un(i + 1, j) + un(i, j)) +
                                            (un(i, j) - un(i - 1, j) - un(i, j - 1) + un(i - 1, j - 1))) /
                                           (h1 * h2));
                const double u_mm = 0.5 * (((un(i, j + 1) - un(i - 1, j + 1) - un(i, j) + un(i - 1, j)) +
                                            (un(i + 1, j) - un(i, j) - un(i + 1, j - 1) + un(i, j - 1))) /
                                           (h1 * h2));
                const double lhs = ut - 0.5 * s1 * s1 * uxx1(i, j) - 0.5 * s2 * s2 * uxx2(i, j) -
                                   q * (rho.pos * u_pp - rho.neg * u_mm) + r_u;
                const double rhs = conv1_fwd(i, j, d) + conv1_bwd(i, j, d) + conv2_fwd(i, j, d) +
                                   conv2_bwd(i, j, d) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::EdgeWest: {
                // u_x1x2 - u_x1xbar2 at (1, j), expanded over in-range nodes
                const double mix_term =
                    ((un(2, j + 1) - un(1, j + 1) - 2 * un(2, j) + 2 * un(1, j) + un(2, j - 1) -
                      un(1, j - 1)) /
                     (h1 * h2));
                const double lhs = ut - (s1 * s1 / h1) * ux1(1, j) - 0.5 * s2 * s2 * uxx2(1, j) -
                                   0.5 * q * rho.abs() * mix_term + r_u;
                auto g = [&](Index jj) { return g1(Edge::West, 1, jj, tau_new); };
                const double gxb2 = (g(j) - g(j - 1)) / h2;
                const double gx2 = (g(j + 1) - g(j)) / h2;
                const double rhs = conv1_fwd(1, j, d) + conv2_fwd(1, j, d) + conv2_bwd(1, j, d) +
                                   d.a1_neg * g(j) + (s1 * s1 / h1) * g(j) -
                                   q * (rho.pos * gxb2 - rho.neg * gx2) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::EdgeEast: {
                const double u_bb = (un(n1, j) - un(n1 - 1, j) - un(n1, j - 1) + un(n1 - 1, j - 1)) /
                                    (h1 * h2);
                const double u_bf = (un(n1, j + 1) - un(n1 - 1, j + 1) - un(n1, j) + un(n1 - 1, j)) /
                                    (h1 * h2);
                const double lhs = ut + (s1 * s1 / h1) * uxb1(n1, j) - 0.5 * s2 * s2 * uxx2(n1, j) -
                                   0.5 * q * rho.abs() * (u_bb - u_bf) + r_u;
                auto g = [&](Index jj) { return g1(Edge::East, n1, jj, tau_new); };
                const double gx2 = (g(j + 1) - g(j)) / h2;
                const double gxb2 = (g(j) - g(j - 1)) / h2;
                const double rhs = conv1_bwd(n1, j, d) + conv2_fwd(n1, j, d) + conv2_bwd(n1, j, d) +
                                   d.a1_pos * g(j) + (s1 * s1 / h1) * g(j) +
                                   q * (rho.pos * gx2 - rho.neg * gxb2) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::EdgeNorth: {
                const double u_bb = (un(i, n2) - un(i - 1, n2) - un(i, n2 - 1) + un(i - 1, n2 - 1)) /
                                    (h1 * h2);
                const double u_fb = (un(i + 1, n2) - un(i, n2) - un(i + 1, n2 - 1) + un(i, n2 - 1)) /
                                    (h1 * h2);
                const double lhs = ut - 0.5 * s1 * s1 * uxx1(i, n2) + (s2 * s2 / h2) * uxb2(i, n2) -
                                   0.5 * q * rho.abs() * (u_bb - u_fb) + r_u;
                auto g = [&](Index ii) { return g1(Edge::North, ii, n2, tau_new); };
                const double gx1 = (g(i + 1) - g(i)) / h1;
                const double gxb1 = (g(i) - g(i - 1)) / h1;
                const double rhs = conv1_fwd(i, n2, d) + conv1_bwd(i, n2, d) + conv2_bwd(i, n2, d) +
                                   d.a2_pos * g(i) + (s2 * s2 / h2) * g(i) +
                                   q * (rho.pos * gx1 - rho.neg * gxb1) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::EdgeSouth: {
                const double u_ff = (un(i + 1, 2) - un(i, 2) - un(i + 1, 1) + un(i, 1)) / (h1 * h2);
                const double u_bf = (un(i, 2) - un(i - 1, 2) - un(i, 1) + un(i - 1, 1)) / (h1 * h2);
                const double lhs = ut - 0.5 * s1 * s1 * uxx1(i, 1) - (s2 * s2 / h2) * ux2(i, 1) -
                                   0.5 * q * rho.abs() * (u_ff - u_bf) + r_u;
                auto g = [&](Index ii) { return g1(Edge::South, ii, 1, tau_new); };
                const double gxb1 = (g(i) - g(i - 1)) / h1;
                const double gx1 = (g(i + 1) - g(i)) / h1;
                const double rhs = conv1_fwd(i, 1, d) + conv1_bwd(i, 1, d) + conv2_fwd(i, 1, d) +
                                   d.a2_neg * g(i) + (s2 * s2 / h2) * g(i) -
                                   q * (rho.pos * gxb1 - rho.neg * gx1) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::CornerNE: {
                const double u_bb = (un(n1, n2) - un(n1 - 1, n2) - un(n1, n2 - 1) +
                                     un(n1 - 1, n2 - 1)) / (h1 * h2);
                const double lhs = ut + (s1 * s1 / h1) * uxb1(n1, n2) + (s2 * s2 / h2) * uxb2(n1, n2) -
                                   q * rho.abs() * u_bb + r_u;
                auto gE = [&](Index jj) { return g1(Edge::East, n1, jj, tau_new); };
                auto gN = [&](Index ii) { return g1(Edge::North, ii, n2, tau_new); };
                const double gE_xb2 = (gE(n2) - gE(n2 - 1)) / h2;
                const double gE_c2 = (gE(n2 + 1) - gE(n2 - 1)) / (2 * h2);
                const double gN_xb1 = (gN(n1) - gN(n1 - 1)) / h1;
                const double gN_c1 = (gN(n1 + 1) - gN(n1 - 1)) / (2 * h1);
                const double G = gN_xb1 + gE_xb2 - gE_c2 - gN_c1;
                const double rhs = conv1_bwd(n1, n2, d) + conv2_bwd(n1, n2, d) + d.a1_pos * gE(n2) +
                                   d.a2_pos * gN(n1) + (s1 * s1 / h1) * gE(n2) +
                                   (s2 * s2 / h2) * gN(n1) - q * rho.pos * G -
                                   q * rho.neg * (gN_xb1 + gE_xb2) + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::CornerNW: {
                const double u_fb = (un(2, n2) - un(1, n2) - un(2, n2 - 1) + un(1, n2 - 1)) /
                                    (h1 * h2);
                const double lhs = ut - (s1 * s1 / h1) * ux1(1, n2) + (s2 * s2 / h2) * uxb2(1, n2) +
                                   q * rho.abs() * u_fb + r_u;
                auto gW = [&](Index jj) { return g1(Edge::West, 1, jj, tau_new); };
                auto gN = [&](Index ii) { return g1(Edge::North, ii, n2, tau_new); };
                const double gW_xb2 = (gW(n2) - gW(n2 - 1)) / h2;
                const double gW_c2 = (gW(n2 + 1) - gW(n2 - 1)) / (2 * h2);
                const double gN_x1 = (gN(2) - gN(1)) / h1;
                const double gN_c1 = (gN(2) - gN(0)) / (2 * h1);
                const double G = gN_x1 - gW_xb2 + gW_c2 - gN_c1;
                const double rhs = conv1_fwd(1, n2, d) + conv2_bwd(1, n2, d) + d.a1_neg * gW(n2) +
                                   d.a2_pos * gN(1) + (s1 * s1 / h1) * gW(n2) +
                                   (s2 * s2 / h2) * gN(1) + q * rho.pos * (gN_x1 - gW_xb2) +
                                   q * rho.neg * G + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::CornerSE: {
                const double u_bf = (un(n1, 2) - un(n1 - 1, 2) - un(n1, 1) + un(n1 - 1, 1)) /
                                    (h1 * h2);
                const double lhs = ut + (s1 * s1 / h1) * uxb1(n1, 1) - (s2 * s2 / h2) * ux2(n1, 1) +
                                   q * rho.abs() * u_bf + r_u;
                auto gE = [&](Index jj) { return g1(Edge::East, n1, jj, tau_new); };
                auto gS = [&](Index ii) { return g1(Edge::South, ii, 1, tau_new); };
                const double gE_x2 = (gE(2) - gE(1)) / h2;
                const double gE_c2 = (gE(2) - gE(0)) / (2 * h2);
                const double gS_xb1 = (gS(n1) - gS(n1 - 1)) / h1;
                const double gS_c1 = (gS(n1 + 1) - gS(n1 - 1)) / (2 * h1);
                const double G = gS_xb1 - gE_x2 - gS_c1 + gE_c2;
                const double rhs = conv1_bwd(n1, 1, d) + conv2_fwd(n1, 1, d) + d.a1_pos * gE(1) +
                                   d.a2_neg * gS(n1) + (s1 * s1 / h1) * gE(1) +
                                   (s2 * s2 / h2) * gS(n1) - q * rho.pos * (gS_xb1 - gE_x2) -
                                   q * rho.neg * G + forcing(i, j);
                return lhs - rhs;
            }
            case RowKind::CornerSW: {
                const double u_ff = (un(2, 2) - un(1, 2) - un(2, 1) + un(1, 1)) / (h1 * h2);
                const double lhs = ut - (s1 * s1 / h1) * ux1(1, 1) - (s2 * s2 / h2) * ux2(1, 1) -
                                   q * rho.abs() * u_ff + r_u;
                auto gW = [&](Index jj) { return g1(Edge::West, 1, jj, tau_new); };
                auto gS = [&](Index ii) { return g1(Edge::South, ii, 1, tau_new); };
                const double gW_x2 = (gW(2) - gW(1)) / h2;
                const double gW_c2 = (gW(2) - gW(0)) / (2 * h2);
                const double gS_x1 = (gS(2) - gS(1)) / h1;
                const double gS_c1 = (gS(2) - gS(0)) / (2 * h1);
                // Mirror image of the NE closure: the doubly fictitious node sits
                // on the main diagonal, so rho+ carries the averaged combination.
                const double G = gS_x1 + gW_x2 - gS_c1 - gW_c2;
                const double rhs = conv1_fwd(1, 1, d) + conv2_fwd(1, 1, d) + d.a1_neg * gW(1) +
                                   d.a2_neg * gS(1) + (s1 * s1 / h1) * gW(1) +
                                   (s2 * s2 / h2) * gS(1) + q * rho.pos * G +
                                   q * rho.neg * (gS_x1 + gW_x2) + forcing(i, j);
                return lhs - rhs;
            }
        }
        throw Error("oracle: unhandled row kind");
    }
};

}  // namespace oracle

/// Build a random configuration, assemble the banded system, and compare
/// every matrix row applied to a random candidate vector against the
/// straight-line equation evaluation. Returns the largest discrepancy.
inline double oracle_row_check(Index n1, Index n2, OracleLayout layout_kind,
                               std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    const Mesh mesh = Mesh::make(0.0, 1.0, 0.0, 1.2, n1, n2);
    MarketParams par;
    par.sigma1 = 0.3 + 0.7 * unit(gen);
    par.sigma2 = 0.3 + 0.7 * unit(gen);
    par.r = 0.1 * unit(gen);
    par.d1 = 0.05 * unit(gen);
    par.d2 = 0.05 * unit(gen);
    CorrelationBand band;
    band.rho1 = -unit(gen);
    band.rho2 = unit(gen);
    band.scenario = unit(gen) < 0.5 ? Scenario::WorstCase : Scenario::BestCase;

    ProblemBindings problem;
    switch (layout_kind) {
        case OracleLayout::AllDirichlet: problem.layout = BoundaryLayout::all_dirichlet(); break;
        case OracleLayout::AllNeumann: problem.layout = BoundaryLayout::all_neumann(); break;
        case OracleLayout::MixedWest:
            problem.layout = BoundaryLayout::all_neumann();
            problem.layout.set(Edge::West, EdgeKind::Dirichlet);
            break;
    }
    auto random_fn = [&]() -> LogSpaceFn {
        const double c0 = unit(gen), c1 = sym(gen), c2 = sym(gen), c3 = sym(gen), c4 = sym(gen);
        return [=](double x1, double x2, double tau) {
            return c0 + c1 * x1 + c2 * x2 + c3 * std::sin(x1 + 2.0 * x2) + c4 * tau;
        };
    };
    for (Edge e : {Edge::West, Edge::East, Edge::South, Edge::North}) {
        problem.neumann_data[edge_index(e)] = random_fn();
        problem.dirichlet_data[edge_index(e)] = random_fn();
    }
    problem.initial = [](double, double) { return 0.0; };
    problem.forcing = random_fn();

    Field u_old{mesh, ArrayXX(n1, n2)};
    ArrayXX u_new(n1, n2);
    for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) {
            u_old.values(i, j) = unit(gen);
            u_new(i, j) = sym(gen);
        }

    const double dt = 0.05;
    const double tau_old = 0.3, tau_new = tau_old + dt;
    const RatioConfig ratio;

    const GhostFrame ghosts = extrapolate_ghost(u_old);
    const RhoField rho = rho_field(u_old, problem.layout, problem, band, tau_old);
    const DriftPair drift = drift_coefficients(par);
    const AssemblyInputs in{u_old, ghosts, rho, problem, par, drift, ratio, dt, tau_old, tau_new};
    auto [M, F] = assemble(in);

    const oracle::Pointwise pw{mesh, u_old.values, u_new, problem, par, band,
                               dt, tau_old, tau_new, ratio.epsilon};

    VectorX x(M.size());
    for (Index j = 1; j <= n2; ++j)
        for (Index i = 1; i <= n1; ++i) x(M.k(i, j)) = u_new(i - 1, j - 1);
    const VectorX mx = M.apply(x);

    double worst = 0.0;
    for (Index j = 1; j <= n2; ++j)
        for (Index i = 1; i <= n1; ++i) {
            const double via_matrix = mx(M.k(i, j)) - F(M.k(i, j));
            const double via_equation = pw.equation(i, j);
            worst = std::max(worst, std::abs(via_matrix - via_equation));
        }
    return worst;
}

}  // namespace corrband
