#pragma once

#include "corrband/limiter.hpp"
#include "corrband/problem.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace corrband {

/// One row of the compact form: C_center u_{i,j} - sum C_nb u_nb = f.
/// Neighbors are named geographically: e = (i+1,j), n = (i,j+1), ne = (i+1,j+1), ...
struct StencilRow {
    double center = 0;
    double e = 0, w = 0, n = 0, s = 0;
    double ne = 0, nw = 0, se = 0, sw = 0;
    double f = 0;

    double neighbor_sum() const { return e + w + n + s + ne + nw + se + sw; }
    double neighbor_abs_sum() const {
        return std::abs(e) + std::abs(w) + std::abs(n) + std::abs(s) + std::abs(ne) +
               std::abs(nw) + std::abs(se) + std::abs(sw);
    }
    double min_neighbor() const {
        return std::min({e, w, n, s, ne, nw, se, sw});
    }
};

/// Nine-band operator stored by diagonal, row ordering k = i + (j-1) n1.
struct SystemMatrix {
    Index n1 = 0, n2 = 0;
    ArrayX center, e, w, n, s, ne, nw, se, sw;

    static SystemMatrix zero(Index n1, Index n2) {
        SystemMatrix m;
        m.n1 = n1;
        m.n2 = n2;
        const Index sz = n1 * n2;
        for (ArrayX* a : {&m.center, &m.e, &m.w, &m.n, &m.s, &m.ne, &m.nw, &m.se, &m.sw})
            *a = ArrayX::Zero(sz);
        return m;
    }

    Index size() const { return n1 * n2; }
    Index k(Index i, Index j) const { return (i - 1) + (j - 1) * n1; }  // 0-based

    void set_row(Index i, Index j, const StencilRow& r) {
        const Index p = k(i, j);
        center(p) = r.center;
        e(p) = r.e; w(p) = r.w; n(p) = r.n; s(p) = r.s;
        ne(p) = r.ne; nw(p) = r.nw; se(p) = r.se; sw(p) = r.sw;
    }

    StencilRow row(Index i, Index j) const {
        const Index p = k(i, j);
        StencilRow r;
        r.center = center(p);
        r.e = e(p); r.w = w(p); r.n = n(p); r.s = s(p);
        r.ne = ne(p); r.nw = nw(p); r.se = se(p); r.sw = sw(p);
        return r;
    }

    /// y = M x with the compact-form sign convention.
    VectorX apply(const VectorX& x) const {
        VectorX y(size());
        for (Index j = 1; j <= n2; ++j) {
            for (Index i = 1; i <= n1; ++i) {
                const Index p = k(i, j);
                double acc = center(p) * x(p);
                if (i < n1) acc -= e(p) * x(p + 1);
                if (i > 1) acc -= w(p) * x(p - 1);
                if (j < n2) acc -= n(p) * x(p + n1);
                if (j > 1) acc -= s(p) * x(p - n1);
                if (i < n1 && j < n2) acc -= ne(p) * x(p + n1 + 1);
                if (i > 1 && j < n2) acc -= nw(p) * x(p + n1 - 1);
                if (i < n1 && j > 1) acc -= se(p) * x(p - n1 + 1);
                if (i > 1 && j > 1) acc -= sw(p) * x(p - n1 - 1);
                y(p) = acc;
            }
        }
        return y;
    }
};

enum class RowKind {
    Interior,
    EdgeWest, EdgeEast, EdgeSouth, EdgeNorth,
    CornerNW, CornerNE, CornerSE, CornerSW,
    DirichletNode,
};

/// Row classification. A corner touching at least one Dirichlet edge is a
/// Dirichlet node; the two-Neumann closures apply only where both edges are
/// Neumann.
inline RowKind classify(Index i, Index j, Index n1, Index n2, const BoundaryLayout& l) {
    const bool west = (i == 1), east = (i == n1), south = (j == 1), north = (j == n2);
    if (!west && !east && !south && !north) return RowKind::Interior;
    if (west && north)
        return (l.neumann(Edge::West) && l.neumann(Edge::North)) ? RowKind::CornerNW
                                                                 : RowKind::DirichletNode;
    if (east && north)
        return (l.neumann(Edge::East) && l.neumann(Edge::North)) ? RowKind::CornerNE
                                                                 : RowKind::DirichletNode;
    if (east && south)
        return (l.neumann(Edge::East) && l.neumann(Edge::South)) ? RowKind::CornerSE
                                                                 : RowKind::DirichletNode;
    if (west && south)
        return (l.neumann(Edge::West) && l.neumann(Edge::South)) ? RowKind::CornerSW
                                                                 : RowKind::DirichletNode;
    if (west) return l.neumann(Edge::West) ? RowKind::EdgeWest : RowKind::DirichletNode;
    if (east) return l.neumann(Edge::East) ? RowKind::EdgeEast : RowKind::DirichletNode;
    if (south) return l.neumann(Edge::South) ? RowKind::EdgeSouth : RowKind::DirichletNode;
    return l.neumann(Edge::North) ? RowKind::EdgeNorth : RowKind::DirichletNode;
}

/// Which edge supplies g2' at a Dirichlet node. Where two Dirichlet edges
/// meet the precedence is W, E, S, N.
inline Edge dirichlet_edge_for(Index i, Index j, Index n1, Index n2,
                               const BoundaryLayout& l) {
    if (i == 1 && l.dirichlet(Edge::West)) return Edge::West;
    if (i == n1 && l.dirichlet(Edge::East)) return Edge::East;
    if (j == 1 && l.dirichlet(Edge::South)) return Edge::South;
    if (j == n2 && l.dirichlet(Edge::North)) return Edge::North;
    throw Error("dirichlet_edge_for: node is not on a Dirichlet edge");
}

/// Per-node correlation splits, frozen at the old time level.
struct RhoField {
    ArrayXX pos, neg;  // n1 x n2

    RhoSplit at(Index i, Index j) const { return {pos(i - 1, j - 1), neg(i - 1, j - 1)}; }
};

/// Correlation switch per node: interior nodes use the sign of the centred
/// mixed difference of the old field; Neumann edge nodes use the tangential
/// derivative of g1' with the edge's outward sign; two-Neumann corners
/// average the two edge readings. Dirichlet rows never read rho and get the
/// tie-break value.
inline RhoField rho_field(const Field& old_field, const BoundaryLayout& layout,
                          const ProblemBindings& problem, const CorrelationBand& band,
                          double tau_old) {
    const Mesh& m = old_field.mesh;
    const Index n1 = m.n1, n2 = m.n2;
    RhoField rf{ArrayXX(n1, n2), ArrayXX(n1, n2)};

    auto g1 = [&](Edge e, Index i, Index j) {
        return problem.g1(e)(m.x1(i), m.x2(j), tau_old);
    };
    // Centred tangential derivatives of the edge data; corner evaluation
    // samples one spacing beyond the domain.
    auto dn_dx1 = [&](Index i) { return (g1(Edge::North, i + 1, n2) - g1(Edge::North, i - 1, n2)) / (2.0 * m.h1); };
    auto ds_dx1 = [&](Index i) { return (g1(Edge::South, i + 1, 1) - g1(Edge::South, i - 1, 1)) / (2.0 * m.h1); };
    auto dw_dx2 = [&](Index j) { return (g1(Edge::West, 1, j + 1) - g1(Edge::West, 1, j - 1)) / (2.0 * m.h2); };
    auto de_dx2 = [&](Index j) { return (g1(Edge::East, n1, j + 1) - g1(Edge::East, n1, j - 1)) / (2.0 * m.h2); };

    for (Index j = 1; j <= n2; ++j) {
        for (Index i = 1; i <= n1; ++i) {
            double gamma = 0.0;
            switch (classify(i, j, n1, n2, layout)) {
                case RowKind::Interior:
                    gamma = old_field.at(i + 1, j + 1) - old_field.at(i - 1, j + 1) -
                            old_field.at(i + 1, j - 1) + old_field.at(i - 1, j - 1);
                    break;
                case RowKind::EdgeWest: gamma = -dw_dx2(j); break;
                case RowKind::EdgeEast: gamma = de_dx2(j); break;
                case RowKind::EdgeNorth: gamma = dn_dx1(i); break;
                case RowKind::EdgeSouth: gamma = -ds_dx1(i); break;
                case RowKind::CornerNW: gamma = dn_dx1(1) - dw_dx2(n2); break;
                case RowKind::CornerNE: gamma = dn_dx1(n1) + de_dx2(n2); break;
                case RowKind::CornerSE: gamma = de_dx2(1) - ds_dx1(n1); break;
                case RowKind::CornerSW: gamma = -dw_dx2(1) - ds_dx1(1); break;
                case RowKind::DirichletNode: gamma = 0.0; break;
            }
            const RhoSplit r = select_rho(sign_class(gamma), band);
            rf.pos(i - 1, j - 1) = r.pos;
            rf.neg(i - 1, j - 1) = r.neg;
        }
    }
    return rf;
}

/// Mixed-derivative discretisation at inner nodes. SignSwitched is the
/// positivity-preserving pair of one-sided stencils selected by the
/// correlation switch; Centered applies the four-point centred stencil with
/// the switched coefficient. Centered forfeits the sign structure of the
/// operator (off-diagonals may turn positive) but removes the
/// |rho| h1 h2 / 4 * u_xxyy component of the truncation error; it is the
/// variant that matches the published convergence tables.
enum class MixedStencil { SignSwitched, Centered };

/// Everything one time step's operator build needs.
struct AssemblyInputs {
    const Field& old_field;
    const GhostFrame& ghosts;
    const RhoField& rho;
    const ProblemBindings& problem;
    MarketParams params;
    DriftPair drift;
    RatioConfig ratio;
    double dt;
    double tau_old;   // old time level (explicit side)
    double tau_new;   // new time level (boundary data and forcing)
    MixedStencil stencil = MixedStencil::SignSwitched;
};

namespace detail {

/// Retained explicit convection terms; each flag keeps one of the four
/// limited upwind terms (boundary rows drop the term that the discrete
/// Neumann condition replaces by boundary data).
inline double convection_masked(const AssemblyInputs& in, Index i, Index j, bool fwd1,
                                bool bwd1, bool fwd2, bool bwd2) {
    const Field& f = in.old_field;
    const GhostFrame& g = in.ghosts;
    const LimiterFactors lf = lambda_factors(f, g, i, j, in.ratio);
    double acc = 0.0;
    if (fwd1) acc += in.drift.a1_pos * lf.l1_pos * backward_slope(f, g, i + 1, j, Axis::X1);
    if (bwd1) acc -= in.drift.a1_neg * lf.l1_neg * backward_slope(f, g, i, j, Axis::X1);
    if (fwd2) acc += in.drift.a2_pos * lf.l2_pos * backward_slope(f, g, j + 1, i, Axis::X2);
    if (bwd2) acc -= in.drift.a2_neg * lf.l2_neg * backward_slope(f, g, j, i, Axis::X2);
    return acc;
}

inline double forcing_at(const AssemblyInputs& in, Index i, Index j) {
    if (!in.problem.forcing) return 0.0;
    const Mesh& m = in.old_field.mesh;
    return in.problem.forcing(m.x1(i), m.x2(j), in.tau_new);
}

/// Boundary data at the new time level, by node index (may step one node
/// beyond the edge ends).
inline double ghat(const AssemblyInputs& in, Edge e, Index i, Index j) {
    const Mesh& m = in.old_field.mesh;
    return in.problem.g1(e)(m.x1(i), m.x2(j), in.tau_new);
}

}  // namespace detail

/// Inner-node row of the fully discrete scheme. The non-boundary pattern is
/// applied at every row with 2 <= i <= n1-1, 2 <= j <= n2-1; extrapolated
/// ghosts enter only through the explicit convection factors.
inline StencilRow interior_row(const AssemblyInputs& in, Index i, Index j) {
    const Mesh& m = in.old_field.mesh;
    const RhoSplit rho = in.rho.at(i, j);
    const double s1 = in.params.sigma1, s2 = in.params.sigma2;
    const double a1 = s1 * s1 / (2.0 * m.h1 * m.h1);
    const double a2 = s2 * s2 / (2.0 * m.h2 * m.h2);
    const double mix = s1 * s2 / (2.0 * m.h1 * m.h2);

    StencilRow r;
    if (in.stencil == MixedStencil::SignSwitched) {
        r.center = 1.0 / in.dt + in.params.r + 2.0 * a1 + 2.0 * a2 - 2.0 * mix * rho.abs();
        r.e = r.w = a1 - mix * rho.abs();
        r.n = r.s = a2 - mix * rho.abs();
        r.ne = r.sw = mix * rho.pos;  // main-diagonal corners
        r.nw = r.se = mix * rho.neg;  // anti-diagonal corners
    } else {
        r.center = 1.0 / in.dt + in.params.r + 2.0 * a1 + 2.0 * a2;
        r.e = r.w = a1;
        r.n = r.s = a2;
        r.ne = r.sw = 0.5 * mix * rho.value();
        r.nw = r.se = -0.5 * mix * rho.value();
    }
    r.f = in.old_field.at(i, j) / in.dt +
          detail::convection_masked(in, i, j, true, true, true, true) +
          detail::forcing_at(in, i, j);
    return r;
}

/// Neumann edge row (non-corner). Boundary data enters the right-hand side
/// at the new time level.
inline StencilRow edge_row(const AssemblyInputs& in, Edge edge, Index i, Index j) {
    const Mesh& m = in.old_field.mesh;
    require(in.problem.layout.neumann(edge), "edge_row: edge is not Neumann");
    const Index n1 = m.n1, n2 = m.n2;
    const RhoSplit rho = in.rho.at(i, j);
    const double s1 = in.params.sigma1, s2 = in.params.sigma2;
    const double a1 = s1 * s1 / (2.0 * m.h1 * m.h1);
    const double a2 = s2 * s2 / (2.0 * m.h2 * m.h2);
    const double mix = s1 * s2 / (2.0 * m.h1 * m.h2);
    const double q = s1 * s2;
    const double rabs = rho.abs();

    StencilRow r;
    r.center = 1.0 / in.dt + in.params.r + 2.0 * a1 + 2.0 * a2 - 2.0 * mix * rabs;
    const double u_dt = in.old_field.at(i, j) / in.dt + detail::forcing_at(in, i, j);
    auto gh = [&](Index a, Index b) { return detail::ghat(in, edge, a, b); };

    switch (edge) {
        case Edge::West: {
            r.e = 2.0 * a1 - 2.0 * mix * rabs;
            r.n = r.s = a2 - mix * rabs;
            r.ne = r.se = mix * rabs;
            r.f = u_dt + detail::convection_masked(in, i, j, true, false, true, true) +
                  (in.drift.a1_neg + 2.0 * a1 * m.h1 - q * rabs / m.h2) * gh(1, j) +
                  (q * rho.pos / m.h2) * gh(1, j - 1) + (q * rho.neg / m.h2) * gh(1, j + 1);
            break;
        }
        case Edge::East: {
            r.w = 2.0 * a1 - 2.0 * mix * rabs;
            r.n = r.s = a2 - mix * rabs;
            r.nw = r.sw = mix * rabs;
            r.f = u_dt + detail::convection_masked(in, i, j, false, true, true, true) +
                  (in.drift.a1_pos + 2.0 * a1 * m.h1 - q * rabs / m.h2) * gh(n1, j) +
                  (q * rho.pos / m.h2) * gh(n1, j + 1) + (q * rho.neg / m.h2) * gh(n1, j - 1);
            break;
        }
        case Edge::South: {
            r.n = 2.0 * a2 - 2.0 * mix * rabs;
            r.e = r.w = a1 - mix * rabs;
            r.ne = r.nw = mix * rabs;
            r.f = u_dt + detail::convection_masked(in, i, j, true, true, true, false) +
                  (in.drift.a2_neg + 2.0 * a2 * m.h2 - q * rabs / m.h1) * gh(i, 1) +
                  (q * rho.pos / m.h1) * gh(i - 1, 1) + (q * rho.neg / m.h1) * gh(i + 1, 1);
            break;
        }
        case Edge::North: {
            r.s = 2.0 * a2 - 2.0 * mix * rabs;
            r.e = r.w = a1 - mix * rabs;
            r.se = r.sw = mix * rabs;
            r.f = u_dt + detail::convection_masked(in, i, j, true, true, false, true) +
                  (in.drift.a2_pos + 2.0 * a2 * m.h2 - q * rabs / m.h1) * gh(i, n2) +
                  (q * rho.pos / m.h1) * gh(i + 1, n2) + (q * rho.neg / m.h1) * gh(i - 1, n2);
            break;
        }
    }
    return r;
}

enum class Corner { NW, NE, SE, SW };

/// Two-Neumann corner closure. The doubly fictitious node is eliminated with
/// the average of the two elimination orders, which is what places the
/// half-weighted data samples at the ghost coordinates.
inline StencilRow corner_row(const AssemblyInputs& in, Corner c) {
    const Mesh& m = in.old_field.mesh;
    const Index n1 = m.n1, n2 = m.n2;
    const double s1 = in.params.sigma1, s2 = in.params.sigma2;
    const double a1 = s1 * s1 / (2.0 * m.h1 * m.h1);
    const double a2 = s2 * s2 / (2.0 * m.h2 * m.h2);
    const double mix = s1 * s2 / (2.0 * m.h1 * m.h2);
    const double q = s1 * s2;

    const Index i = (c == Corner::NE || c == Corner::SE) ? n1 : 1;
    const Index j = (c == Corner::NW || c == Corner::NE) ? n2 : 1;
    const RhoSplit rho = in.rho.at(i, j);
    const double rabs = rho.abs();

    // Edge supplying data for each direction: x1-normal edge (W or E) and
    // x2-normal edge (S or N).
    const Edge ex1 = (i == n1) ? Edge::East : Edge::West;
    const Edge ex2 = (j == n2) ? Edge::North : Edge::South;
    require(in.problem.layout.neumann(ex1) && in.problem.layout.neumann(ex2),
            "corner_row: both touching edges must be Neumann");
    auto gh1 = [&](Index a, Index b) { return detail::ghat(in, ex1, a, b); };  // W/E data
    auto gh2 = [&](Index a, Index b) { return detail::ghat(in, ex2, a, b); };  // S/N data

    const double a1_repl = (i == n1) ? in.drift.a1_pos : in.drift.a1_neg;
    const double a2_repl = (j == n2) ? in.drift.a2_pos : in.drift.a2_neg;
    const Index di = (i == n1) ? -1 : 1;  // offset toward the interior in x1
    const Index dj = (j == n2) ? -1 : 1;  // and in x2

    StencilRow r;
    r.center = 1.0 / in.dt + in.params.r + 2.0 * a1 + 2.0 * a2 - 2.0 * mix * rabs;
    const double ax1 = 2.0 * a1 - 2.0 * mix * rabs;  // coupling to (i+di, j)
    const double ax2 = 2.0 * a2 - 2.0 * mix * rabs;  // coupling to (i, j+dj)
    const double adiag = 2.0 * mix * rabs;           // coupling to (i+di, j+dj)
    if (di > 0) r.e = ax1; else r.w = ax1;
    if (dj > 0) r.n = ax2; else r.s = ax2;
    if (di > 0 && dj > 0) r.ne = adiag;
    if (di > 0 && dj < 0) r.se = adiag;
    if (di < 0 && dj > 0) r.nw = adiag;
    if (di < 0 && dj < 0) r.sw = adiag;

    // The single-ghost eliminations give weight 1/h_t to the rho component
    // whose mixed stencil stays on the corner's inside diagonal; the averaged
    // double ghost contributes half weights at the ghost coordinates to the
    // other component. At NE/SW the inside diagonal is the main one (rho+
    // doubled at NE via the double ghost, rho- via single ghosts); NW/SE swap
    // the roles.
    const bool main_diagonal_corner = (c == Corner::NE || c == Corner::SW);
    const double rho_single = main_diagonal_corner ? rho.neg : rho.pos;
    const double rho_double = main_diagonal_corner ? rho.pos : rho.neg;

    double f = in.old_field.at(i, j) / in.dt;
    f += detail::convection_masked(in, i, j, i == 1, i == n1, j == 1, j == n2);
    f += (a1_repl + 2.0 * a1 * m.h1 - q * rabs / m.h2) * gh1(i, j);
    f += (a2_repl + 2.0 * a2 * m.h2 - q * rabs / m.h1) * gh2(i, j);
    // Tangential samples of the x1-normal edge data (offsets along x2).
    f += (q * rho_single / m.h2) * gh1(i, j + dj) +
         (q * rho_double / (2.0 * m.h2)) * (gh1(i, j + dj) + gh1(i, j - dj));
    // Tangential samples of the x2-normal edge data (offsets along x1).
    f += (q * rho_single / m.h1) * gh2(i + di, j) +
         (q * rho_double / (2.0 * m.h1)) * (gh2(i + di, j) + gh2(i - di, j));
    f += detail::forcing_at(in, i, j);
    r.f = f;
    return r;
}

inline StencilRow dirichlet_row(const AssemblyInputs& in, Index i, Index j) {
    const Mesh& m = in.old_field.mesh;
    const Edge e = dirichlet_edge_for(i, j, m.n1, m.n2, in.problem.layout);
    StencilRow r;
    r.center = 1.0;
    r.f = in.problem.g2(e)(m.x1(i), m.x2(j), in.tau_new);
    return r;
}

/// Assemble the full nine-band system for one time step.
inline std::pair<SystemMatrix, VectorX> assemble(const AssemblyInputs& in) {
    const Mesh& m = in.old_field.mesh;
    const Index n1 = m.n1, n2 = m.n2;
    SystemMatrix M = SystemMatrix::zero(n1, n2);
    VectorX F(n1 * n2);
    for (Index j = 1; j <= n2; ++j) {
        for (Index i = 1; i <= n1; ++i) {
            StencilRow r;
            switch (classify(i, j, n1, n2, in.problem.layout)) {
                case RowKind::Interior: r = interior_row(in, i, j); break;
                case RowKind::EdgeWest: r = edge_row(in, Edge::West, i, j); break;
                case RowKind::EdgeEast: r = edge_row(in, Edge::East, i, j); break;
                case RowKind::EdgeSouth: r = edge_row(in, Edge::South, i, j); break;
                case RowKind::EdgeNorth: r = edge_row(in, Edge::North, i, j); break;
                case RowKind::CornerNW: r = corner_row(in, Corner::NW); break;
                case RowKind::CornerNE: r = corner_row(in, Corner::NE); break;
                case RowKind::CornerSE: r = corner_row(in, Corner::SE); break;
                case RowKind::CornerSW: r = corner_row(in, Corner::SW); break;
                case RowKind::DirichletNode: r = dirichlet_row(in, i, j); break;
            }
            M.set_row(i, j, r);
            F(M.k(i, j)) = r.f;
        }
    }
    return {std::move(M), std::move(F)};
}

/// Mesh-aspect-ratio admissibility:
///   (s1/s2) rho* <= h1/h2 <= s1/(s2 rho*),
/// with rho* the largest |rho| the switch can select on the rows that are
/// actually assembled (all of them unless every boundary is Dirichlet and
/// the mesh is degenerate). Margin is multiplicative distance to the nearer
/// bound; a vanishing rho* makes the bounds vacuous.
struct RatioCheck {
    bool pass = true;
    double ratio = 1;
    double lower = 0;
    double upper = std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
};

inline RatioCheck mesh_ratio_check(const MarketParams& params, const CorrelationBand& band,
                                   const BoundaryLayout& layout, double h1, double h2,
                                   Index n1, Index n2) {
    RatioCheck c;
    c.ratio = h1 / h2;
    const Index i_lo = 1 + layout.b(Edge::West), i_hi = n1 - layout.b(Edge::East);
    const Index j_lo = 1 + layout.b(Edge::South), j_hi = n2 - layout.b(Edge::North);
    const bool any_switched_row = (i_lo <= i_hi) && (j_lo <= j_hi);
    const double rho_star = any_switched_row ? band.max_abs() : 0.0;
    if (rho_star == 0.0) return c;

    c.lower = (params.sigma1 / params.sigma2) * rho_star;
    c.upper = params.sigma1 / (params.sigma2 * rho_star);
    c.margin = std::min(c.ratio / c.lower, c.upper / c.ratio);
    // Equality is admissible; allow for rounding in h1/h2.
    c.pass = c.margin >= 1.0 - 1e-12;
    return c;
}

/// M-matrix / right-hand-side diagnostics (reporting only).
struct PositivityReport {
    bool p1 = true;  // diagonal dominance
    bool p2 = true;  // all neighbor coefficients >= 0
    bool p3 = true;  // positive diagonal
    bool p4 = true;  // F >= 0
    double worst_dominance = std::numeric_limits<double>::infinity();
    double worst_neighbor = 0;
    double worst_diagonal = std::numeric_limits<double>::infinity();
    double worst_rhs = 0;
    Index row_p1 = -1, row_p2 = -1, row_p3 = -1, row_p4 = -1;

    bool all() const { return p1 && p2 && p3 && p4; }
};

inline PositivityReport verify_positivity_conditions(const SystemMatrix& M, const VectorX& F) {
    PositivityReport rep;
    const double f_scale = std::max(1.0, F.lpNorm<Eigen::Infinity>());
    for (Index j = 1; j <= M.n2; ++j) {
        for (Index i = 1; i <= M.n1; ++i) {
            const StencilRow r = M.row(i, j);
            const Index p = M.k(i, j);
            const double dom = std::abs(r.center) - r.neighbor_abs_sum();
            if (dom < rep.worst_dominance) { rep.worst_dominance = dom; rep.row_p1 = p; }
            const double mn = r.min_neighbor();
            if (mn < rep.worst_neighbor) { rep.worst_neighbor = mn; rep.row_p2 = p; }
            if (r.center < rep.worst_diagonal) { rep.worst_diagonal = r.center; rep.row_p3 = p; }
            if (F(p) < rep.worst_rhs) { rep.worst_rhs = F(p); rep.row_p4 = p; }
        }
    }
    // Slack below is pure rounding of sums whose terms are O(|C_center|).
    const double tol_c = 1e-13 * std::max(1.0, M.center.abs().maxCoeff());
    rep.p1 = rep.worst_dominance >= -tol_c;
    rep.p2 = rep.worst_neighbor >= -tol_c;
    rep.p3 = rep.worst_diagonal > 0.0;
    rep.p4 = rep.worst_rhs >= -1e-12 * f_scale;
    return rep;
}

/// Largest relative deviation of the non-Dirichlet dominance slack
/// C_center - sum(C_nb) from its exact value 1/dt + r.
inline double interior_slack_deviation(const SystemMatrix& M, const BoundaryLayout& layout,
                                       double dt, double r) {
    const double expected = 1.0 / dt + r;
    double worst = 0.0;
    for (Index j = 1; j <= M.n2; ++j) {
        for (Index i = 1; i <= M.n1; ++i) {
            if (classify(i, j, M.n1, M.n2, layout) == RowKind::DirichletNode) continue;
            const StencilRow row = M.row(i, j);
            const double slack = row.center - row.neighbor_sum();
            worst = std::max(worst, std::abs(slack - expected) / expected);
        }
    }
    return worst;
}

}  // namespace corrband
