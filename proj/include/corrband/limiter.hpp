#pragma once

#include "corrband/grid.hpp"
#include "corrband/market.hpp"

#include <cmath>

namespace corrband {

/// Regularisation of gradient ratios: epsilon is added to both numerator and
/// denominator so uniform-flow regions give theta = 1.
struct RatioConfig {
    double epsilon = 1e-30;
};

/// Van Leer limiter Phi(theta) = (|theta| + theta) / (1 + |theta|).
inline double van_leer_phi(double theta) {
    const double a = std::abs(theta);
    return (a + theta) / (1.0 + a);
}

inline double regularized_ratio(double numer, double denom, const RatioConfig& cfg) {
    return (numer + cfg.epsilon) / (denom + cfg.epsilon);
}

namespace detail {

/// Backward slope u_xbar_s at logical index a along the given axis, with the
/// orthogonal index fixed; a may be 1..n+1 (reads the ghost frame at both ends).
inline double backward_slope(const Field& f, const GhostFrame& g, Index a, Index fixed,
                             Axis axis) {
    if (axis == Axis::X1)
        return (ghosted(f, g, a, fixed) - ghosted(f, g, a - 1, fixed)) / f.mesh.h1;
    return (ghosted(f, g, fixed, a) - ghosted(f, g, fixed, a - 1)) / f.mesh.h2;
}

}  // namespace detail

/// Gradient ratio theta_{e_s+1/2} = (u_x_s + eps) / (u_xbar_s + eps) at a node.
inline double gradient_ratio(const Field& f, const GhostFrame& g, Index i, Index j,
                             Axis axis, const RatioConfig& cfg) {
    const Index a = (axis == Axis::X1) ? i : j;
    const Index fixed = (axis == Axis::X1) ? j : i;
    const double fwd = detail::backward_slope(f, g, a + 1, fixed, axis);
    const double bwd = detail::backward_slope(f, g, a, fixed, axis);
    return regularized_ratio(fwd, bwd, cfg);
}

/// Flux-limited upwind weights, each in [0, 2]:
///   Lambda_s^+ = 1 + Phi(theta_{e+1/2}^{-1})/2 - Phi(theta_{e+3/2})/2
///   Lambda_s^- = 1 + Phi(theta_{e+1/2})/2 - Phi(theta_{e-1/2}^{-1})/2
/// The inverse ratios are regularised directly (backward+eps over forward+eps)
/// so the limiter symmetry survives vanishing slopes.
struct LimiterFactors {
    double l1_pos = 1.0, l1_neg = 1.0;
    double l2_pos = 1.0, l2_neg = 1.0;
};

namespace detail {

struct AxisFactors {
    double pos, neg;
};

/// Factors along one axis at logical index a (orthogonal index fixed).
/// At a == 1 the minus factor would need a slope two nodes outside the mesh;
/// at a == n the plus factor would. Those components are never referenced by
/// the scheme (the boundary rows replace them by boundary data) and are
/// returned as 1.
inline AxisFactors axis_factors(const Field& f, const GhostFrame& g, Index a, Index fixed,
                                Axis axis, Index n, const RatioConfig& cfg) {
    auto slope = [&](Index b) { return backward_slope(f, g, b, fixed, axis); };
    AxisFactors out{1.0, 1.0};
    const double s_a = slope(a);
    const double s_a1 = slope(a + 1);  // valid for a <= n
    if (a <= n - 1) {
        const double phi_inv_here = van_leer_phi(regularized_ratio(s_a, s_a1, cfg));
        const double phi_next = van_leer_phi(regularized_ratio(slope(a + 2), s_a1, cfg));
        out.pos = 1.0 + 0.5 * phi_inv_here - 0.5 * phi_next;
    }
    if (a >= 2) {
        const double phi_here = van_leer_phi(regularized_ratio(s_a1, s_a, cfg));
        const double phi_inv_prev = van_leer_phi(regularized_ratio(slope(a - 1), s_a, cfg));
        out.neg = 1.0 + 0.5 * phi_here - 0.5 * phi_inv_prev;
    }
    return out;
}

}  // namespace detail

inline LimiterFactors lambda_factors(const Field& f, const GhostFrame& g, Index i, Index j,
                                     const RatioConfig& cfg) {
    const auto f1 = detail::axis_factors(f, g, i, j, Axis::X1, f.mesh.n1, cfg);
    const auto f2 = detail::axis_factors(f, g, j, i, Axis::X2, f.mesh.n2, cfg);
    return {f1.pos, f1.neg, f2.pos, f2.neg};
}

/// Explicit flux-limited convection at an interior node:
///   A1+ L1+ u_x1 - A1- L1- u_xbar1 + A2+ L2+ u_x2 - A2- L2- u_xbar2.
inline double explicit_convection(const Field& f, const GhostFrame& g, Index i, Index j,
                                  const DriftPair& drift, const RatioConfig& cfg) {
    const LimiterFactors lf = lambda_factors(f, g, i, j, cfg);
    const double ux1 = detail::backward_slope(f, g, i + 1, j, Axis::X1);
    const double uxb1 = detail::backward_slope(f, g, i, j, Axis::X1);
    const double ux2 = detail::backward_slope(f, g, j + 1, i, Axis::X2);
    const double uxb2 = detail::backward_slope(f, g, j, i, Axis::X2);
    return drift.a1_pos * lf.l1_pos * ux1 - drift.a1_neg * lf.l1_neg * uxb1 +
           drift.a2_pos * lf.l2_pos * ux2 - drift.a2_neg * lf.l2_neg * uxb2;
}

}  // namespace corrband
