#pragma once

#include "corrband/types.hpp"

#include <cmath>
#include <functional>

namespace corrband {

/// Uniform mesh on [x1_min,x1_max] x [x2_min,x2_max] with 1-based node
/// indices: x1_i = x1_min + (i-1) h1, i = 1..n1, and likewise for x2.
struct Mesh {
    double x1_min = 0, x1_max = 1;
    double x2_min = 0, x2_max = 1;
    Index n1 = 3, n2 = 3;
    double h1 = 0.5, h2 = 0.5;

    static Mesh make(double x1_lo, double x1_hi, double x2_lo, double x2_hi,
                     Index n1, Index n2) {
        require(n1 >= 3 && n2 >= 3, "mesh: need at least 3 nodes per direction");
        require(x1_hi > x1_lo && x2_hi > x2_lo, "mesh: bounds must be increasing");
        Mesh m;
        m.x1_min = x1_lo; m.x1_max = x1_hi;
        m.x2_min = x2_lo; m.x2_max = x2_hi;
        m.n1 = n1; m.n2 = n2;
        m.h1 = (x1_hi - x1_lo) / static_cast<double>(n1 - 1);
        m.h2 = (x2_hi - x2_lo) / static_cast<double>(n2 - 1);
        return m;
    }

    /// Square mesh over [lo,hi]^2 with n nodes per direction.
    static Mesh square(double lo, double hi, Index n) {
        return make(lo, hi, lo, hi, n, n);
    }

    double x1(Index i) const { return x1_min + static_cast<double>(i - 1) * h1; }
    double x2(Index j) const { return x2_min + static_cast<double>(j - 1) * h2; }
    Index size() const { return n1 * n2; }

    bool same_as(const Mesh& o) const {
        return n1 == o.n1 && n2 == o.n2 && x1_min == o.x1_min && x1_max == o.x1_max &&
               x2_min == o.x2_min && x2_max == o.x2_max;
    }
};

/// Node-indexed values u_{i,j} on a mesh. Storage is column-major with n1
/// rows, so the flattened vector matches the row ordering k = i + (j-1) n1.
struct Field {
    Mesh mesh;
    ArrayXX values;  // n1 x n2, values(i-1, j-1) = u_{i,j}

    double& at(Index i, Index j) { return values(i - 1, j - 1); }
    double at(Index i, Index j) const { return values(i - 1, j - 1); }

    static Field constant(const Mesh& m, double v) {
        Field f{m, ArrayXX::Constant(m.n1, m.n2, v)};
        return f;
    }

    static Field from_function(const Mesh& m, const std::function<double(double, double)>& fn) {
        Field f{m, ArrayXX(m.n1, m.n2)};
        for (Index j = 1; j <= m.n2; ++j)
            for (Index i = 1; i <= m.n1; ++i)
                f.at(i, j) = fn(m.x1(i), m.x2(j));
        return f;
    }

    double max_norm() const { return values.abs().maxCoeff(); }
    double min_value() const { return values.minCoeff(); }
    bool all_finite() const { return values.isFinite().all(); }

    /// Flat view matching the system ordering k = i + (j-1) n1 (1-based k).
    Eigen::Map<const VectorX> flat() const {
        return Eigen::Map<const VectorX>(values.data(), values.size());
    }
    Eigen::Map<VectorX> flat() {
        return Eigen::Map<VectorX>(values.data(), values.size());
    }
};

/// Extrapolated values one spacing outside the mesh: row i=0 (west), row
/// i=n1+1 (east), column j=0 (south), column j=n2+1 (north). Frame corners
/// (e.g. i=0, j=0) are never needed and not stored.
struct GhostFrame {
    VectorX west, east;    // indexed by j = 1..n2
    VectorX south, north;  // indexed by i = 1..n1

    double west_at(Index j) const { return west(j - 1); }
    double east_at(Index j) const { return east(j - 1); }
    double south_at(Index i) const { return south(i - 1); }
    double north_at(Index i) const { return north(i - 1); }
};

/// Second-order extrapolation u_0 = 3u_1 - 3u_2 + u_3 on every edge,
/// exact for quadratics.
inline GhostFrame extrapolate_ghost(const Field& f) {
    const Mesh& m = f.mesh;
    require(m.n1 >= 3 && m.n2 >= 3, "extrapolate_ghost: need 3 interior nodes");
    const ArrayXX& u = f.values;
    GhostFrame g;
    g.west = (3.0 * u.row(0) - 3.0 * u.row(1) + u.row(2)).matrix().transpose();
    g.east = (3.0 * u.row(m.n1 - 1) - 3.0 * u.row(m.n1 - 2) + u.row(m.n1 - 3)).matrix().transpose();
    g.south = (3.0 * u.col(0) - 3.0 * u.col(1) + u.col(2)).matrix();
    g.north = (3.0 * u.col(m.n2 - 1) - 3.0 * u.col(m.n2 - 2) + u.col(m.n2 - 3)).matrix();
    return g;
}

/// Field value extended by the ghost frame. Exactly one index may step one
/// node outside the mesh.
inline double ghosted(const Field& f, const GhostFrame& g, Index i, Index j) {
    const Mesh& m = f.mesh;
    if (i >= 1 && i <= m.n1 && j >= 1 && j <= m.n2) return f.at(i, j);
    if (i == 0 && j >= 1 && j <= m.n2) return g.west_at(j);
    if (i == m.n1 + 1 && j >= 1 && j <= m.n2) return g.east_at(j);
    if (j == 0 && i >= 1 && i <= m.n1) return g.south_at(i);
    if (j == m.n2 + 1 && i >= 1 && i <= m.n1) return g.north_at(i);
    throw std::out_of_range("ghosted: index outside mesh and ghost frame");
}

enum class Axis { X1, X2 };

enum class DiffKind {
    Backward1,     // u_xbar
    Forward1,      // u_x
    Central1,      // u_ox
    Second,        // u_xbarx
    MixedMinus,    // (u_xbar1x2 + u_x1xbar2)/2
    MixedPlus,     // (u_x1x2 + u_xbar1xbar2)/2
    MixedCentral,  // (u_ox1)_ox2
};

/// Divided differences of the scheme. Stencils that exit the mesh read the
/// ghost frame when one is supplied and throw otherwise.
inline double diff(const Field& f, const GhostFrame* g, Index i, Index j,
                   DiffKind kind, Axis axis = Axis::X1) {
    const Mesh& m = f.mesh;
    const double h1 = m.h1, h2 = m.h2;
    auto u = [&](Index a, Index b) -> double {
        if (a >= 1 && a <= m.n1 && b >= 1 && b <= m.n2) return f.at(a, b);
        require(g != nullptr, "diff: stencil exits mesh and no ghost frame supplied");
        return ghosted(f, *g, a, b);
    };
    const bool x1 = (axis == Axis::X1);
    const double h = x1 ? h1 : h2;
    auto shift = [&](Index d) { return x1 ? u(i + d, j) : u(i, j + d); };
    switch (kind) {
        case DiffKind::Backward1:
            return (shift(0) - shift(-1)) / h;
        case DiffKind::Forward1:
            return (shift(1) - shift(0)) / h;
        case DiffKind::Central1:
            return (shift(1) - shift(-1)) / (2.0 * h);
        case DiffKind::Second:
            return (shift(1) - 2.0 * shift(0) + shift(-1)) / (h * h);
        case DiffKind::MixedMinus:
            // (u_xbar1x2 + u_x1xbar2)/2: anti-diagonal corner stencil.
            return 0.5 *
                   ((u(i, j + 1) - u(i - 1, j + 1) - u(i, j) + u(i - 1, j)) +
                    (u(i + 1, j) - u(i, j) - u(i + 1, j - 1) + u(i, j - 1))) /
                   (h1 * h2);
        case DiffKind::MixedPlus:
            // (u_x1x2 + u_xbar1xbar2)/2: main-diagonal corner stencil.
            return 0.5 *
                   ((u(i + 1, j + 1) - u(i, j + 1) - u(i + 1, j) + u(i, j)) +
                    (u(i, j) - u(i - 1, j) - u(i, j - 1) + u(i - 1, j - 1))) /
                   (h1 * h2);
        case DiffKind::MixedCentral:
            return (u(i + 1, j + 1) - u(i - 1, j + 1) - u(i + 1, j - 1) + u(i - 1, j - 1)) /
                   (4.0 * h1 * h2);
    }
    throw Error("diff: unknown kind");
}

}  // namespace corrband
