#pragma once

#include "corrband/grid.hpp"
#include "corrband/market.hpp"

#include <array>
#include <functional>

namespace corrband {

enum class EdgeKind { Dirichlet, Neumann };

/// Per-edge condition types with the Dirichlet indicators b_Q used by the
/// mesh-aspect-ratio bound.
struct BoundaryLayout {
    std::array<EdgeKind, 4> kinds{EdgeKind::Dirichlet, EdgeKind::Dirichlet,
                                  EdgeKind::Dirichlet, EdgeKind::Dirichlet};

    EdgeKind at(Edge e) const { return kinds[edge_index(e)]; }
    void set(Edge e, EdgeKind k) { kinds[edge_index(e)] = k; }
    bool dirichlet(Edge e) const { return at(e) == EdgeKind::Dirichlet; }
    bool neumann(Edge e) const { return at(e) == EdgeKind::Neumann; }
    int b(Edge e) const { return dirichlet(e) ? 1 : 0; }

    bool any_dirichlet() const {
        for (auto k : kinds)
            if (k == EdgeKind::Dirichlet) return true;
        return false;
    }

    static BoundaryLayout all_dirichlet() { return {}; }
    static BoundaryLayout all_neumann() {
        BoundaryLayout l;
        l.kinds.fill(EdgeKind::Neumann);
        return l;
    }
};

using SpaceFn = std::function<double(double x1, double x2)>;

/// Everything the solver needs about one problem, already in log coordinates:
/// initial data u(.,0), per-edge boundary data, and an optional volume source.
/// Data functions must be evaluable one spacing beyond their edge (the corner
/// closures sample ghost coordinates).
struct ProblemBindings {
    BoundaryLayout layout;
    std::array<LogSpaceFn, 4> neumann_data{};    // g1' per edge, outward flux
    std::array<LogSpaceFn, 4> dirichlet_data{};  // g2' per edge
    SpaceFn initial;
    LogSpaceFn forcing;  // optional; empty means zero

    const LogSpaceFn& g1(Edge e) const { return neumann_data[edge_index(e)]; }
    const LogSpaceFn& g2(Edge e) const { return dirichlet_data[edge_index(e)]; }

    void validate() const {
        require(static_cast<bool>(initial), "problem: initial data missing");
        for (Edge e : {Edge::West, Edge::East, Edge::South, Edge::North}) {
            if (layout.neumann(e))
                require(static_cast<bool>(g1(e)), "problem: Neumann data missing");
            else
                require(static_cast<bool>(g2(e)), "problem: Dirichlet data missing");
        }
        require(layout.any_dirichlet(), "problem: at least one Dirichlet edge required");
    }
};

}  // namespace corrband
