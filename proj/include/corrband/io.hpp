#pragma once

#include "corrband/stepper.hpp"
#include "corrband/verify.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace corrband {

/// All emitted numerics carry 15 significant digits.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

/// Surface export: `i,j,x1,x2,S1,S2,u`, j outermost to match the row
/// ordering k = i + (j-1) n1.
inline void write_field_csv(std::ostream& os, const Field& f) {
    os << "i,j,x1,x2,S1,S2,u\n";
    const Mesh& m = f.mesh;
    for (Index j = 1; j <= m.n2; ++j)
        for (Index i = 1; i <= m.n1; ++i)
            os << i << ',' << j << ',' << num(m.x1(i)) << ',' << num(m.x2(j)) << ','
               << num(std::exp(m.x1(i))) << ',' << num(std::exp(m.x2(j))) << ','
               << num(f.at(i, j)) << '\n';
}

/// Per-step monitors: `n,tau,min_u,max_norm,p1,p2,p3,p4,solver_iters`.
inline void write_run_report_csv(std::ostream& os, const RunReport& run) {
    os << "n,tau,min_u,max_norm,p1,p2,p3,p4,solver_iters\n";
    int n = 0;
    os << n << ',' << num(0.0) << ',' << num(run.initial_min) << ','
       << num(run.initial_max_norm) << ",1,1,1,1,0\n";
    for (const StepReport& s : run.steps) {
        ++n;
        os << n << ',' << num(s.tau) << ',' << num(s.min_value) << ',' << num(s.max_norm) << ','
           << int(s.p1) << ',' << int(s.p2) << ',' << int(s.p3) << ',' << int(s.p4) << ','
           << s.solve.iterations << '\n';
    }
}

/// Mesh-refinement table: `N,error,rate,runtime_s`. Empty cells where a
/// quantity is undefined (first rate; two-grid error of the finest mesh).
inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "N,error,rate,runtime_s\n";
    for (std::size_t k = 0; k < rep.mesh.size(); ++k) {
        os << rep.mesh[k] << ',';
        if (std::isfinite(rep.error[k])) os << num(rep.error[k]);
        os << ',';
        if (std::isfinite(rep.rate[k])) os << num(rep.rate[k]);
        os << ',' << num(rep.runtime[k]) << '\n';
    }
}

inline std::string convergence_table(const ConvergenceReport& rep) {
    std::ostringstream os;
    const bool two_grid = rep.kind == ConvergenceReport::ErrorKind::TwoGrid;
    os << std::left << std::setw(8) << "N" << std::setw(16)
       << (two_grid ? "two-grid error" : "error") << std::setw(12) << "rate"
       << std::setw(12) << "runtime_s" << '\n';
    for (std::size_t k = 0; k < rep.mesh.size(); ++k) {
        os << std::left << std::setw(8) << rep.mesh[k];
        std::ostringstream e, r;
        if (std::isfinite(rep.error[k])) e << std::scientific << std::setprecision(5) << rep.error[k];
        else e << "-";
        if (std::isfinite(rep.rate[k])) r << std::fixed << std::setprecision(4) << rep.rate[k];
        else r << "-";
        os << std::setw(16) << e.str() << std::setw(12) << r.str() << std::setw(12)
           << std::fixed << std::setprecision(3) << rep.runtime[k] << '\n';
    }
    return os.str();
}

/// Debug dump of the operator in `k,k',value` triplets (matrix entries, not
/// stencil coefficients: off-diagonals carry the compact-form minus sign).
/// Row indices are 1-based.
inline void write_matrix_triplets(std::ostream& os, const SystemMatrix& M, const VectorX& F) {
    os << "k,kp,value\n";
    for (Index j = 1; j <= M.n2; ++j)
        for (Index i = 1; i <= M.n1; ++i) {
            const Index p = M.k(i, j);
            auto put = [&](Index pp, double v) {
                if (v != 0.0) os << p + 1 << ',' << pp + 1 << ',' << num(v) << '\n';
            };
            const StencilRow r = M.row(i, j);
            put(p, r.center);
            if (i < M.n1) put(p + 1, -r.e);
            if (i > 1) put(p - 1, -r.w);
            if (j < M.n2) put(p + M.n1, -r.n);
            if (j > 1) put(p - M.n1, -r.s);
            if (i < M.n1 && j < M.n2) put(p + M.n1 + 1, -r.ne);
            if (i > 1 && j < M.n2) put(p + M.n1 - 1, -r.nw);
            if (i < M.n1 && j > 1) put(p - M.n1 + 1, -r.se);
            if (i > 1 && j > 1) put(p - M.n1 - 1, -r.sw);
        }
    os << "# rhs as k,0,value\n";
    for (Index p = 0; p < M.size(); ++p) os << p + 1 << ",0," << num(F(p)) << '\n';
}

}  // namespace corrband
