#pragma once

#include "corrband/assembly.hpp"

#include <chrono>
#include <optional>

namespace corrband {

enum class SolveMethod { DirectBanded, StationaryIterative };

struct SolveStats {
    int iterations = 0;         // sweeps; 0 for the direct solver
    double residual = 0;        // final ||M x - F||_inf
    double seconds = 0;
};

struct SolveOptions {
    SolveMethod method = SolveMethod::StationaryIterative;
    double tol = 1e-12;
    int max_iter = 10000;
};

namespace detail {

/// Point Gauss-Seidel with immediate updates, fixed ascending sweep order.
/// The dominance slack 1/dt + r makes this a fast contraction for every
/// admissible system.
inline SolveStats gauss_seidel(const SystemMatrix& M, const VectorX& F, VectorX& x,
                               double tol, int max_iter) {
    const Index n1 = M.n1, n2 = M.n2;
    const double f_norm = F.lpNorm<Eigen::Infinity>();
    const double target = tol * std::max(f_norm, 1e-300);
    std::vector<double> history;
    SolveStats stats;

    const double* ce = M.e.data();
    const double* cw = M.w.data();
    const double* cn = M.n.data();
    const double* cs = M.s.data();
    const double* cne = M.ne.data();
    const double* cnw = M.nw.data();
    const double* cse = M.se.data();
    const double* csw = M.sw.data();
    const double* cc = M.center.data();
    double* xv = x.data();

    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        for (Index j = 0; j < n2; ++j) {
            const Index base = j * n1;
            for (Index i = 0; i < n1; ++i) {
                const Index p = base + i;
                double acc = F(p);
                if (i + 1 < n1) acc += ce[p] * xv[p + 1];
                if (i > 0) acc += cw[p] * xv[p - 1];
                if (j + 1 < n2) acc += cn[p] * xv[p + n1];
                if (j > 0) acc += cs[p] * xv[p - n1];
                if (i + 1 < n1 && j + 1 < n2) acc += cne[p] * xv[p + n1 + 1];
                if (i > 0 && j + 1 < n2) acc += cnw[p] * xv[p + n1 - 1];
                if (i + 1 < n1 && j > 0) acc += cse[p] * xv[p - n1 + 1];
                if (i > 0 && j > 0) acc += csw[p] * xv[p - n1 - 1];
                xv[p] = acc / cc[p];
            }
        }
        const double res = (F - M.apply(x)).lpNorm<Eigen::Infinity>();
        history.push_back(res);
        stats.iterations = sweep;
        stats.residual = res;
        if (res <= target) return stats;
    }
    throw SolveError("gauss_seidel: no convergence after " + std::to_string(max_iter) +
                         " sweeps (residual " + std::to_string(stats.residual) + ")",
                     history);
}

/// Banded LU without pivoting (the admissible systems are strictly
/// diagonally dominant, which makes elimination stable). Bandwidth n1+1.
inline SolveStats direct_banded(const SystemMatrix& M, const VectorX& F, VectorX& x) {
    const Index n1 = M.n1, sz = M.size();
    const Index bw = n1 + 1;
    require(static_cast<double>(sz) * static_cast<double>(2 * bw + 1) < 4e8,
            "direct_banded: system too large; use the stationary solver");

    // band(r, k) holds entry (k + r - bw, k) of the matrix, r = 0..2bw.
    ArrayXX band = ArrayXX::Zero(2 * bw + 1, sz);
    auto entry = [&](Index row, Index col) -> double& { return band(row - col + bw, col); };

    for (Index j = 1; j <= M.n2; ++j) {
        for (Index i = 1; i <= n1; ++i) {
            const Index p = M.k(i, j);
            entry(p, p) = M.center(p);
            if (i < n1) entry(p, p + 1) = -M.e(p);
            if (i > 1) entry(p, p - 1) = -M.w(p);
            if (j < M.n2) entry(p, p + n1) = -M.n(p);
            if (j > 1) entry(p, p - n1) = -M.s(p);
            if (i < n1 && j < M.n2) entry(p, p + n1 + 1) = -M.ne(p);
            if (i > 1 && j < M.n2) entry(p, p + n1 - 1) = -M.nw(p);
            if (i < n1 && j > 1) entry(p, p - n1 + 1) = -M.se(p);
            if (i > 1 && j > 1) entry(p, p - n1 - 1) = -M.sw(p);
        }
    }

    x = F;
    // Elimination within the band.
    for (Index col = 0; col < sz; ++col) {
        const double piv = entry(col, col);
        if (std::abs(piv) < 1e-300)
            throw SolveError("direct_banded: vanishing pivot at row " + std::to_string(col));
        const Index last = std::min(sz - 1, col + bw);
        for (Index row = col + 1; row <= last; ++row) {
            const double factor = entry(row, col) / piv;
            if (factor == 0.0) continue;
            for (Index c2 = col; c2 <= std::min(sz - 1, col + bw); ++c2)
                entry(row, c2) -= factor * entry(col, c2);
            x(row) -= factor * x(col);
        }
    }
    // Back substitution.
    for (Index row = sz - 1; row >= 0; --row) {
        double acc = x(row);
        const Index last = std::min(sz - 1, row + bw);
        for (Index c2 = row + 1; c2 <= last; ++c2) acc -= entry(row, c2) * x(c2);
        x(row) = acc / entry(row, row);
    }

    SolveStats stats;
    stats.residual = (F - M.apply(x)).lpNorm<Eigen::Infinity>();
    return stats;
}

}  // namespace detail

/// Solve M u = F. An initial guess (the old time level) warm-starts the
/// stationary solver; the direct solver ignores it.
inline std::pair<VectorX, SolveStats> solve(const SystemMatrix& M, const VectorX& F,
                                            const SolveOptions& opt,
                                            const VectorX* guess = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    VectorX x = (guess && guess->size() == F.size()) ? *guess : VectorX::Zero(F.size());
    SolveStats stats;
    if (opt.method == SolveMethod::DirectBanded)
        stats = detail::direct_banded(M, F, x);
    else
        stats = detail::gauss_seidel(M, F, x, opt.tol, opt.max_iter);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x), stats};
}

}  // namespace corrband
