#pragma once

#include "corrband/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace corrband {

enum class OptionKind { Put, Call };

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Dividend-adjusted Black-Scholes price; tau is time to maturity and tau = 0
/// returns the payoff.
inline double bs_price(OptionKind kind, double spot, double strike, double tau, double r,
                       double dividend, double sigma) {
    if (!(spot > 0.0) || !(strike > 0.0))
        throw std::domain_error("bs_price: spot and strike must be positive");
    if (!(sigma > 0.0)) throw std::domain_error("bs_price: volatility must be positive");
    if (tau < 0.0) throw std::domain_error("bs_price: negative time to maturity");
    if (tau == 0.0)
        return kind == OptionKind::Call ? std::max(0.0, spot - strike)
                                        : std::max(0.0, strike - spot);
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + (r - dividend + 0.5 * sigma * sigma) * tau) / vol;
    const double d2 = d1 - vol;
    const double df_asset = spot * std::exp(-dividend * tau);
    const double df_cash = strike * std::exp(-r * tau);
    if (kind == OptionKind::Call) return df_asset * normal_cdf(d1) - df_cash * normal_cdf(d2);
    return df_cash * normal_cdf(-d2) - df_asset * normal_cdf(-d1);
}

/// Financial condition on one edge, in asset-price coordinates.
struct EdgeCondition {
    EdgeKind kind = EdgeKind::Dirichlet;
    PriceSpaceFn data;  // g2 for Dirichlet, g1 for Neumann
};

/// A two-asset pricing problem on [s1_min,s1_max] x [s2_min,s2_max].
struct ProblemSpec {
    std::string name;
    SpaceFn payoff;  // of (s1, s2)
    std::array<EdgeCondition, 4> edges;
    MarketParams params;
    CorrelationBand band;
    double s1_min = 1.0 / 200.0, s1_max = 200.0;
    double s2_min = 1.0 / 200.0, s2_max = 200.0;
    double maturity = 2.0;
    double strike = 100.0;
    double w1 = 1.0, w2 = 1.0;
    double cap = 10.0;

    const EdgeCondition& edge(Edge e) const { return edges[edge_index(e)]; }

    void validate() const {
        params.validate();
        band.validate();
        require(s1_min > 0 && s1_min < s1_max && s2_min > 0 && s2_min < s2_max,
                "problem: price bounds must be positive and increasing");
        require(maturity >= 0, "problem: maturity must be non-negative");
        bool any_dirichlet = false;
        for (const auto& e : edges) any_dirichlet |= (e.kind == EdgeKind::Dirichlet);
        require(any_dirichlet, "problem: at least one Dirichlet edge required");
    }
};

struct TpOptions {
    double strike = 100.0;
    double w1 = 1.0, w2 = 1.0;
    double cap = 10.0;
    double s_min = 1.0 / 200.0, s_max = 200.0;
    double maturity = 2.0;
    MarketParams params{};
    CorrelationBand band{};
    /// Reproduce the printed boundary-strike pair (E/w and "cap" as a strike)
    /// instead of the spread that replicates the capped payoff.
    bool literal_paper_strikes = false;
};

/// Catalog of the five built-in pricing problems, addressable as "tp1".."tp5".
inline ProblemSpec make_tp(int id, const TpOptions& o = {}) {
    require(id >= 1 && id <= 5, "make_tp: unknown problem id");
    ProblemSpec p;
    p.name = "tp" + std::to_string(id);
    p.params = o.params;
    p.band = o.band;
    p.s1_min = p.s2_min = o.s_min;
    p.s1_max = p.s2_max = o.s_max;
    p.maturity = o.maturity;
    p.strike = o.strike;
    p.w1 = o.w1;
    p.w2 = o.w2;
    p.cap = o.cap;

    const double E = o.strike, w1 = o.w1, w2 = o.w2, cap = o.cap;
    const MarketParams mp = o.params;

    auto dirichlet = [](PriceSpaceFn fn) { return EdgeCondition{EdgeKind::Dirichlet, std::move(fn)}; };
    auto neumann = [](PriceSpaceFn fn) { return EdgeCondition{EdgeKind::Neumann, std::move(fn)}; };
    auto zero3 = [](double, double, double) { return 0.0; };

    switch (id) {
        case 1: {  // exchange option, payoff-valued Dirichlet data everywhere
            p.payoff = [](double s1, double s2) { return std::max(0.0, s2 - s1); };
            auto g2 = [](double s1, double s2, double) { return std::max(0.0, s2 - s1); };
            for (auto& e : p.edges) e = dirichlet(g2);
            break;
        }
        case 2: {  // worst-of two-asset call, payoff-valued Dirichlet data
            p.payoff = [E](double s1, double s2) {
                return std::max(0.0, std::min(s1, s2) - E);
            };
            auto g2 = [E](double s1, double s2, double) {
                return std::max(0.0, std::min(s1, s2) - E);
            };
            for (auto& e : p.edges) e = dirichlet(g2);
            break;
        }
        case 3: {  // capped put on a basket
            p.payoff = [E, w1, w2, cap](double s1, double s2) {
                return std::min(cap, std::max(0.0, E - w1 * s1 - w2 * s2));
            };
            // Near a vanishing asset the basket degenerates to one asset and
            // the capped put is the put spread with strikes E/w and E/w - cap.
            auto spread = [&](double w, double sigma, double dividend) -> PriceSpaceFn {
                const double k_hi = E / w;
                const double k_lo = o.literal_paper_strikes ? cap : E / w - cap;
                return [k_hi, k_lo, sigma, dividend, r = mp.r](double s, double, double tau) {
                    return bs_price(OptionKind::Put, s, k_hi, tau, r, dividend, sigma) -
                           bs_price(OptionKind::Put, s, k_lo, tau, r, dividend, sigma);
                };
            };
            PriceSpaceFn south = spread(w1, mp.sigma1, mp.d1);  // function of s1
            auto south_fn = [south](double s1, double s2, double tau) {
                (void)s2;
                return south(s1, 0.0, tau);
            };
            PriceSpaceFn west = spread(w2, mp.sigma2, mp.d2);  // function of s2
            auto west_fn = [west](double s1, double s2, double tau) {
                (void)s1;
                return west(s2, 0.0, tau);
            };
            p.edges[edge_index(Edge::West)] = dirichlet(west_fn);
            p.edges[edge_index(Edge::South)] = dirichlet(south_fn);
            p.edges[edge_index(Edge::East)] = dirichlet(zero3);
            p.edges[edge_index(Edge::North)] = dirichlet(zero3);
            break;
        }
        case 4: {  // single-asset call payoff with unit flux through the east wall
            p.payoff = [E, w1](double s1, double) { return std::max(0.0, w1 * s1 - E); };
            p.edges[edge_index(Edge::West)] = dirichlet(zero3);
            p.edges[edge_index(Edge::South)] = neumann(zero3);
            p.edges[edge_index(Edge::North)] = neumann(zero3);
            p.edges[edge_index(Edge::East)] = neumann([](double, double, double) { return 1.0; });
            break;
        }
        case 5: {  // capped call on a basket
            p.payoff = [E, w1, w2, cap](double s1, double s2) {
                return std::min(cap, std::max(0.0, w1 * s1 + w2 * s2 - E));
            };
            auto spread = [&](double w, double sigma, double dividend) -> PriceSpaceFn {
                const double k_lo = o.literal_paper_strikes ? cap : E / w;
                const double k_hi = o.literal_paper_strikes ? E / w : E / w + cap;
                return [k_lo, k_hi, sigma, dividend, r = mp.r](double s, double, double tau) {
                    return bs_price(OptionKind::Call, s, k_lo, tau, r, dividend, sigma) -
                           bs_price(OptionKind::Call, s, k_hi, tau, r, dividend, sigma);
                };
            };
            PriceSpaceFn south = spread(w1, mp.sigma1, mp.d1);
            auto south_fn = [south](double s1, double, double tau) { return south(s1, 0.0, tau); };
            PriceSpaceFn west = spread(w2, mp.sigma2, mp.d2);
            auto west_fn = [west](double, double s2, double tau) { return west(s2, 0.0, tau); };
            p.edges[edge_index(Edge::West)] = dirichlet(west_fn);
            p.edges[edge_index(Edge::South)] = dirichlet(south_fn);
            p.edges[edge_index(Edge::North)] = neumann(zero3);
            p.edges[edge_index(Edge::East)] = neumann(zero3);
            break;
        }
    }
    return p;
}

inline ProblemSpec make_tp(const std::string& id, const TpOptions& o = {}) {
    for (int k = 1; k <= 5; ++k)
        if (id == "tp" + std::to_string(k)) return make_tp(k, o);
    throw ConfigError("make_tp: unknown problem id '" + id + "'");
}

/// Evaluate the data on one edge at an asset-space point; tau is time to
/// maturity (the spread data use it as the option life).
inline double boundary_value(const ProblemSpec& spec, Edge e, double s1, double s2, double tau) {
    return spec.edge(e).data(s1, s2, tau);
}

/// Log-space solver bindings for a pricing problem.
inline ProblemBindings to_bindings(const ProblemSpec& spec) {
    ProblemBindings b;
    for (Edge e : {Edge::West, Edge::East, Edge::South, Edge::North}) {
        const auto& cond = spec.edge(e);
        if (cond.kind == EdgeKind::Dirichlet) {
            b.layout.set(e, EdgeKind::Dirichlet);
            b.dirichlet_data[edge_index(e)] = [fn = cond.data](double x1, double x2, double tau) {
                return fn(std::exp(x1), std::exp(x2), tau);
            };
        } else {
            b.layout.set(e, EdgeKind::Neumann);
            b.neumann_data[edge_index(e)] = transform_neumann_data(cond.data, e);
        }
    }
    b.initial = [payoff = spec.payoff](double x1, double x2) {
        return payoff(std::exp(x1), std::exp(x2));
    };
    return b;
}

inline Mesh make_mesh(const ProblemSpec& spec, Index n1, Index n2) {
    return Mesh::make(std::log(spec.s1_min), std::log(spec.s1_max), std::log(spec.s2_min),
                      std::log(spec.s2_max), n1, n2);
}

}  // namespace corrband
