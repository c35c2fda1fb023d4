#pragma once

#include "corrband/types.hpp"

#include <cmath>
#include <functional>

namespace corrband {

/// Which correlation bound the sign switch favours.
enum class Scenario { WorstCase, BestCase };

constexpr const char* scenario_name(Scenario s) {
    return s == Scenario::WorstCase ? "worst-case" : "best-case";
}

/// Volatilities, risk-free rate and continuous dividend yields (per year).
struct MarketParams {
    double sigma1 = 0.2;
    double sigma2 = 0.2;
    double r = 0.0953102;
    double d1 = 0.0487902;
    double d2 = 0.0;

    /// Solver-entry validation. Pure arithmetic helpers below also accept
    /// sigma == 0; the PDE itself needs sigma > 0.
    void validate() const {
        require(sigma1 > 0.0 && sigma2 > 0.0, "market: volatilities must be positive");
        require(r >= 0.0, "market: rate must be non-negative");
        require(d1 >= 0.0 && d2 >= 0.0, "market: dividend yields must be non-negative");
    }
};

/// Correlation bounds rho1 <= rho2 plus the scenario that resolves the switch.
struct CorrelationBand {
    double rho1 = -0.2;
    double rho2 = 0.6;
    Scenario scenario = Scenario::WorstCase;

    void validate() const {
        require(-1.0 <= rho1 && rho1 <= rho2 && rho2 <= 1.0,
                "correlation band: need -1 <= rho1 <= rho2 <= 1");
    }

    double max_abs() const { return std::max(std::abs(rho1), std::abs(rho2)); }
};

/// Convection coefficients A_s = r - D_s - sigma_s^2/2 stored as sign splits,
/// so A = pos - neg and |A| = pos + neg exactly.
struct DriftPair {
    double a1_pos = 0, a1_neg = 0;
    double a2_pos = 0, a2_neg = 0;

    double a1() const { return a1_pos - a1_neg; }
    double a2() const { return a2_pos - a2_neg; }
    double abs1() const { return a1_pos + a1_neg; }
    double abs2() const { return a2_pos + a2_neg; }
};

inline DriftPair drift_coefficients(const MarketParams& p) {
    const double a1 = p.r - p.d1 - 0.5 * p.sigma1 * p.sigma1;
    const double a2 = p.r - p.d2 - 0.5 * p.sigma2 * p.sigma2;
    DriftPair d;
    d.a1_pos = std::max(0.0, a1);
    d.a1_neg = std::max(0.0, -a1);
    d.a2_pos = std::max(0.0, a2);
    d.a2_neg = std::max(0.0, -a2);
    return d;
}

enum class SignClass { Negative, Zero, Positive };

inline SignClass sign_class(double v) {
    if (v > 0.0) return SignClass::Positive;
    if (v < 0.0) return SignClass::Negative;
    return SignClass::Zero;
}

/// A correlation value split into positive/negative parts:
/// value = pos - neg, |value| = pos + neg, pos*neg = 0.
struct RhoSplit {
    double pos = 0;
    double neg = 0;

    double value() const { return pos - neg; }
    double abs() const { return pos + neg; }

    static RhoSplit of(double rho) {
        return {std::max(0.0, rho), std::max(0.0, -rho)};
    }
};

/// Resolve the correlation switch for a given sign of the discrete cross
/// derivative. Zero sign takes the positive-sign branch, a fixed tie-break
/// that keeps runs reproducible.
inline RhoSplit select_rho(SignClass gamma_sign, const CorrelationBand& band) {
    const bool positive_branch = gamma_sign != SignClass::Negative;
    double rho;
    if (band.scenario == Scenario::WorstCase)
        rho = positive_branch ? band.rho1 : band.rho2;
    else
        rho = positive_branch ? band.rho2 : band.rho1;
    return RhoSplit::of(rho);
}

/// Point in log-price coordinates; tau is time to maturity.
struct LogPoint {
    double x1;
    double x2;
    double tau;
};

inline LogPoint log_transform(double s1, double s2, double t, double maturity) {
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::domain_error("log_transform: asset prices must be positive");
    return {std::log(s1), std::log(s2), maturity - t};
}

struct PricePoint {
    double s1;
    double s2;
    double t;
};

inline PricePoint inverse_log_transform(double x1, double x2, double tau, double maturity) {
    return {std::exp(x1), std::exp(x2), maturity - tau};
}

using PriceSpaceFn = std::function<double(double s1, double s2, double tau)>;
using LogSpaceFn = std::function<double(double x1, double x2, double tau)>;

/// Map S-space Neumann data g1 to the log-space flux g1' used by the solver:
/// the outward derivative picks up a factor e^{x1} on West/East edges and
/// e^{x2} on South/North edges.
inline LogSpaceFn transform_neumann_data(PriceSpaceFn g1, Edge edge) {
    const bool x1_normal = (edge == Edge::West || edge == Edge::East);
    return [g1 = std::move(g1), x1_normal](double x1, double x2, double tau) {
        const double s1 = std::exp(x1);
        const double s2 = std::exp(x2);
        return (x1_normal ? s1 : s2) * g1(s1, s2, tau);
    };
}

}  // namespace corrband
