#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrband {

using Index = Eigen::Index;
using ArrayXX = Eigen::ArrayXXd;
using ArrayX = Eigen::ArrayXd;
using VectorX = Eigen::VectorXd;

/// Domain boundary edges. West/East bound x1 (asset 1), South/North bound x2.
enum class Edge { West = 0, East = 1, South = 2, North = 3 };

constexpr std::size_t edge_index(Edge e) { return static_cast<std::size_t>(e); }

constexpr const char* edge_name(Edge e) {
    switch (e) {
        case Edge::West: return "W";
        case Edge::East: return "E";
        case Edge::South: return "S";
        case Edge::North: return "N";
    }
    return "?";
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user-provided configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// A scheme admissibility condition failed with enforcement on (exit code 3).
struct ConditionError : Error {
    using Error::Error;
};

/// Linear solver breakdown or non-convergence (exit code 4).
struct SolveError : Error {
    SolveError(const std::string& msg, std::vector<double> history = {})
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

}  // namespace corrband
