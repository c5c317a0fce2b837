#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "iadof/puzzle.hpp"

namespace iadof {

// Raised when a solve is refused up front (instance too large for the
// requested mode), as opposed to malformed input.
class SolverRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveConfig {
    enum class Mode { Exact, Heuristic, BruteForce };

    Mode mode = Mode::Exact;
    // Largest label the search may place; defaults to the message count,
    // which never constrains the optimum.
    std::optional<int> max_label;
    std::optional<double> time_budget_s;
    uint64_t seed = 0;
    int parallelism = 1;
    // Hard cap on support cells for brute force.
    int brute_force_cell_cap = 12;
    // Hill-climb restarts (first two are the caller's start and the
    // one-label-per-row filling, the rest random).
    int restarts = 24;
};

struct SolveReport {
    IndexMatrix best_g;
    ScoreValue best_score;
    // True when the search provably exhausted the space (within max_label)
    // instead of stopping on a budget or settling for a local optimum.
    bool optimal = false;
    uint64_t nodes_explored = 0;
    double elapsed_s = 0.0;
};

// Dispatches on config.mode. Exact and brute-force results are independent
// of parallelism and exploration order: among equal-score fillings the
// search keeps the one whose canonical relabeling is lexicographically
// smallest.
SolveReport solve(const ChannelSpec& spec, const SolveConfig& config = {});

// Exhaustive enumeration of canonical fillings in row-major cell order with
// no bounding, kept as the oracle the pruned search is checked against.
// Refuses specs with more than max_cells support cells.
SolveReport brute_force(const ChannelSpec& spec, int max_cells = 12);

// Best-improvement hill climb over single-cell changes (clear the cell, any
// legal existing label, or one fresh label), restarted per config.
SolveReport local_search(const ChannelSpec& spec, const IndexMatrix& start,
                         const SolveConfig& config = {});

// Timing is omitted by default so reports for a fixed seed are byte-stable.
std::string to_json_text(const SolveReport& report, bool include_timing = false);

}  // namespace iadof
