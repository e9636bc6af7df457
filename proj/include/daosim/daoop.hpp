#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "daosim/topology.hpp"

namespace daosim {

struct OperationParams {
    int phi = 4;                   // smart-contract capacity (max members)
    double psi = 2.0;              // tolerance on per-agent consensus-pressure loss
    int maxOuterIterations = 200;  // randomized restarts before giving up
    std::uint64_t rngSeed = 0;

    void validate() const;  // throws std::invalid_argument
};

/// Consensus-pressure loss agent i suffers from edges absent in `sub`:
///   W_i = sum over all out-edges (i,j) of a_ij |r_i - r_j|
///       - sum over retained out-edges          a_ij |r_i - r_j|
/// Defined for members and non-members alike (a non-member retains nothing).
double tolerance(int i, const Topology& full, const Subgraph& sub,
                 std::span<const double> r);

struct OperationResult {
    bool found = false;
    std::optional<Subgraph> subgraph;  // set when found
    int removedEdgeCount = 0;
    int iterationsUsed = 0;
};

/// Heuristic subgraph extraction. Starting from the full graph, while the
/// member count exceeds phi: pick a random member; drop it if it has no
/// incident retained edge in either direction, otherwise tentatively remove
/// its minimum-weight incident edge (weight a_pq |r_p - r_q|, signed as
/// written, so negative-weight edges are removed first; ties broken by
/// lowest neighbor index, then out-edge before in-edge) and accept only if
/// the tolerance of both endpoints stays within psi. A rejected removal
/// restarts from the pristine full graph with fresh RNG draws, up to
/// maxOuterIterations; exhaustion reports found = false (a modeled
/// capacity-limit outcome, not an error).
///
/// Deterministic given (topology, r, params).
OperationResult operate(const Topology& full, std::span<const double> r,
                        const OperationParams& params);

struct ConstraintReport {
    struct AgentEntry {
        int id = 0;  // 1-based
        double w = 0.0;
        bool member = false;
        bool ok = true;
    };
    bool pass = false;
    bool capacityOk = false;
    int memberCount = 0;
    int phi = 0;
    double psi = 0.0;
    std::vector<AgentEntry> agents;
    std::vector<int> violating;  // 1-based ids with w > psi
};

/// Checks the capacity bound and the per-agent tolerance bound for every
/// agent of the parent graph. Used as a postcondition on every operate /
/// bruteForce output.
ConstraintReport validate(const Topology& full, const Subgraph& sub,
                          std::span<const double> r, const OperationParams& params);

struct BruteForceResult {
    bool feasible = false;
    std::optional<Subgraph> subgraph;
    int edgeCount = 0;
};

/// Exhaustive oracle: enumerates every member subset of size <= phi and,
/// per member, the minimal retained-edge subsets meeting the tolerance
/// bound; returns a feasible subgraph minimizing the retained edge count,
/// ties broken by larger member count then lexicographically smallest edge
/// set. Throws std::length_error when n > 12.
BruteForceResult bruteForce(const Topology& full, std::span<const double> r,
                            int phi, double psi);

}  // namespace daosim
