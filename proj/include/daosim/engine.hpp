#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "daosim/control.hpp"
#include "daosim/daoop.hpp"
#include "daosim/plant.hpp"
#include "daosim/topology.hpp"

namespace daosim {

struct SimConfig {
    double horizon = 500.0;
    double baseDt = 0.1;
    double tauO = 5.0;  // operation cadence, seconds
    double epsilonConverge = 0.05;  // relative dwell threshold
    std::vector<std::uint64_t> seeds = {1};
    std::array<double, 2> initStateRange{-20.0, 20.0};
    std::array<double, 2> initControlRange{-3.0, 3.0};

    /// Checks horizon/threshold positivity and that every agent response
    /// time and the operation cadence are integer multiples of baseDt.
    /// Throws std::invalid_argument naming the offending field.
    void validate(const std::vector<AgentSpec>& agents) const;
};

/// Step-indexed record of a run. Per-step-per-agent columns are stored
/// flat, index = step * agentCount + agent.
struct SimTrace {
    int agentCount = 0;
    double baseDt = 0.0;

    std::vector<double> t;  // per step
    std::vector<double> x, u, d, gamma, r;  // per step x agent
    std::vector<std::uint8_t> rDefined;     // per step x agent
    std::vector<std::int32_t> subgraphEpoch;  // per step; 0 = full graph
    std::vector<double> sumObjective;       // per step, sum_i g_i(x_i, u_i)

    struct EpochRecord {
        double t = 0.0;
        int agentId = 0;  // 1-based
        double alpha = 0.0, beta = 0.0, rtilde = 0.0, h = 0.0, gamma = 0.0;
    };
    std::vector<EpochRecord> epochs;

    struct Event {
        double t = 0.0;
        std::string kind;    // "operation", "operation-infeasible", "weight-clamp", "abort"
        std::string detail;
    };
    std::vector<Event> events;
    int weightClampCount = 0;

    bool aborted = false;
    std::string abortReason;

    int steps() const { return static_cast<int>(t.size()); }
    size_t cell(int step, int agent) const {
        return static_cast<size_t>(step) * agentCount + agent;
    }
};

struct EvalReport {
    /// max |r_i - r_j| over agents with a defined ECE sample, per step;
    /// NaN when fewer than two samples are defined at that step.
    std::vector<double> maxDiscrepancy;
    /// First time from which every defined discrepancy sample stays within
    /// the threshold through the horizon; absent when the last violation
    /// sits at the final step. 0 when no sample ever violates.
    std::optional<double> convergenceTime;
    double initialDiscrepancy = 0.0;  // first defined sample (NaN if none)
    double threshold = 0.0;           // epsilonConverge * initialDiscrepancy
    double consensusValue = 0.0;      // final mean ECE over agents that ever sampled
    double deltaJ = 0.0;              // sum g(t_end) - sum g(t_start)
    double cumulativeEce = 0.0;       // dt-weighted sum of defined ECE samples
    int skippedSteps = 0;             // steps contributing no discrepancy sample
    bool aborted = false;
};

struct RunOutput {
    SimTrace trace;
    EvalReport report;
};

/// Deterministic multi-rate run. Per base step, in order: (1) in the
/// operated regime, refresh the active subgraph at multiples of tauO
/// (keeping the previous one when the operation reports infeasible);
/// (2) fire the decision epoch of every agent whose response time divides
/// the step time, agents in ascending index, each running the full
/// pipeline ECE update -> weights -> control -> incentive; (3) record the
/// step and integrate all plants one baseDt under zero-order-held controls.
/// A non-finite state aborts with a partial trace and a diagnostic event.
RunOutput runSimulation(const Topology& topo, const std::vector<AgentSpec>& agents,
                        const ControllerParams& ctrl, const OperationParams& op,
                        const SimConfig& sim, std::uint64_t seed);

/// Computes the evaluation criteria from a complete (or aborted-partial)
/// trace. Undefined ECE samples are excluded from the discrepancy, the
/// consensus value and the cumulative ECE.
EvalReport evaluate(const SimTrace& trace, double epsilonConverge);

struct Stats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
};

/// Quantile with linear interpolation between closest ranks. `values` need
/// not be sorted; +inf entries are legal (non-converged runs).
double quantile(std::vector<double> values, double p);
Stats computeStats(const std::vector<double>& values);

struct BatchRunRecord {
    Regime regime = Regime::FixedGain;
    std::uint64_t seed = 0;
    EvalReport eval;  // maxDiscrepancy series cleared to keep records small
    bool aborted = false;
};

struct RegimeAggregate {
    Regime regime = Regime::FixedGain;
    int runs = 0;
    int convergedCount = 0;
    Stats convergenceTime;  // non-converged runs enter as +inf
    Stats consensusValue;
    Stats deltaJ;
    Stats absDeltaJ;
    Stats cumulativeEce;
    /// Per-step median of the defined discrepancy samples across seeds.
    std::vector<double> medianDiscrepancy;
};

struct BatchReport {
    std::vector<std::uint64_t> seeds;
    std::vector<BatchRunRecord> records;      // regime-major, seed order
    std::vector<RegimeAggregate> aggregates;  // one per requested regime
};

/// Runs every (regime, seed) pair. Initial conditions depend only on the
/// seed, so all regimes of one seed share identical draws. Results are
/// keyed by (regime, seed), never by completion order.
BatchReport runBatch(const Topology& topo, const std::vector<AgentSpec>& agents,
                     const ControllerParams& baseCtrl, const OperationParams& op,
                     const SimConfig& sim, const std::vector<Regime>& regimes,
                     const std::vector<std::uint64_t>& seeds);

}  // namespace daosim
