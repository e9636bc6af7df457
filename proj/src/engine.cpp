#include "daosim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "daosim/rng.hpp"

namespace daosim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxClampEvents = 20;

/// Number of base steps per interval, requiring an integer multiple.
long long stepsPerInterval(double interval, double baseDt, const std::string& what) {
    const double ratio = interval / baseDt;
    const long long k = std::llround(ratio);
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument(what + " (" + std::to_string(interval) +
                                    ") must be a positive integer multiple of base_dt (" +
                                    std::to_string(baseDt) + ")");
    }
    return k;
}

std::string formatTime(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", t);
    return buf;
}

}  // namespace

void SimConfig::validate(const std::vector<AgentSpec>& agents) const {
    if (!(horizon > 0.0)) throw std::invalid_argument("sim.horizon must be positive");
    if (!(baseDt > 0.0)) throw std::invalid_argument("sim.base_dt must be positive");
    if (!(epsilonConverge > 0.0)) {
        throw std::invalid_argument("sim.epsilon_converge must be positive");
    }
    if (!(initStateRange[0] <= initStateRange[1])) {
        throw std::invalid_argument("sim.init_state_range must be a closed interval");
    }
    if (!(initControlRange[0] <= initControlRange[1])) {
        throw std::invalid_argument("sim.init_control_range must be a closed interval");
    }
    stepsPerInterval(tauO, baseDt, "operation cadence tau_o");
    for (const AgentSpec& a : agents) {
        stepsPerInterval(a.tau, baseDt, "response time of agent " + std::to_string(a.id));
    }
    if (stepsPerInterval(horizon, baseDt, "sim.horizon") < 1) {
        throw std::invalid_argument("sim.horizon must cover at least one step");
    }
}

RunOutput runSimulation(const Topology& topo, const std::vector<AgentSpec>& agents,
                        const ControllerParams& ctrl, const OperationParams& op,
                        const SimConfig& sim, std::uint64_t seed) {
    const int n = topo.size();
    if (static_cast<int>(agents.size()) != n) {
        throw std::invalid_argument("agent list size does not match topology");
    }
    for (int i = 0; i < n; ++i) {
        agents[i].validate();
        if (agents[i].id != i + 1) {
            throw std::invalid_argument("agent ids must be 1..n in order");
        }
    }
    ctrl.validate();
    op.validate();
    sim.validate(agents);

    const long long steps = stepsPerInterval(sim.horizon, sim.baseDt, "sim.horizon");
    std::vector<long long> epochSteps(n);
    std::vector<double> taus(n);
    for (int i = 0; i < n; ++i) {
        epochSteps[i] = stepsPerInterval(agents[i].tau, sim.baseDt, "tau");
        taus[i] = agents[i].tau;
    }
    const long long opSteps = stepsPerInterval(sim.tauO, sim.baseDt, "tau_o");
    const bool operated = ctrl.regime == Regime::DaoIncentiveWithOperation;

    // Initial conditions: x_i then u_i per agent, ascending index. The
    // stream continues afterwards to seed each operation invocation, so
    // these draws are identical for every regime run with the same seed.
    SplitMix64 rng(seed);
    std::vector<AgentState> states(n);
    for (int i = 0; i < n; ++i) {
        AgentState& s = states[i];
        s.x = rng.nextInRange(sim.initStateRange[0], sim.initStateRange[1]);
        s.u = rng.nextInRange(sim.initControlRange[0], sim.initControlRange[1]);
        const double delta = ctrl.deltaOverride.value_or(agents[i].delta());
        s.u = saturate(s.u == 0.0 ? 0.0 : s.u, delta);
        s.d = 0.0;
        s.gamma = ctrl.gammaInit;
        s.r = 0.0;
        s.rDefined = false;
        s.lastG = localObjective(agents[i], s.x, s.u);
        s.lastGPrev = s.lastG;
        s.lastU = s.u;
        s.lastRtilde = 0.0;
    }

    SimTrace trace;
    trace.agentCount = n;
    trace.baseDt = sim.baseDt;
    trace.t.reserve(static_cast<size_t>(steps));
    const size_t cells = static_cast<size_t>(steps) * n;
    trace.x.reserve(cells);
    trace.u.reserve(cells);
    trace.d.reserve(cells);
    trace.gamma.reserve(cells);
    trace.r.reserve(cells);
    trace.rDefined.reserve(cells);
    trace.subgraphEpoch.reserve(static_cast<size_t>(steps));
    trace.sumObjective.reserve(static_cast<size_t>(steps));

    Subgraph activeSub = Subgraph::full(topo);
    std::int32_t subgraphId = 0;
    int operationCount = 0;

    std::vector<double> visibleR(n, 0.0);
    std::vector<double> controls(n);
    std::vector<double> coupled(n);

    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * sim.baseDt;

        // (1) Operation on the DAO at multiples of tau_o.
        if (operated && k % opSteps == 0) {
            OperationParams callParams = op;
            callParams.rngSeed = rng.nextU64();
            const OperationResult res = operate(topo, visibleR, callParams);
            ++operationCount;
            if (res.found) {
                activeSub = *res.subgraph;
                subgraphId = operationCount;
                trace.events.push_back(
                    {t, "operation",
                     "members=" + std::to_string(res.subgraph->members().size()) +
                         " retained=" + std::to_string(res.subgraph->retainedEdges().size()) +
                         " removed=" + std::to_string(res.removedEdgeCount) +
                         " iterations=" + std::to_string(res.iterationsUsed)});
            } else {
                trace.events.push_back(
                    {t, "operation-infeasible",
                     "kept previous subgraph, iterations=" +
                         std::to_string(res.iterationsUsed)});
            }
        }

        // (2) Decision epochs, ascending agent index, full pipeline each.
        for (int i = 0; i < n; ++i) {
            if (k % epochSteps[i] != 0) continue;
            const AgentSpec& spec = agents[i];
            AgentState& s = states[i];

            const double gNow = localObjective(spec, s.x, s.u);
            updateEce(s, gNow, s.u);
            visibleR[i] = s.r;

            const auto& active =
                operated ? activeSub.outNeighbors(i) : topo.neighbors(i);
            const double grad = objectiveGradient(spec, s.x, s.u);
            const ControlDecision dec =
                controlStep(spec, s, visibleR, active, grad, ctrl, taus[i], taus);
            s.u = dec.u;
            s.d = dec.d;

            double h = 0.0;
            if (ctrl.usesIncentives()) {
                std::vector<std::pair<double, double>> deltas;
                deltas.reserve(active.size());
                for (const auto& [j, w] : active) {
                    deltas.emplace_back(w, states[j].lastG - states[j].lastGPrev);
                }
                const IncentiveResult inc = incentiveUpdate(
                    s.gamma, dec.rtilde, s.lastRtilde, deltas, ctrl.k3, ctrl.k4);
                s.gamma = inc.gamma;
                h = inc.h;
            }
            s.lastRtilde = dec.rtilde;

            if (dec.weightClamped) {
                ++trace.weightClampCount;
                if (trace.weightClampCount <= kMaxClampEvents) {
                    trace.events.push_back(
                        {t, "weight-clamp", "agent " + std::to_string(spec.id)});
                }
            }
            trace.epochs.push_back(
                {t, spec.id, dec.alpha, dec.beta, dec.rtilde, h, s.gamma});
        }

        // (3) Record the step, then integrate all plants one base step
        // under the currently held controls.
        trace.t.push_back(t);
        trace.subgraphEpoch.push_back(subgraphId);
        double sumG = 0.0;
        for (int i = 0; i < n; ++i) {
            const AgentState& s = states[i];
            trace.x.push_back(s.x);
            trace.u.push_back(s.u);
            trace.d.push_back(s.d);
            trace.gamma.push_back(s.gamma);
            trace.r.push_back(s.r);
            trace.rDefined.push_back(s.rDefined ? 1 : 0);
            controls[i] = s.u;
            sumG += localObjective(agents[i], s.x, s.u);
        }
        trace.sumObjective.push_back(sumG);

        bool abort = false;
        for (int i = 0; i < n && !abort; ++i) {
            coupled[i] = topo.coupledInput(i, controls);
            const double xNew = stepDynamics(agents[i], states[i].x, coupled[i], sim.baseDt);
            if (!std::isfinite(xNew)) {
                trace.aborted = true;
                trace.abortReason = "non-finite state for agent " +
                                    std::to_string(agents[i].id) + " at t=" + formatTime(t) +
                                    " (x=" + std::to_string(states[i].x) +
                                    ", coupled_u=" + std::to_string(coupled[i]) + ")";
                trace.events.push_back({t, "abort", trace.abortReason});
                abort = true;
            } else {
                states[i].x = xNew;
            }
        }
        if (abort) break;
    }

    if (trace.weightClampCount > kMaxClampEvents) {
        trace.events.push_back({sim.horizon, "weight-clamp",
                                "total clamp events: " +
                                    std::to_string(trace.weightClampCount)});
    }

    RunOutput out;
    out.report = evaluate(trace, sim.epsilonConverge);
    out.trace = std::move(trace);
    return out;
}

EvalReport evaluate(const SimTrace& trace, double epsilonConverge) {
    if (!(epsilonConverge > 0.0)) {
        throw std::invalid_argument("epsilonConverge must be positive");
    }
    const int steps = trace.steps();
    const int n = trace.agentCount;

    EvalReport report;
    report.aborted = trace.aborted;
    report.maxDiscrepancy.assign(static_cast<size_t>(steps), kNan);
    report.initialDiscrepancy = kNan;

    for (int k = 0; k < steps; ++k) {
        double lo = kInf, hi = -kInf;
        int defined = 0;
        for (int i = 0; i < n; ++i) {
            if (!trace.rDefined[trace.cell(k, i)]) continue;
            const double v = trace.r[trace.cell(k, i)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++defined;
        }
        if (defined >= 2) {
            report.maxDiscrepancy[k] = hi - lo;
            if (std::isnan(report.initialDiscrepancy)) {
                report.initialDiscrepancy = hi - lo;
            }
        } else {
            ++report.skippedSteps;
        }
    }

    report.threshold = epsilonConverge * report.initialDiscrepancy;

    // Latest violating step; the dwell starts right after it.
    int lastViolation = -1;
    for (int k = 0; k < steps; ++k) {
        if (report.maxDiscrepancy[k] > report.threshold) lastViolation = k;
    }
    if (lastViolation < 0) {
        report.convergenceTime = 0.0;
    } else if (lastViolation + 1 < steps) {
        report.convergenceTime = trace.t[static_cast<size_t>(lastViolation) + 1];
    }  // else: still violating at the final step -> no convergence

    // Final consensus over agents that ever produced a finite sample.
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < n; ++i) {
        bool ever = false;
        for (int k = 0; k < steps && !ever; ++k) {
            ever = trace.rDefined[trace.cell(k, i)] != 0;
        }
        if (ever && steps > 0) {
            sum += trace.r[trace.cell(steps - 1, i)];
            ++counted;
        }
    }
    report.consensusValue = counted > 0 ? sum / counted : 0.0;

    report.deltaJ = steps > 0 ? trace.sumObjective[static_cast<size_t>(steps) - 1] -
                                    trace.sumObjective[0]
                              : 0.0;

    double cum = 0.0;
    for (int k = 0; k < steps; ++k) {
        for (int i = 0; i < n; ++i) {
            if (trace.rDefined[trace.cell(k, i)]) cum += trace.r[trace.cell(k, i)];
        }
    }
    report.cumulativeEce = cum * trace.baseDt;
    return report;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return kNan;
    std::sort(values.begin(), values.end());
    const double pos = p * (static_cast<double>(values.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (std::isinf(values[lo]) && values[lo] == values[hi]) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
}

Stats computeStats(const std::vector<double>& values) {
    Stats s;
    s.median = quantile(values, 0.5);
    s.q1 = quantile(values, 0.25);
    s.q3 = quantile(values, 0.75);
    s.iqr = s.q3 - s.q1;
    return s;
}

BatchReport runBatch(const Topology& topo, const std::vector<AgentSpec>& agents,
                     const ControllerParams& baseCtrl, const OperationParams& op,
                     const SimConfig& sim, const std::vector<Regime>& regimes,
                     const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("batch requires at least one seed");
    if (regimes.empty()) throw std::invalid_argument("batch requires at least one regime");

    BatchReport batch;
    batch.seeds = seeds;

    for (const Regime regime : regimes) {
        ControllerParams ctrl = baseCtrl;
        ctrl.regime = regime;

        RegimeAggregate agg;
        agg.regime = regime;
        agg.runs = static_cast<int>(seeds.size());

        std::vector<double> conv, consensus, dJ, absDJ, cumEce;
        std::vector<std::vector<double>> series;
        for (const std::uint64_t seed : seeds) {
            RunOutput run = runSimulation(topo, agents, ctrl, op, sim, seed);

            BatchRunRecord rec;
            rec.regime = regime;
            rec.seed = seed;
            rec.aborted = run.trace.aborted;
            series.push_back(run.report.maxDiscrepancy);

            if (run.report.convergenceTime) {
                conv.push_back(*run.report.convergenceTime);
                ++agg.convergedCount;
            } else {
                conv.push_back(kInf);
            }
            consensus.push_back(run.report.consensusValue);
            dJ.push_back(run.report.deltaJ);
            absDJ.push_back(std::abs(run.report.deltaJ));
            cumEce.push_back(run.report.cumulativeEce);

            rec.eval = std::move(run.report);
            rec.eval.maxDiscrepancy.clear();
            batch.records.push_back(std::move(rec));
        }

        agg.convergenceTime = computeStats(conv);
        agg.consensusValue = computeStats(consensus);
        agg.deltaJ = computeStats(dJ);
        agg.absDeltaJ = computeStats(absDJ);
        agg.cumulativeEce = computeStats(cumEce);

        size_t maxLen = 0;
        for (const auto& s : series) maxLen = std::max(maxLen, s.size());
        agg.medianDiscrepancy.assign(maxLen, kNan);
        std::vector<double> column;
        for (size_t k = 0; k < maxLen; ++k) {
            column.clear();
            for (const auto& s : series) {
                if (k < s.size() && !std::isnan(s[k])) column.push_back(s[k]);
            }
            if (!column.empty()) agg.medianDiscrepancy[k] = quantile(column, 0.5);
        }
        batch.aggregates.push_back(std::move(agg));
    }
    return batch;
}

}  // namespace daosim
