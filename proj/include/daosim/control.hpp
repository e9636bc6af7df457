#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "daosim/plant.hpp"

namespace daosim {

/// The four compared controllers.
enum class Regime {
    FixedGain,                 // time-invariant alpha, beta
    PoS,                       // voting weights with fixed stake gamma = 1
    DaoIncentive,              // voting weights + incentive-updated gamma
    DaoIncentiveWithOperation  // DaoIncentive restricted to the operated subgraph
};

std::string regimeName(Regime r);
std::optional<Regime> regimeFromName(const std::string& name);

struct ControllerParams {
    Regime regime = Regime::DaoIncentiveWithOperation;
    double alphaFixed = 2.0;  // FixedGain only
    double betaFixed = 1.0;   // FixedGain only
    double k1 = 2.0;
    double k2 = 5.0;
    double k3 = 0.3;
    double k4 = 0.1;
    std::optional<double> deltaOverride;  // else per-agent min{|uMin|, |uMax|}
    bool tauScaledConsensus = false;      // tau-scaled reading of the consensus term
    double weightClamp = 1e6;             // cap on voting weights before they cascade
    double gammaInit = 1.0;

    bool usesVotingWeights() const { return regime != Regime::FixedGain; }
    bool usesIncentives() const {
        return regime == Regime::DaoIncentive ||
               regime == Regime::DaoIncentiveWithOperation;
    }

    void validate() const;  // throws std::invalid_argument
};

/// Saturation sigma_Delta(u) = sgn(u) * min{|u|, delta}.
double saturate(double u, double delta);

/// Local ECE disagreement r~_i = sum_j a_ij * (r_i - (r_i + r_j) / 2) over
/// the active neighbor set. Depends only on ECE differences.
double localDisagreement(double rI,
                         std::span<const std::pair<int, double>> neighbors,
                         std::span<const double> r);

struct VotingWeights {
    double alpha = 1.0;
    double beta = 1.0;
    double rtilde = 0.0;
    bool clamped = false;  // a weight hit the overflow clamp
};

/// Voting power alpha = gamma exp(k1 r~), beta = gamma exp(-k2 r~), both
/// clamped into (0, clampMax] so an exploding disagreement cannot produce
/// non-finite weights.
VotingWeights votingWeights(double gamma, double rtilde, double k1, double k2,
                            double clampMax = 1e6);

struct ControlDecision {
    double u = 0.0;          // saturated control
    double d = 0.0;          // advanced stabilizer
    double alpha = 1.0;
    double beta = 1.0;
    double rtilde = 0.0;
    double consensus = 0.0;  // sum_j a_ij (r_i - r_j) over the active set
    bool weightClamped = false;
};

/// One decision-epoch control update:
///   u_new = sigma_Delta(-d - alpha * grad - beta * C)
///   d_new = d + dtEpoch * alpha * beta * C
/// with C the consensus sum over the active neighbor set and grad the local
/// objective gradient evaluated at the pre-update operating point (supplied
/// by the caller). In the FixedGain regime alpha and beta come from params;
/// otherwise from the voting weights of the agent's current stake.
/// `taus` (per-agent response times) is only read when the tau-scaled
/// consensus switch is on. Throws std::domain_error on a non-finite result.
ControlDecision controlStep(const AgentSpec& spec, const AgentState& state,
                            std::span<const double> visibleR,
                            std::span<const std::pair<int, double>> activeNeighbors,
                            double grad, const ControllerParams& params,
                            double dtEpoch, std::span<const double> taus);

struct IncentiveResult {
    double gamma = 1.0;
    double h = 0.0;
    double multiplier = 1.0;  // strictly inside (0, 2)
};

/// Incentive-weight update applied after the control executes:
///   h = k3 (r~ - r~_old) + k4 sum_j a_ij (g_j - g_j_old)
///   gamma_new = gamma_old * (2 atan(h) / pi + 1)
/// `neighborObjectiveDeltas` holds (a_ij, g_j - g_j_old) for the active
/// neighbors, each neighbor's objective sampled at its own epochs.
IncentiveResult incentiveUpdate(double gammaOld, double rtildeNow, double rtildeOld,
                                std::span<const std::pair<double, double>> neighborObjectiveDeltas,
                                double k3, double k4);

}  // namespace daosim
