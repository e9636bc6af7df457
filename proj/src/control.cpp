#include "daosim/control.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace daosim {

std::string regimeName(Regime r) {
    switch (r) {
        case Regime::FixedGain: return "fixed-gain";
        case Regime::PoS: return "pos";
        case Regime::DaoIncentive: return "dao-incentive";
        case Regime::DaoIncentiveWithOperation: return "proposed";
    }
    return "unknown";
}

std::optional<Regime> regimeFromName(const std::string& name) {
    if (name == "fixed-gain") return Regime::FixedGain;
    if (name == "pos") return Regime::PoS;
    if (name == "dao-incentive") return Regime::DaoIncentive;
    if (name == "proposed" || name == "dao-incentive-operated")
        return Regime::DaoIncentiveWithOperation;
    return std::nullopt;
}

void ControllerParams::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string(what) + " must be positive");
        }
    };
    positive(k1, "controller.k1");
    positive(k2, "controller.k2");
    positive(k3, "controller.k3");
    positive(k4, "controller.k4");
    positive(weightClamp, "controller.weight_clamp");
    positive(gammaInit, "controller.gamma_init");
    if (regime == Regime::FixedGain) {
        positive(alphaFixed, "controller.alpha_fixed");
        positive(betaFixed, "controller.beta_fixed");
    }
    if (deltaOverride && !(*deltaOverride > 0.0)) {
        throw std::invalid_argument("controller.delta_override must be positive");
    }
}

double saturate(double u, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("saturation level must be positive");
    const double mag = std::min(std::abs(u), delta);
    return std::signbit(u) ? -mag : mag;
}

double localDisagreement(double rI,
                         std::span<const std::pair<int, double>> neighbors,
                         std::span<const double> r) {
    double sum = 0.0;
    for (const auto& [j, w] : neighbors) {
        sum += w * (rI - 0.5 * (rI + r[j]));
    }
    return sum;
}

VotingWeights votingWeights(double gamma, double rtilde, double k1, double k2,
                            double clampMax) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

    VotingWeights w;
    w.rtilde = rtilde;
    w.alpha = gamma * std::exp(k1 * rtilde);
    w.beta = gamma * std::exp(-k2 * rtilde);

    // Keep the weights finite and strictly positive: cap blow-ups at the
    // configured maximum and rescue exp() underflow at the smallest normal.
    for (double* v : {&w.alpha, &w.beta}) {
        if (!(*v <= clampMax)) {  // catches +inf as well
            *v = clampMax;
            w.clamped = true;
        }
        if (*v < std::numeric_limits<double>::min()) {
            *v = std::numeric_limits<double>::min();
            w.clamped = true;
        }
    }
    return w;
}

ControlDecision controlStep(const AgentSpec& spec, const AgentState& state,
                            std::span<const double> visibleR,
                            std::span<const std::pair<int, double>> activeNeighbors,
                            double grad, const ControllerParams& params,
                            double dtEpoch, std::span<const double> taus) {
    const int i = spec.index();
    const double rI = visibleR[i];

    double consensus = 0.0;
    if (params.tauScaledConsensus) {
        const double scaledI = rI / taus[i];
        for (const auto& [j, w] : activeNeighbors) {
            consensus += w * (scaledI - visibleR[j] / taus[j]);
        }
    } else {
        for (const auto& [j, w] : activeNeighbors) {
            consensus += w * (rI - visibleR[j]);
        }
    }

    ControlDecision out;
    out.consensus = consensus;
    if (params.usesVotingWeights()) {
        const double rtilde = localDisagreement(rI, activeNeighbors, visibleR);
        const VotingWeights w =
            votingWeights(state.gamma, rtilde, params.k1, params.k2, params.weightClamp);
        out.alpha = w.alpha;
        out.beta = w.beta;
        out.rtilde = rtilde;
        out.weightClamped = w.clamped;
    } else {
        out.alpha = params.alphaFixed;
        out.beta = params.betaFixed;
        out.rtilde = localDisagreement(rI, activeNeighbors, visibleR);
    }

    const double delta = params.deltaOverride.value_or(spec.delta());
    const double raw = -state.d - out.alpha * grad - out.beta * consensus;
    out.u = saturate(raw, delta);
    out.d = state.d + dtEpoch * out.alpha * out.beta * consensus;

    if (!std::isfinite(out.u) || !std::isfinite(out.d)) {
        throw std::domain_error("non-finite control update for agent " +
                                std::to_string(spec.id));
    }
    return out;
}

IncentiveResult incentiveUpdate(double gammaOld, double rtildeNow, double rtildeOld,
                                std::span<const std::pair<double, double>> neighborObjectiveDeltas,
                                double k3, double k4) {
    if (!(gammaOld > 0.0)) throw std::invalid_argument("gamma must be positive");

    double support = 0.0;
    for (const auto& [w, dg] : neighborObjectiveDeltas) support += w * dg;

    IncentiveResult out;
    out.h = k3 * (rtildeNow - rtildeOld) + k4 * support;
    out.multiplier = 2.0 * std::atan(out.h) / std::numbers::pi + 1.0;

    // atan rounds to exactly +-pi/2 for |h| beyond ~9e15, which would land
    // the multiplier on 0 or 2; the invariant is the open interval (0, 2).
    constexpr double kTiny = std::numeric_limits<double>::min();
    constexpr double kBelowTwo = 2.0 - std::numeric_limits<double>::epsilon();
    out.multiplier = std::min(std::max(out.multiplier, kTiny), kBelowTwo);

    // gamma itself stays in a finite positive band so repeated extreme
    // updates cannot underflow it to zero or overflow to inf.
    out.gamma = std::min(std::max(gammaOld * out.multiplier, kTiny), 1e300);
    return out;
}

}  // namespace daosim
