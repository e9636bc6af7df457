#pragma once

#include <functional>
#include <string>

namespace daosim {

/// Static description of one agent. `id` is the 1-based agent id used in
/// configs, reports and the built-in scenario functions (the hypothetical
/// dynamics and objectives take the id as a parameter); internal containers
/// index agents 0-based as id - 1.
struct AgentSpec {
    int id = 1;                 // 1-based
    double tau = 1.0;           // decision response time, seconds
    double uMin = -1.0;
    double uMax = 1.0;
    std::string dynamicsId = "paper-hypothetical";
    std::string objectiveId = "paper-hypothetical";

    int index() const { return id - 1; }

    /// Saturation level for the control protocol: min{|uMin|, |uMax|}.
    double delta() const;

    /// Throws std::invalid_argument if tau <= 0 or the control bounds do
    /// not straddle zero (the saturation construction requires uMin < 0 < uMax).
    void validate() const;
};

/// Evolving per-agent quantities. The last* fields hold the samples taken
/// at the agent's previous decision epoch and feed the finite differences
/// for the ECE estimate and the incentive update.
struct AgentState {
    double x = 0.0;        // plant state
    double u = 0.0;        // control, held between epochs (zero-order hold)
    double d = 0.0;        // stabilizer accumulator, starts at 0
    double gamma = 1.0;    // incentive weight, strictly positive

    double r = 0.0;        // last finite ECE estimate (controller-visible value)
    bool rDefined = false; // whether the most recent ECE sample was finite

    double lastG = 0.0;      // objective at the most recent epoch
    double lastGPrev = 0.0;  // objective at the epoch before that
    double lastU = 0.0;      // control measured at the most recent epoch
    double lastRtilde = 0.0; // local disagreement at the most recent epoch
};

/// Plant dynamics f(x, U) and local objective g(x, u) are looked up by name
/// so scenarios stay data-only. New entries can be registered in code.
struct DynamicsFunction {
    std::function<double(int id, double x, double coupledU)> f;
};

struct ObjectiveFunction {
    std::function<double(int id, double x, double u)> g;
    /// Analytic dg/du; when absent the gradient falls back to a central
    /// finite difference.
    std::function<double(int id, double x, double u)> dgdu;
};

/// Throws std::invalid_argument for unknown names. Built-ins:
///   "paper-hypothetical"  f = x sin(id) + U cos(id),
///                         g = id sin(x) + u^2 cos(id), dg/du = 2u cos(id)
///   "zero"                f = 0, g = 0, dg/du = 0
const DynamicsFunction& dynamicsByName(const std::string& name);
const ObjectiveFunction& objectiveByName(const std::string& name);
bool hasDynamics(const std::string& name);
bool hasObjective(const std::string& name);
void registerDynamics(const std::string& name, DynamicsFunction fn);
void registerObjective(const std::string& name, ObjectiveFunction fn);

/// One explicit-Euler step of the agent plant: x + dt * f(x, coupledU).
/// Pure; the caller checks the result for finiteness.
double stepDynamics(const AgentSpec& spec, double x, double coupledU, double dt);

/// Local objective g(x, u) for the agent's registered objective.
double localObjective(const AgentSpec& spec, double x, double u);

/// dg/du at (x, u): analytic when the objective registers one, otherwise a
/// central finite difference with absolute step `fdStep`.
double objectiveGradient(const AgentSpec& spec, double x, double u,
                         double fdStep = kGradientFdStep);

inline constexpr double kGradientFdStep = 1e-4;

/// Control-change deadband separating "unchanged control" from rounding
/// noise in the ECE denominator.
inline constexpr double kControlDeadband = 1e-9;

struct EceSample {
    double value = 0.0;
    bool defined = false;
};

/// Per-epoch ECE update: r = (gNow - lastG) / |uNow - lastU| when the
/// control moved by more than the deadband; otherwise the sample is flagged
/// undefined and state.r keeps the previous finite value. Rotates the
/// history buffers either way. Call exactly once per decision epoch.
EceSample updateEce(AgentState& state, double gNow, double uNow,
                    double deadband = kControlDeadband);

}  // namespace daosim
