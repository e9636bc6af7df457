#include "daosim/plant.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace daosim {

double AgentSpec::delta() const {
    return std::min(std::abs(uMin), std::abs(uMax));
}

void AgentSpec::validate() const {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("agent " + std::to_string(id) +
                                    ": response time must be positive");
    }
    if (!(uMin < uMax)) {
        throw std::invalid_argument("agent " + std::to_string(id) +
                                    ": control bounds must satisfy u_min < u_max");
    }
    // The saturation level min{|uMin|, |uMax|} only yields controls inside
    // [uMin, uMax] when the bounds straddle zero.
    if (!(uMin < 0.0 && uMax > 0.0)) {
        throw std::invalid_argument("agent " + std::to_string(id) +
                                    ": control bounds must straddle zero");
    }
}

namespace {

std::map<std::string, DynamicsFunction>& dynamicsRegistry() {
    static std::map<std::string, DynamicsFunction> reg = {
        {"paper-hypothetical",
         {[](int id, double x, double coupledU) {
             return x * std::sin(static_cast<double>(id)) +
                    coupledU * std::cos(static_cast<double>(id));
         }}},
        {"zero", {[](int, double, double) { return 0.0; }}},
    };
    return reg;
}

std::map<std::string, ObjectiveFunction>& objectiveRegistry() {
    static std::map<std::string, ObjectiveFunction> reg = {
        {"paper-hypothetical",
         {[](int id, double x, double u) {
              return static_cast<double>(id) * std::sin(x) +
                     u * u * std::cos(static_cast<double>(id));
          },
          [](int id, double /*x*/, double u) {
              return 2.0 * u * std::cos(static_cast<double>(id));
          }}},
        {"zero",
         {[](int, double, double) { return 0.0; },
          [](int, double, double) { return 0.0; }}},
    };
    return reg;
}

}  // namespace

const DynamicsFunction& dynamicsByName(const std::string& name) {
    auto& reg = dynamicsRegistry();
    auto it = reg.find(name);
    if (it == reg.end()) throw std::invalid_argument("unknown dynamics '" + name + "'");
    return it->second;
}

const ObjectiveFunction& objectiveByName(const std::string& name) {
    auto& reg = objectiveRegistry();
    auto it = reg.find(name);
    if (it == reg.end()) throw std::invalid_argument("unknown objective '" + name + "'");
    return it->second;
}

bool hasDynamics(const std::string& name) {
    return dynamicsRegistry().count(name) != 0;
}

bool hasObjective(const std::string& name) {
    return objectiveRegistry().count(name) != 0;
}

void registerDynamics(const std::string& name, DynamicsFunction fn) {
    dynamicsRegistry()[name] = std::move(fn);
}

void registerObjective(const std::string& name, ObjectiveFunction fn) {
    objectiveRegistry()[name] = std::move(fn);
}

double stepDynamics(const AgentSpec& spec, double x, double coupledU, double dt) {
    if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
    const auto& dyn = dynamicsByName(spec.dynamicsId);
    return x + dt * dyn.f(spec.id, x, coupledU);
}

double localObjective(const AgentSpec& spec, double x, double u) {
    return objectiveByName(spec.objectiveId).g(spec.id, x, u);
}

double objectiveGradient(const AgentSpec& spec, double x, double u, double fdStep) {
    const auto& obj = objectiveByName(spec.objectiveId);
    if (obj.dgdu) return obj.dgdu(spec.id, x, u);
    return (obj.g(spec.id, x, u + fdStep) - obj.g(spec.id, x, u - fdStep)) /
           (2.0 * fdStep);
}

EceSample updateEce(AgentState& state, double gNow, double uNow, double deadband) {
    const double du = uNow - state.lastU;
    EceSample sample;
    if (std::abs(du) > deadband) {
        const double r = (gNow - state.lastG) / std::abs(du);
        if (std::isfinite(r)) {
            sample = {r, true};
            state.r = r;
        }
    }
    state.rDefined = sample.defined;

    state.lastGPrev = state.lastG;
    state.lastG = gNow;
    state.lastU = uNow;
    return sample;
}

}  // namespace daosim
