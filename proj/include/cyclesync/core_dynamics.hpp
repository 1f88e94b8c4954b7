#pragma once

#include <complex>
#include <string>

namespace cyclesync {

// Coefficients of the quartic interaction function F(y) = b0 + b1 y + ... + b4 y^4.
struct QuarticCoefficients {
    double b0 = -0.5;
    double b1 = 0.1;
    double b2 = 0.2;
    double b3 = 0.5;
    double b4 = -0.3;

    static QuarticCoefficients reference() { return {}; }
};

struct AgentParams {
    double alpha0 = 0.0;
    double alpha1 = -0.04;
    double alpha2 = 0.4;
    double delta = 0.1;
};

struct JacobianSummary {
    double trace = 0.0;
    double det = 0.0;
    double m = 0.0;  // det - (trace/2)^2
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    double modulus = 0.0;  // sqrt(det) when m > 0, else the larger |lambda|
    bool complex_pair() const { return m > 0.0; }
};

enum class StabilityClass { StableNode, StableFocus, LimitCycle, UnstableOther };

const char* stability_name(StabilityClass c) noexcept;

double eval_f(const QuarticCoefficients& q, double y) noexcept;
double eval_f_prime(const QuarticCoefficients& q, double y) noexcept;

double steady_state_alpha0(double alpha1, double alpha2, double delta, const QuarticCoefficients& q);

// Parameters with alpha0 set so that (1/delta, 1) is the fixed point.
AgentParams calibrated_params(double alpha1, double alpha2, double delta, const QuarticCoefficients& q);

bool check_uniqueness(const AgentParams& p, const QuarticCoefficients& q) noexcept;

JacobianSummary jacobian_at(const AgentParams& p, double fprime_at_ss) noexcept;
JacobianSummary jacobian_from_trace_det(double trace, double det) noexcept;

StabilityClass classify_stability(const JacobianSummary& j) noexcept;

// Argument of the complex eigenvalue pair, radians per step. Throws NonOscillatory when m <= 0.
double linear_frequency(const JacobianSummary& j);

struct AgentState {
    double x = 0.0;
    double y = 0.0;
};

// One step of the agent map given the interaction-weighted average ybar and the total shock.
inline AgentState map_step(const AgentParams& p, const QuarticCoefficients& q, AgentState s, double ybar,
                           double shock) noexcept {
    return {(1.0 - p.delta) * s.x + s.y,
            p.alpha0 + p.alpha1 * s.x + p.alpha2 * s.y + eval_f(q, ybar) + shock};
}

// Named parameter presets used across experiments.
struct DynamicsPreset {
    std::string name;
    double alpha1;
    double alpha2;
    double delta;
};

DynamicsPreset dynamics_preset(const std::string& name);  // cycle | focus | node

}  // namespace cyclesync
