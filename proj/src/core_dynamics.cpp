#include "cyclesync/core_dynamics.hpp"

#include <cmath>

#include "cyclesync/error.hpp"

namespace cyclesync {

const char* stability_name(StabilityClass c) noexcept {
    switch (c) {
        case StabilityClass::StableNode: return "StableNode";
        case StabilityClass::StableFocus: return "StableFocus";
        case StabilityClass::LimitCycle: return "LimitCycle";
        case StabilityClass::UnstableOther: return "UnstableOther";
    }
    return "UnstableOther";
}

double eval_f(const QuarticCoefficients& q, double y) noexcept {
    return q.b0 + y * (q.b1 + y * (q.b2 + y * (q.b3 + y * q.b4)));
}

double eval_f_prime(const QuarticCoefficients& q, double y) noexcept {
    return q.b1 + y * (2.0 * q.b2 + y * (3.0 * q.b3 + y * 4.0 * q.b4));
}

double steady_state_alpha0(double alpha1, double alpha2, double delta, const QuarticCoefficients& q) {
    if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
    return 1.0 - alpha1 / delta - alpha2 - eval_f(q, 1.0);
}

AgentParams calibrated_params(double alpha1, double alpha2, double delta, const QuarticCoefficients& q) {
    return {steady_state_alpha0(alpha1, alpha2, delta, q), alpha1, alpha2, delta};
}

bool check_uniqueness(const AgentParams& p, const QuarticCoefficients& q) noexcept {
    return 1.0 - p.alpha1 / p.delta - p.alpha2 > eval_f_prime(q, 1.0);
}

JacobianSummary jacobian_from_trace_det(double trace, double det) noexcept {
    JacobianSummary j;
    j.trace = trace;
    j.det = det;
    const double half = trace / 2.0;
    j.m = det - half * half;
    if (j.m > 0.0) {
        const double im = std::sqrt(j.m);
        j.lambda1 = {half, im};
        j.lambda2 = {half, -im};
        j.modulus = std::sqrt(det);
    } else {
        const double r = std::sqrt(-j.m);
        j.lambda1 = {half + r, 0.0};
        j.lambda2 = {half - r, 0.0};
        j.modulus = std::max(std::abs(half + r), std::abs(half - r));
    }
    return j;
}

JacobianSummary jacobian_at(const AgentParams& p, double fprime_at_ss) noexcept {
    const double a = p.alpha2 + fprime_at_ss;
    return jacobian_from_trace_det(1.0 - p.delta + a, (1.0 - p.delta) * a - p.alpha1);
}

StabilityClass classify_stability(const JacobianSummary& j) noexcept {
    const double t = j.trace;
    const double d = j.det;
    const bool stable = d < 1.0 && d > t - 1.0 && d > -t - 1.0;
    const bool cplx = j.m > 0.0;
    if (stable) return cplx ? StabilityClass::StableFocus : StabilityClass::StableNode;
    if (cplx && d > 1.0) return StabilityClass::LimitCycle;
    return StabilityClass::UnstableOther;
}

double linear_frequency(const JacobianSummary& j) {
    if (!(j.m > 0.0)) fail(ErrorCode::NonOscillatory, "eigenvalues are real");
    return std::atan2(std::sqrt(j.m), j.trace / 2.0);
}

DynamicsPreset dynamics_preset(const std::string& name) {
    if (name == "cycle") return {name, -0.04, 0.4, 0.1};
    if (name == "focus") return {name, -0.04, 0.3, 0.1};
    if (name == "node") return {name, -0.11, 0.4, 0.5};
    fail(ErrorCode::InvalidArgument, "unknown dynamics preset '" + name + "'");
}

}  // namespace cyclesync
