#include <doctest.h>

#include <cmath>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/error.hpp"
#include "support.hpp"

using namespace cyclesync;

namespace {
const QuarticCoefficients kQ = QuarticCoefficients::reference();

JacobianSummary jac(double a1, double a2, double d, double fp = 0.8) {
    return jacobian_at(calibrated_params(a1, a2, d, kQ), fp);
}
}  // namespace

TEST_CASE("quartic values and slope") {
    CHECK(eval_f(kQ, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_f(kQ, 0.0) == doctest::Approx(-0.5));
    CHECK(eval_f_prime(kQ, 1.0) == doctest::Approx(0.8));
    CHECK(eval_f_prime(kQ, 0.0) == doctest::Approx(0.1));
    const double h = 1e-4;
    for (double y = 0.0; y <= 2.0; y += 0.05) {
        const double fd = (eval_f(kQ, y + h) - eval_f(kQ, y - h)) / (2 * h);
        CHECK(std::abs(fd - eval_f_prime(kQ, y)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("steady-state intercept") {
    CHECK(steady_state_alpha0(-0.04, 0.4, 0.1, kQ) == doctest::Approx(1.0));
    CHECK(steady_state_alpha0(-0.1, 0.4, 0.1, kQ) == doctest::Approx(1.6));
    QuarticCoefficients shifted = kQ;
    shifted.b0 += 0.25;
    CHECK(steady_state_alpha0(-0.04, 0.4, 0.1, shifted) == doctest::Approx(0.75));
    CHECK_THROWS_AS(steady_state_alpha0(-0.04, 0.4, 0.0, kQ), Error);
    CHECK_THROWS_AS(steady_state_alpha0(-0.04, 0.4, -0.1, kQ), Error);
}

TEST_CASE("fixed point is exact") {
    for (double a1 : {-0.1, -0.04, -0.02}) {
        const auto p = calibrated_params(a1, 0.4, 0.1, kQ);
        const auto s = map_step(p, kQ, {1.0 / p.delta, 1.0}, 1.0, 0.0);
        CHECK(std::abs(s.x - 1.0 / p.delta) < 1e-12);
        CHECK(std::abs(s.y - 1.0) < 1e-12);
    }
}

TEST_CASE("uniqueness condition") {
    CHECK(check_uniqueness(calibrated_params(-0.04, 0.4, 0.1, kQ), kQ));
    CHECK(check_uniqueness(calibrated_params(-0.04, 0.3, 0.1, kQ), kQ));
    // 1 - a1/d - a2 == F'(1) exactly: strict inequality fails
    CHECK_FALSE(check_uniqueness(AgentParams{0.0, 0.0, 0.5, 1.0}, QuarticCoefficients{0, 0, 0, 0, 0.125}));
}

TEST_CASE("Jacobian summaries") {
    auto c = jac(-0.04, 0.4, 0.1);
    CHECK(c.trace == doctest::Approx(2.1));
    CHECK(c.det == doctest::Approx(1.12));
    CHECK(c.complex_pair());
    CHECK(c.modulus > 1.0);
    auto n = jac(-0.11, 0.4, 0.5);
    CHECK(n.trace == doctest::Approx(1.7));
    CHECK(n.det == doctest::Approx(0.71));
    CHECK_FALSE(n.complex_pair());
    auto q = jac(-0.1, 0.4, 0.1, 0.0);
    CHECK(q.trace == doctest::Approx(1.3));
    CHECK(q.det == doctest::Approx(0.46));
    CHECK(q.complex_pair());
    CHECK(classify_stability(q) == StabilityClass::StableFocus);
}

TEST_CASE("Jacobian against the numpy oracle") {
    for (const auto& r : test::oracle("jacobian.csv", {"alpha1", "alpha2", "delta", "trace", "det", "max_modulus", "psi"})) {
        const auto j = jac(test::num(r[0]), test::num(r[1]), test::num(r[2]));
        CHECK(j.trace == doctest::Approx(test::num(r[3])).epsilon(1e-12));
        CHECK(j.det == doctest::Approx(test::num(r[4])).epsilon(1e-12));
        CHECK(j.modulus == doctest::Approx(test::num(r[5])).epsilon(1e-12));
        if (j.complex_pair()) CHECK(linear_frequency(j) == doctest::Approx(test::num(r[6])).epsilon(1e-12));
    }
}

TEST_CASE("stability classes") {
    CHECK(classify_stability(jac(-0.1, 0.4, 0.1, -1.0)) == StabilityClass::StableNode);
    CHECK(classify_stability(jac(-0.04, 0.4, 0.1)) == StabilityClass::LimitCycle);
    CHECK(classify_stability(jac(-0.11, 0.4, 0.5)) == StabilityClass::StableNode);
    // D == 1 exactly is a tie
    CHECK(classify_stability(jacobian_from_trace_det(1.0, 1.0)) == StabilityClass::UnstableOther);
    CHECK(classify_stability(jacobian_from_trace_det(0.5, -0.5)) == StabilityClass::UnstableOther);
    CHECK(std::string(stability_name(StabilityClass::LimitCycle)) == "LimitCycle");
}

TEST_CASE("classification is stable under tiny perturbations away from boundaries") {
    for (double t = -1.8; t <= 2.6; t += 0.2)
        for (double d = -0.9; d <= 1.5; d += 0.2) {
            const auto base = classify_stability(jacobian_from_trace_det(t, d));
            const double gap = std::min({std::abs(d - 1.0), std::abs(d - t + 1.0), std::abs(d + t + 1.0),
                                         std::abs(d - t * t / 4.0)});
            if (gap < 1e-9) continue;
            for (double dt : {-1e-13, 1e-13})
                for (double dd : {-1e-13, 1e-13}) CHECK(classify_stability(jacobian_from_trace_det(t + dt, d + dd)) == base);
        }
}

TEST_CASE("linear frequency") {
    const double psi = linear_frequency(jac(-0.04, 0.4, 0.1));
    CHECK(psi == doctest::Approx(std::atan(std::sqrt(0.0175) / 1.05)));
    CHECK(psi == doctest::Approx(0.1253).epsilon(1e-3));
    CHECK_THROWS_AS(linear_frequency(jac(-0.11, 0.4, 0.5)), Error);
    try {
        linear_frequency(jac(-0.11, 0.4, 0.5));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonOscillatory);
    }
}

TEST_CASE("frequency rises with alpha1 magnitude and falls with alpha2") {
    double prev = 0.0;
    for (double a1 = -0.025; a1 >= -0.1; a1 -= 0.005) {
        const double psi = linear_frequency(jac(a1, 0.4, 0.1));
        CHECK(psi > prev);
        prev = psi;
    }
    const double h = 1e-6;
    for (double a1 : {-0.1, -0.07, -0.04}) {
        for (double a2 : {0.3, 0.35, 0.4}) {
            const double d1 = (linear_frequency(jac(a1 + h, a2, 0.1)) - linear_frequency(jac(a1 - h, a2, 0.1))) / (2 * h);
            const double d2 = (linear_frequency(jac(a1, a2 + h, 0.1)) - linear_frequency(jac(a1, a2 - h, 0.1))) / (2 * h);
            CHECK(d1 < 0.0);
            CHECK(d2 < 0.0);
        }
    }
}

TEST_CASE("presets") {
    const auto c = dynamics_preset("cycle");
    CHECK(c.alpha1 == -0.04);
    CHECK(dynamics_preset("focus").alpha2 == 0.3);
    CHECK(dynamics_preset("node").delta == 0.5);
    CHECK_THROWS_AS(dynamics_preset("chaos"), Error);
    // The focus preset sits just past D = 1 with F'(1) = 0.8.
    const auto f = jac(-0.04, 0.3, 0.1);
    CHECK(f.det == doctest::Approx(1.03));
    CHECK(classify_stability(f) == StabilityClass::LimitCycle);
}

TEST_CASE("error metadata") {
    CHECK(std::string(error_name(ErrorCode::TooFewPeaks)) == "TooFewPeaks");
    CHECK(error_kind(ErrorCode::Config) == ErrorKind::Config);
    CHECK(error_kind(ErrorCode::InvalidArgument) == ErrorKind::Config);
    CHECK(error_kind(ErrorCode::MalformedRow) == ErrorKind::Data);
    CHECK(error_kind(ErrorCode::Io) == ErrorKind::Data);
    CHECK(error_kind(ErrorCode::ComplexSpectrum) == ErrorKind::Numerical);
    const Error e(ErrorCode::Reducible, "x");
    CHECK(std::string(e.what()) == "Reducible: x");
}
