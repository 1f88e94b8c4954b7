#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/network.hpp"

namespace cyclesync {

struct SynchronizedOrbit {
    AgentParams params;
    QuarticCoefficients q;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> fprime;  // F'(y_t)
    double period = 0.0;

    int size() const { return static_cast<int>(y.size()); }
};

struct OrbitOptions {
    int steps = 101000;
    int burn_in = 2000;
    double offset = 0.05;  // relative displacement of the start from the fixed point
};

// Homogeneous single-agent orbit after burn-in. Throws NotOscillating when the orbit collapses.
SynchronizedOrbit synchronized_orbit(const AgentParams& params, const QuarticCoefficients& q,
                                     const OrbitOptions& opt = {});

// 2x2 tangent map J(s_t) - K F'(y_t) H with H = e_y e_y^T.
Eigen::Matrix2d tangent_map(const SynchronizedOrbit& orbit, int t, double k);

struct LyapunovOptions {
    int burn_in = 1000;  // tangent transient discarded before averaging
    int window = 0;      // 0: use every remaining orbit step
};

struct LyapunovEstimate {
    double k = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mean_log_det = 0.0;
    std::vector<double> log_det;  // per averaged step
};

LyapunovEstimate mode_lyapunov(const SynchronizedOrbit& orbit, double k, const LyapunovOptions& opt = {});

struct MsfPoint {
    double k;
    double mu1;
    double mu2;
};

std::vector<MsfPoint> master_stability_function(const SynchronizedOrbit& orbit, const std::vector<double>& k_grid,
                                                const LyapunovOptions& opt = {}, int jobs = 1);

// log|det M_t| for every orbit step.
std::vector<double> time_resolved_volume_rate(const SynchronizedOrbit& orbit, double k);

// Deviation vectors are interleaved per node: (x_1, y_1, x_2, y_2, ...).
Eigen::VectorXd to_eigenbasis(const Eigen::VectorXd& xi, const SpectralDecomposition& spec);
Eigen::VectorXd from_eigenbasis(const Eigen::VectorXd& zeta, const SpectralDecomposition& spec);
double condition_number(const Eigen::MatrixXd& q);

struct PropagationOptions {
    double consistency_tol = -1.0;  // < 0: 1e-6 symmetric, 1e-4 otherwise
    double warn_fraction = 0.2;
};

struct ShockResponse {
    int tau = 0;
    Eigen::MatrixXd xi;    // rows: steps 0..n, cols: 2N interleaved
    Eigen::MatrixXd zeta;  // same layout per mode
    Eigen::MatrixXd nonlinear_y;    // perturbed full system, rows aligned with xi
    Eigen::MatrixXd unperturbed_y;  // synchronized orbit repeated per node
    double rmse = 0.0;
    double phase_shift = 0.0;  // steps; positive: perturbed orbit leads
    int rmse_window = 0;
    bool large_shock_warning = false;
    double max_consistency_error = 0.0;
};

ShockResponse propagate_deviations(const SynchronizedOrbit& orbit, const SpectralDecomposition& spec,
                                   const Eigen::VectorXd& xi_tau, int tau, int steps,
                                   const PropagationOptions& opt = {});

struct ShockCompareOptions {
    int steps = 0;            // 0: six orbit periods
    int rmse_periods = 3;
    int phase_periods = 3;
    bool inject_x = false;
    PropagationOptions propagation;
};

// y-shock per node (x-shock optional, same layout) injected at orbit index tau.
ShockResponse shock_response_compare(const InteractionNetwork& net, const SynchronizedOrbit& orbit,
                                     const Eigen::VectorXd& y_shock, int tau, const ShockCompareOptions& opt = {},
                                     const Eigen::VectorXd& x_shock = {});

// Cross-correlation lag of `a` relative to `b` maximizing correlation over |lag| <= max_lag,
// refined by a parabola. Positive: `a` leads `b`.
double lead_lag(const std::vector<double>& a, const std::vector<double>& b, int max_lag);

enum class CyclePoint { Peak, Trough, Recession, Expansion };

// Orbit index in [from, from + period) at the requested point of the cycle.
int cycle_point(const SynchronizedOrbit& orbit, CyclePoint which, int from = 0);

// Steps until |mode| first falls below fraction * initial magnitude; -1 if never.
int decay_time(const std::vector<double>& magnitude, double fraction);

}  // namespace cyclesync
