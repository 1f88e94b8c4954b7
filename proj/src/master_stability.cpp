#include "cyclesync/master_stability.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "cyclesync/error.hpp"
#include "cyclesync/parallel.hpp"
#include "cyclesync/phase_analysis.hpp"
#include "format.hpp"

namespace cyclesync {

SynchronizedOrbit synchronized_orbit(const AgentParams& params, const QuarticCoefficients& q, const OrbitOptions& opt) {
    require(opt.steps > opt.burn_in && opt.burn_in >= 0, "orbit steps must exceed burn_in");
    require(params.delta > 0.0, "delta must be positive");
    SynchronizedOrbit o;
    o.params = params;
    o.q = q;
    AgentState s{(1.0 / params.delta) * (1.0 + opt.offset), 1.0 + opt.offset};
    const int keep = opt.steps - opt.burn_in;
    o.x.reserve(keep);
    o.y.reserve(keep);
    o.fprime.reserve(keep);
    for (int t = 0; t < opt.steps; ++t) {
        if (t >= opt.burn_in) {
            o.x.push_back(s.x);
            o.y.push_back(s.y);
            o.fprime.push_back(eval_f_prime(q, s.y));
        }
        s = map_step(params, q, s, s.y, 0.0);
        if (!std::isfinite(s.y) || std::abs(s.y) > 1e3)
            fail(ErrorCode::NumericalBlowup, "synchronized orbit diverged at step " + std::to_string(t + 1));
    }
    const auto [lo, hi] = std::minmax_element(o.y.begin(), o.y.end());
    if (*hi - *lo < 1e-6) fail(ErrorCode::NotOscillating, "orbit converged to a fixed point");
    o.period = phase_series(o.y).period();
    return o;
}

Eigen::Matrix2d tangent_map(const SynchronizedOrbit& orbit, int t, double k) {
    const auto& p = orbit.params;
    Eigen::Matrix2d m;
    m << 1.0 - p.delta, 1.0, p.alpha1, p.alpha2 + (1.0 - k) * orbit.fprime[t];
    return m;
}

LyapunovEstimate mode_lyapunov(const SynchronizedOrbit& orbit, double k, const LyapunovOptions& opt) {
    require(opt.burn_in >= 0 && opt.burn_in < orbit.size(), "Lyapunov burn-in exceeds the orbit length");
    const int avail = orbit.size() - opt.burn_in;
    const int window = opt.window > 0 ? std::min(opt.window, avail) : avail;
    const int end = opt.burn_in + window;
    LyapunovEstimate est;
    est.k = k;
    est.log_det.reserve(window);
    Eigen::Vector2d q1(1.0, 0.0), q2(0.0, 1.0);
    double s1 = 0.0, s2 = 0.0, sd = 0.0;
    for (int t = 0; t < end; ++t) {
        const Eigen::Matrix2d m = tangent_map(orbit, t, k);
        Eigen::Vector2d a1 = m * q1;
        Eigen::Vector2d a2 = m * q2;
        const double r11 = a1.norm();
        if (!(r11 > 1e-300) || !std::isfinite(r11)) fail(ErrorCode::DegenerateTangent, "tangent vector collapsed");
        q1 = a1 / r11;
        a2 -= q1.dot(a2) * q1;
        const double r22 = a2.norm();
        if (!(r22 > 1e-300) || !std::isfinite(r22)) fail(ErrorCode::DegenerateTangent, "tangent frame collapsed");
        q2 = a2 / r22;
        if (t >= opt.burn_in) {
            const double ld = std::log(std::abs(m.determinant()));
            s1 += std::log(r11);
            s2 += std::log(r22);
            sd += ld;
            est.log_det.push_back(ld);
        }
    }
    est.mu1 = s1 / window;
    est.mu2 = s2 / window;
    if (est.mu2 > est.mu1) std::swap(est.mu1, est.mu2);
    est.mean_log_det = sd / window;
    return est;
}

std::vector<MsfPoint> master_stability_function(const SynchronizedOrbit& orbit, const std::vector<double>& k_grid,
                                                const LyapunovOptions& opt, int jobs) {
    require(!k_grid.empty(), "empty K grid");
    for (double k : k_grid) require(k >= 0.0 && k <= 2.0, "K must lie in [0,2]");
    std::vector<MsfPoint> out(k_grid.size());
    parallel_for(static_cast<int>(k_grid.size()), jobs, [&](int i) {
        const auto e = mode_lyapunov(orbit, k_grid[i], opt);
        out[i] = {k_grid[i], e.mu1, e.mu2};
    });
    return out;
}

std::vector<double> time_resolved_volume_rate(const SynchronizedOrbit& orbit, double k) {
    std::vector<double> r(orbit.size());
    for (int t = 0; t < orbit.size(); ++t) r[t] = std::log(std::abs(tangent_map(orbit, t, k).determinant()));
    return r;
}

double condition_number(const Eigen::MatrixXd& q) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double smin = s[s.size() - 1];
    return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

namespace {

// View an interleaved 2N vector as an N x 2 matrix with rows (x_i, y_i).
Eigen::MatrixXd as_pairs(const Eigen::VectorXd& v) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>>(v.data(), v.size() / 2, 2);
}

Eigen::VectorXd interleave(const Eigen::MatrixXd& pairs) {
    Eigen::VectorXd v(pairs.rows() * 2);
    for (Eigen::Index i = 0; i < pairs.rows(); ++i) {
        v[2 * i] = pairs(i, 0);
        v[2 * i + 1] = pairs(i, 1);
    }
    return v;
}

void check_dimension(const Eigen::VectorXd& v, const SpectralDecomposition& spec) {
    require(v.size() == 2 * spec.size(), "deviation vector must have 2N entries");
}

void check_condition(const SpectralDecomposition& spec) {
    const double c = condition_number(spec.q);
    if (c > 1e8) fail(ErrorCode::IllConditioned, "eigenvector condition number " + detail::fmt_double(c));
}

}  // namespace

Eigen::VectorXd to_eigenbasis(const Eigen::VectorXd& xi, const SpectralDecomposition& spec) {
    check_dimension(xi, spec);
    check_condition(spec);
    return interleave(spec.q_inv * as_pairs(xi));
}

Eigen::VectorXd from_eigenbasis(const Eigen::VectorXd& zeta, const SpectralDecomposition& spec) {
    check_dimension(zeta, spec);
    return interleave(spec.q * as_pairs(zeta));
}

ShockResponse propagate_deviations(const SynchronizedOrbit& orbit, const SpectralDecomposition& spec,
                                   const Eigen::VectorXd& xi_tau, int tau, int steps, const PropagationOptions& opt) {
    check_dimension(xi_tau, spec);
    require(tau >= 0 && steps >= 0 && tau + steps <= orbit.size(), "propagation window exceeds the orbit");
    const int n = spec.size();
    const double tol = opt.consistency_tol >= 0.0 ? opt.consistency_tol : (spec.symmetric ? 1e-6 : 1e-4);
    const auto& p = orbit.params;
    const Eigen::MatrixXd b = spec.coupling * spec.b;
    const Eigen::VectorXd k = spec.coupling * spec.lambda;

    ShockResponse r;
    r.tau = tau;
    r.xi.resize(steps + 1, 2 * n);
    r.zeta.resize(steps + 1, 2 * n);
    r.large_shock_warning = xi_tau.cwiseAbs().maxCoeff() > opt.warn_fraction;

    Eigen::MatrixXd xi = as_pairs(xi_tau);
    Eigen::MatrixXd zeta = as_pairs(to_eigenbasis(xi_tau, spec));
    const double scale0 = std::max(xi.norm(), 1e-300);
    for (int t = 0; t <= steps; ++t) {
        r.xi.row(t) = interleave(xi).transpose();
        r.zeta.row(t) = interleave(zeta).transpose();
        const double err = (xi - spec.q * zeta).norm() / std::max(xi.norm(), 1e-12 * scale0);
        r.max_consistency_error = std::max(r.max_consistency_error, err);
        if (err > tol)
            fail(ErrorCode::ConsistencyBreach, "node and eigenbasis propagation differ by " + detail::fmt_double(err) +
                                                   " at step " + std::to_string(t));
        if (t == steps) break;
        const double fp = orbit.fprime[tau + t];
        Eigen::MatrixXd nxi(n, 2), nzeta(n, 2);
        nxi.col(0) = (1.0 - p.delta) * xi.col(0) + xi.col(1);
        nxi.col(1) = p.alpha1 * xi.col(0) + (p.alpha2 + fp) * xi.col(1) - fp * (b * xi.col(1));
        nzeta.col(0) = (1.0 - p.delta) * zeta.col(0) + zeta.col(1);
        nzeta.col(1) = p.alpha1 * zeta.col(0) + ((p.alpha2 + fp) * Eigen::VectorXd::Ones(n) - fp * k)
                                                    .cwiseProduct(zeta.col(1));
        xi.swap(nxi);
        zeta.swap(nzeta);
    }
    return r;
}

double lead_lag(const std::vector<double>& a, const std::vector<double>& b, int max_lag) {
    require(max_lag >= 1, "max_lag must be positive");
    require(b.size() == a.size() + 2 * static_cast<size_t>(max_lag), "reference must extend max_lag on both sides");
    std::vector<double> corr(2 * max_lag + 1);
    for (int l = -max_lag; l <= max_lag; ++l) {
        std::vector<double> seg(b.begin() + (max_lag + l), b.begin() + (max_lag + l) + a.size());
        corr[l + max_lag] = pearson(a, seg);
    }
    const int best = static_cast<int>(std::max_element(corr.begin(), corr.end()) - corr.begin());
    double shift = 0.0;
    if (best > 0 && best < 2 * max_lag) {
        const double c0 = corr[best - 1], c1 = corr[best], c2 = corr[best + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom != 0.0) shift = 0.5 * (c0 - c2) / denom;
    }
    return best - max_lag + shift;
}

ShockResponse shock_response_compare(const InteractionNetwork& net, const SynchronizedOrbit& orbit,
                                     const Eigen::VectorXd& y_shock, int tau, const ShockCompareOptions& opt,
                                     const Eigen::VectorXd& x_shock) {
    const int n = net.size();
    require(y_shock.size() == n, "one y shock per node is required");
    require(x_shock.size() == 0 || x_shock.size() == n, "x shock must be empty or one per node");
    require(opt.inject_x || x_shock.size() == 0 || x_shock.isZero(), "x injection is disabled");
    const int period = static_cast<int>(std::lround(orbit.period));
    const int steps = opt.steps > 0 ? opt.steps : 6 * period;
    const int max_lag = std::max(1, period / 2);
    const int rmse_window = std::min(steps, opt.rmse_periods * period);
    const int phase_window = std::min(steps + 1, opt.phase_periods * period);
    require(tau >= max_lag && tau + steps + max_lag < orbit.size(), "orbit too short for the requested window");

    const auto spec = generalized_laplacian(net);
    Eigen::VectorXd xi0 = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        xi0[2 * i + 1] = y_shock[i];
        if (x_shock.size() == n) xi0[2 * i] = x_shock[i];
    }
    ShockResponse r = propagate_deviations(orbit, spec, xi0, tau, steps, opt.propagation);
    r.rmse_window = rmse_window;

    r.nonlinear_y.resize(steps + 1, n);
    r.unperturbed_y.resize(steps + 1, n);
    const AgentParams& p = orbit.params;
    Eigen::VectorXd x(n), y(n), ybar(n);
    for (int i = 0; i < n; ++i) {
        x[i] = orbit.x[tau] + xi0[2 * i];
        y[i] = orbit.y[tau] + xi0[2 * i + 1];
    }
    for (int t = 0; t <= steps; ++t) {
        r.nonlinear_y.row(t) = y.transpose();
        r.unperturbed_y.row(t).setConstant(orbit.y[tau + t]);
        if (t == steps) break;
        ybar.noalias() = net.w * y;
        for (int i = 0; i < n; ++i) {
            const AgentState s = map_step(p, orbit.q, {x[i], y[i]}, ybar[i], 0.0);
            x[i] = s.x;
            y[i] = s.y;
        }
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e3)
            fail(ErrorCode::NumericalBlowup, "perturbed system diverged at step " + std::to_string(t + 1));
    }

    double se = 0.0;
    for (int t = 0; t <= rmse_window; ++t)
        for (int i = 0; i < n; ++i) {
            const double lin = orbit.y[tau + t] + r.xi(t, 2 * i + 1);
            const double d = lin - r.nonlinear_y(t, i);
            se += d * d;
        }
    r.rmse = std::sqrt(se / ((rmse_window + 1.0) * n));

    const int start = steps + 1 - phase_window;
    std::vector<double> a(phase_window), b(phase_window + 2 * max_lag);
    for (int t = 0; t < phase_window; ++t) a[t] = r.nonlinear_y.row(start + t).mean();
    for (int t = 0; t < phase_window + 2 * max_lag; ++t) b[t] = orbit.y[tau + start - max_lag + t];
    r.phase_shift = lead_lag(a, b, max_lag);
    return r;
}

int cycle_point(const SynchronizedOrbit& orbit, CyclePoint which, int from) {
    const int period = static_cast<int>(std::lround(orbit.period));
    require(from >= 0 && from + period + 1 < orbit.size(), "orbit too short for cycle_point");
    int best = from;
    auto growth = [&](int t) { return orbit.y[t + 1] - orbit.y[t]; };
    for (int t = from; t < from + period; ++t) {
        switch (which) {
            case CyclePoint::Peak:
                if (orbit.y[t] > orbit.y[best]) best = t;
                break;
            case CyclePoint::Trough:
                if (orbit.y[t] < orbit.y[best]) best = t;
                break;
            case CyclePoint::Recession:
                if (growth(t) < growth(best)) best = t;
                break;
            case CyclePoint::Expansion:
                if (growth(t) > growth(best)) best = t;
                break;
        }
    }
    return best;
}

int decay_time(const std::vector<double>& magnitude, double fraction) {
    require(!magnitude.empty(), "empty magnitude series");
    const double threshold = fraction * magnitude.front();
    if (magnitude.back() >= threshold) return -1;
    int last_above = 0;
    for (size_t t = 0; t < magnitude.size(); ++t)
        if (magnitude[t] >= threshold) last_above = static_cast<int>(t);
    return last_above + 1;
}

}  // namespace cyclesync
