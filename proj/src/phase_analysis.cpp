#include "cyclesync/phase_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "cyclesync/error.hpp"

namespace cyclesync {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double interquartile_range(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    auto quantile = [&](double p) {
        const double pos = p * (v.size() - 1);
        const size_t lo = static_cast<size_t>(std::floor(pos));
        const size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    };
    return quantile(0.75) - quantile(0.25);
}

std::vector<int> detect_peaks(const std::vector<double>& s, int min_separation, double min_prominence) {
    require(min_separation >= 1, "min_separation must be at least 1");
    const int n = static_cast<int>(s.size());
    require(n > 2 * min_separation, "series too short for the peak separation");

    // local maxima; flat tops resolve to their midpoint
    std::vector<int> cand;
    for (int i = 1; i < n - 1; ++i) {
        if (!(s[i] > s[i - 1])) continue;
        int j = i;
        while (j + 1 < n - 1 && s[j + 1] == s[i]) ++j;
        if (s[j + 1] < s[i]) {
            cand.push_back((i + j) / 2);
            i = j;
        }
    }

    // distance thinning: taller peaks first
    std::vector<int> order(cand.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[cand[a]] > s[cand[b]]; });
    std::vector<char> keep(cand.size(), 1);
    for (int k : order) {
        if (!keep[k]) continue;
        for (int j = k - 1; j >= 0 && cand[k] - cand[j] < min_separation; --j) keep[j] = 0;
        for (size_t j = k + 1; j < cand.size() && cand[j] - cand[k] < min_separation; ++j) keep[j] = 0;
    }

    std::vector<int> peaks;
    for (size_t k = 0; k < cand.size(); ++k) {
        if (!keep[k]) continue;
        const int p = cand[k];
        double left = s[p];
        for (int i = p - 1; i >= 0 && s[i] <= s[p]; --i) left = std::min(left, s[i]);
        double right = s[p];
        for (int i = p + 1; i < n && s[i] <= s[p]; ++i) right = std::min(right, s[i]);
        const double prominence = s[p] - std::max(left, right);
        if (prominence >= min_prominence) peaks.push_back(p);
    }
    if (peaks.size() < 3)
        fail(ErrorCode::TooFewPeaks, "found " + std::to_string(peaks.size()) + " peaks, need at least 3");
    return peaks;
}

std::vector<int> detect_peaks(const std::vector<double>& series, const PeakOptions& opt) {
    const double prom = opt.min_prominence >= 0.0 ? opt.min_prominence
                                                  : opt.prominence_fraction * interquartile_range(series);
    return detect_peaks(series, opt.min_separation, prom);
}

double phase_at(int t, const std::vector<int>& peaks) {
    if (peaks.size() < 2 || t < peaks.front() || t >= peaks.back())
        fail(ErrorCode::PhaseUndefined, "t=" + std::to_string(t) + " is not between two peaks");
    auto it = std::upper_bound(peaks.begin(), peaks.end(), t);
    const int tr = *it;
    const int tl = *(it - 1);
    return kTwoPi * (t - tl) / double(tr - tl);
}

double PhaseSeries::period() const { return kTwoPi / omega; }

PhaseSeries phase_series(const std::vector<double>& series, const PeakOptions& opt) {
    PhaseSeries ps;
    ps.peaks = detect_peaks(series, opt);
    ps.first = ps.peaks.front();
    ps.last = ps.peaks.back();
    ps.phase.resize(ps.last - ps.first);
    size_t k = 0;
    for (int t = ps.first; t < ps.last; ++t) {
        while (ps.peaks[k + 1] <= t) ++k;
        ps.phase[t - ps.first] = kTwoPi * (t - ps.peaks[k]) / double(ps.peaks[k + 1] - ps.peaks[k]);
    }
    ps.omega = kTwoPi * (ps.peaks.size() - 1) / double(ps.last - ps.first);
    return ps;
}

double dominant_frequency(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    require(n >= 8, "series too short for a periodogram");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    const int kmax = n / 2;
    std::vector<double> power(kmax + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        std::complex<double> acc = 0.0;
        const double w = kTwoPi * k / n;
        for (int t = 0; t < n; ++t) acc += (series[t] - mean) * std::polar(1.0, -w * t);
        power[k] = std::norm(acc);
    }
    int best = 1;
    for (int k = 2; k <= kmax; ++k)
        if (power[k] > power[best]) best = k;
    if (power[best] <= 0.0) fail(ErrorCode::DegenerateSeries, "series has no variance");
    double shift = 0.0;
    if (best > 1 && best < kmax) {
        const double a = power[best - 1], b = power[best], c = power[best + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) shift = 0.5 * (a - c) / denom;
    }
    return kTwoPi * (best + shift) / n;
}

double phase_coherence(const std::vector<std::vector<double>>& phases) {
    require(phases.size() >= 2, "phase coherence needs at least two nodes");
    const size_t len = phases.front().size();
    require(len > 0, "empty phase window");
    for (const auto& p : phases) require(p.size() == len, "phase series lengths differ");
    double total = 0.0;
    for (size_t t = 0; t < len; ++t) {
        std::complex<double> acc = 0.0;
        for (const auto& p : phases) acc += std::polar(1.0, p[t]);
        total += std::abs(acc) / double(phases.size());
    }
    return total / double(len);
}

double phase_coherence(const std::vector<PhaseSeries>& phases) {
    require(phases.size() >= 2, "phase coherence needs at least two nodes");
    int lo = phases.front().first, hi = phases.front().last;
    for (const auto& p : phases) {
        lo = std::max(lo, p.first);
        hi = std::min(hi, p.last);
    }
    require(hi > lo, "no common window with defined phases");
    std::vector<std::vector<double>> window;
    window.reserve(phases.size());
    for (const auto& p : phases)
        window.emplace_back(p.phase.begin() + (lo - p.first), p.phase.begin() + (hi - p.first));
    return phase_coherence(window);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 3, "correlation needs equal lengths >= 3");
    const double n = double(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) fail(ErrorCode::DegenerateSeries, "series has zero variance");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> column(const Eigen::MatrixXd& m, int c) {
    std::vector<double> v(m.rows());
    for (Eigen::Index t = 0; t < m.rows(); ++t) v[t] = m(t, c);
    return v;
}

double mean_pairwise_correlation(const Eigen::MatrixXd& cols) {
    const int n = static_cast<int>(cols.cols());
    require(n >= 2, "need at least two series");
    std::vector<std::vector<double>> s(n);
    for (int i = 0; i < n; ++i) s[i] = column(cols, i);
    double total = 0.0;
    int pairs = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            total += pearson(s[i], s[j]);
            ++pairs;
        }
    return total / pairs;
}

FrequencyMeasure measure_frequencies(const Eigen::MatrixXd& y, const PeakOptions& opt, bool fourier) {
    FrequencyMeasure m;
    for (int i = 0; i < y.cols(); ++i) {
        const auto s = column(y, i);
        m.phases.push_back(phase_series(s, opt));
        m.omega.push_back(fourier ? dominant_frequency(s) : m.phases.back().omega);
    }
    return m;
}

double relative_spread(const std::vector<double>& omega) {
    require(!omega.empty(), "no frequencies");
    const auto [lo, hi] = std::minmax_element(omega.begin(), omega.end());
    const double mean = std::accumulate(omega.begin(), omega.end(), 0.0) / omega.size();
    return (*hi - *lo) / mean;
}

bool is_entrained(const std::vector<double>& omega, double spread_tol) {
    return relative_spread(omega) < spread_tol;
}

std::vector<double> linspace(double lo, double hi, int n) {
    require(n >= 1, "linspace needs n >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / double(n - 1);
    return v;
}

namespace {

std::vector<AgentParams> heterogeneous_params(const std::vector<double>& alpha1, double alpha2, double delta,
                                              const QuarticCoefficients& q) {
    std::vector<AgentParams> p;
    p.reserve(alpha1.size());
    for (double a1 : alpha1) p.push_back(calibrated_params(a1, alpha2, delta, q));
    return p;
}

struct SeedOutcome {
    std::vector<double> omega;
    double coherence = 0.0;
    double correlation = 0.0;
};

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

}  // namespace

EntrainmentResult epsilon_sweep(const Adjacency& adj, const QuarticCoefficients& q, const SweepConfig& cfg) {
    require(static_cast<int>(cfg.alpha1.size()) == adj.n, "one alpha1 per node is required");
    require(!cfg.eps_grid.empty(), "empty eps grid");
    require(cfg.seeds >= 1, "seeds must be positive");
    const auto params = heterogeneous_params(cfg.alpha1, cfg.alpha2, cfg.delta, q);
    const double fp1 = eval_f_prime(q, 1.0);
    // An unstable fixed point is required; sustained oscillation is then confirmed by the uncoupled run.
    for (size_t i = 0; i < params.size(); ++i) {
        const auto c = classify_stability(jacobian_at(params[i], fp1));
        if (c == StabilityClass::StableNode || c == StabilityClass::StableFocus)
            fail(ErrorCode::InvalidArgument, "uncoupled agent " + std::to_string(i) + " has a stable fixed point");
    }

    // All abstract nodes share one sector and one country, so v and z act as common shocks.
    auto prepare = [&](double eps) {
        InteractionNetwork net = uniform_coupling(adj, eps);
        net.sectors = {"common"};
        net.countries = {"common"};
        for (auto& n : net.nodes) {
            n.sector = 0;
            n.country = 0;
        }
        return net;
    };

    EntrainmentResult res;
    {
        SimulationConfig sim = cfg.sim;
        const auto traj = simulate(prepare(0.0), params, q, ShockConfig{}, sim);
        res.uncoupled_omega = measure_frequencies(traj.y, cfg.peaks, false).omega;
    }

    const int ne = static_cast<int>(cfg.eps_grid.size());
    std::vector<SeedOutcome> outcomes(ne * cfg.seeds);
    parallel_for(ne * cfg.seeds, cfg.jobs, [&](int k) {
        const int e = k / cfg.seeds;
        const int s = k % cfg.seeds;
        SimulationConfig sim = cfg.sim;
        sim.seed = cfg.sim.seed + static_cast<std::uint64_t>(s);
        const auto traj = simulate(prepare(cfg.eps_grid[e]), params, q, cfg.shocks, sim);
        const auto fm = measure_frequencies(traj.y, cfg.peaks, cfg.fourier);
        outcomes[k] = {fm.omega, phase_coherence(fm.phases), mean_pairwise_correlation(traj.y)};
    });

    for (int e = 0; e < ne; ++e) {
        SweepRow row;
        row.eps = cfg.eps_grid[e];
        row.seeds = cfg.seeds;
        row.omega.assign(adj.n, 0.0);
        std::vector<double> coh, cor;
        for (int s = 0; s < cfg.seeds; ++s) {
            const auto& o = outcomes[e * cfg.seeds + s];
            for (int i = 0; i < adj.n; ++i) row.omega[i] += o.omega[i] / cfg.seeds;
            coh.push_back(o.coherence);
            cor.push_back(o.correlation);
        }
        row.coherence = mean_of(coh);
        row.coherence_sd = sd_of(coh);
        row.correlation = mean_of(cor);
        row.correlation_sd = sd_of(cor);
        row.spread = relative_spread(row.omega);
        row.entrained = row.spread < cfg.spread_tol;
        res.rows.push_back(std::move(row));
    }
    return res;
}

SyncCentralityResult sync_centrality(const InteractionNetwork& net, const QuarticCoefficients& q,
                                     const SyncCentralityConfig& cfg) {
    const int n = net.size();
    require(static_cast<int>(cfg.alpha1_grid.size()) == n, "alpha1 grid needs one value per node");
    require(cfg.draws >= 1, "draws must be positive");
    net.validate(1e-9);

    const auto grid = cfg.alpha1_grid;
    const auto focus_it = cfg.mode == SyncMode::L ? std::max_element(grid.begin(), grid.end())
                                                  : std::min_element(grid.begin(), grid.end());
    const double focus_value = *focus_it;
    std::vector<double> rest = grid;
    rest.erase(rest.begin() + (focus_it - grid.begin()));

    auto common_frequency = [&](const InteractionNetwork& w, const std::vector<double>& alpha1,
                                std::uint64_t seed, const std::string& what) {
        SimulationConfig sim = cfg.sim;
        sim.seed = seed;
        const auto traj = simulate(w, heterogeneous_params(alpha1, cfg.alpha2, cfg.delta, q), q, ShockConfig{}, sim);
        const auto fm = measure_frequencies(traj.y, cfg.peaks, false);
        if (!is_entrained(fm.omega, cfg.spread_tol))
            fail(ErrorCode::EntrainmentFailure, what + ": relative frequency spread " +
                                                    std::to_string(relative_spread(fm.omega)));
        return mean_of(fm.omega);
    };

    std::vector<double> freq(static_cast<size_t>(n) * cfg.draws);
    parallel_for(n * cfg.draws, cfg.jobs, [&](int k) {
        const int f = k / cfg.draws;
        const int d = k % cfg.draws;
        auto rng = make_stream(cfg.seed, StreamLayer::Draw, static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(d));
        std::vector<double> others = rest;
        std::shuffle(others.begin(), others.end(), rng);
        std::vector<double> alpha1(n);
        for (int i = 0, r = 0; i < n; ++i) alpha1[i] = i == f ? focus_value : others[r++];
        freq[k] = common_frequency(net, alpha1, rng(),
                                   "focus node " + std::to_string(f) + ", draw " + std::to_string(d));
    });

    SyncCentralityResult res;
    res.draws = cfg.draws;
    res.benchmark = common_frequency(uniform_matrix(n), grid, cfg.seed, "uniform benchmark");
    res.mean_frequency.resize(n);
    res.frequency_stderr.resize(n);
    res.raw_diff.resize(n);
    for (int f = 0; f < n; ++f) {
        std::vector<double> v(freq.begin() + f * cfg.draws, freq.begin() + (f + 1) * cfg.draws);
        res.mean_frequency[f] = mean_of(v);
        res.frequency_stderr[f] = sd_of(v) / std::sqrt(double(cfg.draws));
        res.raw_diff[f] = res.benchmark - res.mean_frequency[f];
    }
    const double lo = *std::min_element(res.raw_diff.begin(), res.raw_diff.end());
    const double hi = *std::max_element(res.raw_diff.begin(), res.raw_diff.end());
    res.score.resize(n);
    res.stderr_.resize(n);
    double total = 0.0;
    for (int f = 0; f < n; ++f) total += res.raw_diff[f] + std::abs(lo);
    // Differences at rounding level carry no ranking information.
    if (hi - lo <= 1e-12 * std::abs(res.benchmark) || !(total > 0.0)) {
        std::fill(res.score.begin(), res.score.end(), 1.0 / n);
        std::fill(res.stderr_.begin(), res.stderr_.end(), 0.0);
    } else {
        for (int f = 0; f < n; ++f) {
            res.score[f] = (res.raw_diff[f] + std::abs(lo)) / total;
            res.stderr_[f] = res.frequency_stderr[f] / total;
        }
    }
    return res;
}

}  // namespace cyclesync
