#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "cyclesync/error.hpp"
#include "cyclesync/phase_analysis.hpp"
#include "support.hpp"

using namespace cyclesync;

namespace {

const QuarticCoefficients kQ = QuarticCoefficients::reference();
constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Config;
}

template <typename T>
std::vector<T> split(const std::string& s) {
    std::istringstream in(s);
    std::vector<T> out;
    T v;
    while (in >> v) out.push_back(v);
    return out;
}

std::vector<double> sine(int n, double period, double phase = 0.0) {
    std::vector<double> s(n);
    for (int t = 0; t < n; ++t) s[t] = std::sin(2 * kPi * t / period + phase);
    return s;
}

}  // namespace

TEST_CASE("peak detection matches scipy") {
    int cases = 0;
    for (const auto& r : test::oracle("peaks.csv", {"case", "series", "peaks"})) {
        const auto series = split<double>(r[1]);
        const auto expected = split<int>(r[2]);
        PeakOptions opt;
        opt.min_separation = 5;
        opt.prominence_fraction = 0.3;
        CHECK(detect_peaks(series, opt) == expected);
        ++cases;
    }
    CHECK(cases == 5);
}

TEST_CASE("peak detection edge cases") {
    CHECK(detect_peaks(sine(100, 20), 5, 0.5) == std::vector<int>{5, 25, 45, 65, 85});
    // flat top resolves to its midpoint
    std::vector<double> flat{0, 1, 2, 2, 2, 1, 0, 1, 2, 1, 0, 1, 3, 1, 0};
    CHECK(detect_peaks(flat, 1, 0.0) == std::vector<int>{3, 8, 12});
    CHECK(code_of([] { detect_peaks(std::vector<double>(50, 1.0), 5, 0.0); }) == ErrorCode::TooFewPeaks);
    CHECK(code_of([] { detect_peaks(sine(30, 20), 5, 0.1); }) == ErrorCode::TooFewPeaks);
    CHECK(interquartile_range({1, 2, 3, 4, 5}) == doctest::Approx(2.0));
}

TEST_CASE("linear phase between peaks") {
    const std::vector<int> peaks{10, 20, 35};
    CHECK(phase_at(10, peaks) == 0.0);
    CHECK(phase_at(15, peaks) == doctest::Approx(kPi));
    CHECK(phase_at(20, peaks) == 0.0);
    CHECK(phase_at(30, peaks) == doctest::Approx(2 * kPi * 10 / 15));
    CHECK(phase_at(13, {5, 12, 19}) == doctest::Approx(2 * kPi / 7));
    CHECK(code_of([&] { phase_at(9, peaks); }) == ErrorCode::PhaseUndefined);
    CHECK(code_of([&] { phase_at(35, peaks); }) == ErrorCode::PhaseUndefined);

    const auto ps = phase_series(sine(400, 25));
    CHECK(ps.period() == doctest::Approx(25.0));
    CHECK(ps.first == 6);
    CHECK(ps.phase.size() == size_t(ps.last - ps.first));
    for (double p : ps.phase) CHECK((p >= 0.0 && p < 2 * kPi));
}

TEST_CASE("phase coherence") {
    std::vector<double> a(100), b(100), c(100);
    for (int t = 0; t < 100; ++t) {
        a[t] = 0.1 * t;
        b[t] = 0.1 * t + kPi;
        c[t] = 0.1 * t + 2 * kPi / 3;
    }
    CHECK(phase_coherence(std::vector<std::vector<double>>{a, a, a}) == doctest::Approx(1.0));
    CHECK(phase_coherence(std::vector<std::vector<double>>{a, b}) == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<double> d(100);
    for (int t = 0; t < 100; ++t) d[t] = 0.1 * t + 4 * kPi / 3;
    CHECK(std::abs(phase_coherence(std::vector<std::vector<double>>{a, c, d})) < 1e-12);
    // constant offset of pi/2 between two nodes
    for (int t = 0; t < 100; ++t) b[t] = a[t] + kPi / 2;
    CHECK(phase_coherence(std::vector<std::vector<double>>{a, b}) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK_THROWS_AS(phase_coherence(std::vector<std::vector<double>>{a}), Error);

    const auto p1 = phase_series(sine(300, 20));
    const auto p2 = phase_series(sine(300, 20, 0.5));
    CHECK(phase_coherence(std::vector<PhaseSeries>{p1, p2}) == doctest::Approx(std::cos(0.25)).epsilon(0.02));
}

TEST_CASE("correlations and spectral frequency") {
    const std::vector<double> x{1, 2, 4, 3, 5};
    std::vector<double> y, z;
    for (double v : x) {
        y.push_back(2 * v + 1);
        z.push_back(-v);
    }
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    CHECK(pearson(x, z) == doctest::Approx(-1.0));
    Eigen::MatrixXd m(5, 3);
    for (int i = 0; i < 5; ++i) m.row(i) << x[i], y[i], z[i];
    CHECK(mean_pairwise_correlation(m) == doctest::Approx(-1.0 / 3.0));
    CHECK(column(m, 2) == z);

    CHECK(dominant_frequency(sine(1000, 2 * kPi / 0.3)) == doctest::Approx(0.3).epsilon(0.01));
    CHECK(code_of([] { dominant_frequency(std::vector<double>(64, 2.0)); }) == ErrorCode::DegenerateSeries);

    CHECK(relative_spread({1.0, 1.0, 1.0}) == 0.0);
    CHECK(relative_spread({0.9, 1.1}) == doctest::Approx(0.2));
    CHECK(is_entrained({0.2, 0.2005}, 0.01));
    CHECK_FALSE(is_entrained({0.2, 0.25}, 0.01));
    CHECK(linspace(0, 1, 5) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
}

TEST_CASE("single agent cycles with the reference period") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Complete, 2), 0.0);
    SimulationConfig sim;
    sim.steps = 3000;
    sim.burn_in = 1000;
    const auto tr = simulate(net, replicate_params(calibrated_params(-0.04, 0.4, 0.1, kQ), 2), kQ, {}, sim);
    const auto fm = measure_frequencies(tr.y);
    for (double w : fm.omega) CHECK(2 * kPi / w == doctest::Approx(36.5).epsilon(0.02));
    const auto ff = measure_frequencies(tr.y, {}, true);
    CHECK(ff.omega[0] == doctest::Approx(fm.omega[0]).epsilon(0.03));
}

TEST_CASE("epsilon sweep entrains heterogeneous agents") {
    SweepConfig cfg;
    cfg.alpha1 = linspace(-0.07, -0.04, 4);
    cfg.eps_grid = {0.0, 0.5};
    cfg.sim.steps = 3000;
    cfg.sim.burn_in = 1500;
    const auto res = epsilon_sweep(build_topology(TopologyKind::Complete, 4), kQ, cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK_FALSE(res.rows[0].entrained);
    CHECK(res.rows[1].entrained);
    CHECK(res.rows[1].coherence > res.rows[0].coherence);
    CHECK(res.rows[1].correlation > 0.9);
    // uncoupled frequencies rise with |alpha1|
    for (int i = 1; i < 4; ++i) CHECK(res.uncoupled_omega[i] < res.uncoupled_omega[i - 1]);

    cfg.alpha1 = {-0.11, -0.05, -0.05, -0.05};
    cfg.delta = 0.5;
    CHECK(code_of([&] { epsilon_sweep(build_topology(TopologyKind::Complete, 4), kQ, cfg); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("sweep results do not depend on the worker count") {
    SweepConfig cfg;
    cfg.alpha1 = linspace(-0.06, -0.04, 3);
    cfg.eps_grid = {0.1, 0.3};
    cfg.seeds = 2;
    cfg.shocks.idiosyncratic = {0.5, 0.01};
    cfg.sim.steps = 2000;
    cfg.sim.burn_in = 1000;
    const auto one = epsilon_sweep(build_topology(TopologyKind::Chain, 3), kQ, cfg);
    cfg.jobs = 3;
    const auto many = epsilon_sweep(build_topology(TopologyKind::Chain, 3), kQ, cfg);
    for (size_t e = 0; e < one.rows.size(); ++e) {
        CHECK(one.rows[e].omega == many.rows[e].omega);
        CHECK(one.rows[e].coherence == many.rows[e].coherence);
    }
}

TEST_CASE("sync centrality ranks the hub first") {
    SyncCentralityConfig cfg;
    cfg.alpha1_grid = linspace(-0.06, -0.03, 5);
    cfg.draws = 3;
    cfg.sim.steps = 3000;
    cfg.sim.burn_in = 1000;
    cfg.jobs = 2;
    const auto net = uniform_coupling(build_topology(TopologyKind::Star, 5), 0.5);
    const auto res = sync_centrality(net, kQ, cfg);
    REQUIRE(res.score.size() == 5);
    double total = 0.0;
    for (double s : res.score) total += s;
    CHECK(total == doctest::Approx(1.0));
    for (int i = 1; i < 5; ++i) CHECK(res.score[0] > res.score[i]);

    const auto flat = sync_centrality(uniform_matrix(5), kQ, cfg);
    // permutation-symmetric network: frequencies agree up to peak-timing resolution
    for (double d : flat.raw_diff) CHECK(std::abs(d) < 1e-3 * flat.benchmark);
}
