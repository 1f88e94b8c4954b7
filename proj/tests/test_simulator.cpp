#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>

#include "cyclesync/error.hpp"
#include "cyclesync/simulator.hpp"
#include "support.hpp"

using namespace cyclesync;

namespace {

const QuarticCoefficients kQ = QuarticCoefficients::reference();

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Config;
}

AgentParams cycle_agent() { return calibrated_params(-0.04, 0.4, 0.1, kQ); }

SimulationConfig short_run(int steps = 400, int burn = 100) {
    SimulationConfig c;
    c.steps = steps;
    c.burn_in = burn;
    return c;
}

}  // namespace

TEST_CASE("AR(1) moments") {
    auto rng = make_stream(3, StreamLayer::Idiosyncratic, 0);
    const double rho = 0.5, sigma = 0.1;
    const auto u = ar1_path(rho, sigma, 400000, rng);
    CHECK(u[0] == 0.0);
    const double mean = std::accumulate(u.begin() + 1000, u.end(), 0.0) / (u.size() - 1000);
    double var = 0.0, cov = 0.0;
    for (size_t t = 1000; t < u.size(); ++t) {
        var += (u[t] - mean) * (u[t] - mean);
        cov += (u[t] - mean) * (u[t - 1] - mean);
    }
    CHECK(std::abs(mean) < 0.002);
    CHECK(var / cov == doctest::Approx(1 / rho).epsilon(0.02));
    var /= (u.size() - 1000);
    CHECK(var == doctest::Approx(sigma * sigma / (1 - rho * rho)).epsilon(0.02));

    auto r2 = make_stream(3, StreamLayer::Idiosyncratic, 0);
    const auto zero = ar1_path(0.9, 0.0, 50, r2);
    CHECK(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));
    CHECK_THROWS_AS(ar1_path(1.0, 0.1, 10, r2), Error);
    CHECK_THROWS_AS(ar1_path(0.5, -0.1, 10, r2), Error);
}

TEST_CASE("simulation is deterministic per seed") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Complete, 4), 0.2);
    const auto params = replicate_params(cycle_agent(), 4);
    ShockConfig sh;
    sh.idiosyncratic = {0.5, 0.05};
    auto cfg = short_run();
    cfg.seed = 17;
    const auto a = simulate(net, params, kQ, sh, cfg);
    const auto b = simulate(net, params, kQ, sh, cfg);
    CHECK(a.y == b.y);
    CHECK(a.x == b.x);
    CHECK(a.u == b.u);
    cfg.seed = 18;
    const auto c = simulate(net, params, kQ, sh, cfg);
    CHECK((a.y - c.y).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("shock streams are keyed by node index") {
    ShockConfig sh;
    sh.idiosyncratic = {0.3, 0.1};
    auto cfg = short_run(200, 0);
    const auto small = simulate(uniform_coupling(build_topology(TopologyKind::Complete, 2), 0.0),
                                replicate_params(cycle_agent(), 2), kQ, sh, cfg);
    const auto large = simulate(uniform_coupling(build_topology(TopologyKind::Complete, 5), 0.0),
                                replicate_params(cycle_agent(), 5), kQ, sh, cfg);
    CHECK(small.u.col(0) == large.u.col(0));
    CHECK(small.u.col(1) == large.u.col(1));
    CHECK(small.u.col(0) != small.u.col(1));
}

TEST_CASE("fixed-point start stays at the fixed point without shocks") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Star, 6), 0.3);
    std::vector<AgentParams> params;
    for (double a1 : {-0.1, -0.08, -0.06, -0.05, -0.04, -0.03}) params.push_back(calibrated_params(a1, 0.4, 0.1, kQ));
    auto cfg = short_run(1500, 0);
    cfg.initial = InitialMode::FixedPoint;
    const auto tr = simulate(net, params, kQ, {}, cfg);
    CHECK((tr.y.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((tr.x.array() - 10.0).abs().maxCoeff() < 1e-10);
    CHECK(tr.metadata.at("initial_mode") == "fixed_point");
}

TEST_CASE("identical agents with full mixing collapse onto one path") {
    const auto net = uniform_matrix(5);
    auto p = calibrated_params(-0.04, 0.4, 0.1, kQ);
    auto cfg = short_run(3000, 2000);
    cfg.seed = 4;
    const auto tr = simulate(net, replicate_params(p, 5), kQ, {}, cfg);
    for (int i = 1; i < 5; ++i) CHECK((tr.y.col(i) - tr.y.col(0)).cwiseAbs().maxCoeff() < 1e-10);
    // the common path still cycles
    CHECK(tr.y.col(0).maxCoeff() - tr.y.col(0).minCoeff() > 0.1);

    SimulationConfig same = short_run(300, 0);
    same.initial = InitialMode::Explicit;
    same.initial_x.assign(3, 9.0);
    same.initial_y.assign(3, 1.2);
    const auto ex = simulate(uniform_coupling(build_topology(TopologyKind::Chain, 3), 0.4), replicate_params(p, 3), kQ,
                             {}, same);
    CHECK((ex.y.col(0) - ex.y.col(1)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((ex.y.col(0) - ex.y.col(2)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(ex.y(0, 0) == 1.2);
}

TEST_CASE("burn-in shocks and retained window") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Complete, 3), 0.1);
    ShockConfig sh;
    sh.idiosyncratic = {0.0, 0.02};
    sh.during_burn_in = false;
    auto cfg = short_run(600, 200);
    cfg.retain = 300;
    cfg.stride = 3;
    cfg.initial = InitialMode::FixedPoint;
    const auto tr = simulate(net, replicate_params(cycle_agent(), 3), kQ, sh, cfg);
    CHECK(tr.steps() == 300);
    CHECK(tr.first_step == 200);
    CHECK(tr.u.row(0).isZero());
    // round-off grows along the unstable fixed point during burn-in
    CHECK((tr.y.row(0).array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK(tr.u.bottomRows(299).cwiseAbs().minCoeff() > 0.0);
    CHECK(tr.metadata.at("shocks_during_burn_in") == "false");

    cfg.stride = 7;
    CHECK(code_of([&] { simulate(net, replicate_params(cycle_agent(), 3), kQ, sh, cfg); }) ==
          ErrorCode::InvalidArgument);
    cfg.stride = 1;
    cfg.burn_in = 600;
    CHECK_THROWS_AS(simulate(net, replicate_params(cycle_agent(), 3), kQ, sh, cfg), Error);
}

TEST_CASE("sector and country shocks are shared") {
    FlowTable t;
    for (std::string c : {"A", "B"})
        for (std::string s : {"s1", "s2"}) {
            t.records.push_back({s, c, kFinalDemand, c, 2.0});
            for (std::string k : {"s1", "s2"}) t.records.push_back({s, c, k, c, 1.0});
            t.records.push_back({s, c, "s1", c == "A" ? "B" : "A", 0.2});
        }
    const auto net = build_io_network(t);
    REQUIRE(net.size() == 6);
    ShockConfig sh;
    sh.sector = {0.5, 0.05};
    sh.country = {0.5, 0.03};
    auto cfg = short_run(100, 0);
    const auto tr = simulate(net, replicate_params(cycle_agent(), 6), kQ, sh, cfg);
    CHECK(tr.v.cols() == 2);
    CHECK(tr.z.cols() == 2);
    CHECK(tr.u.isZero());
    CHECK(tr.v.col(0) != tr.v.col(1));
    CHECK(tr.z.col(0) != tr.z.col(1));
}

TEST_CASE("blow-up is reported") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Complete, 2), 0.1);
    const auto p = calibrated_params(-0.04, 1.5, 0.1, kQ);
    auto cfg = short_run(5000, 0);
    CHECK(code_of([&] { simulate(net, replicate_params(p, 2), kQ, {}, cfg); }) == ErrorCode::NumericalBlowup);
    cfg.blowup_bound = 1.05;
    CHECK(code_of([&] { simulate(net, replicate_params(cycle_agent(), 2), kQ, {}, cfg); }) ==
          ErrorCode::NumericalBlowup);
}

TEST_CASE("aggregation helpers") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6};
    CHECK(aggregate_series(s, 2) == std::vector<double>{1.5, 3.5, 5.5});
    CHECK(aggregate_series(s, 1) == s);
    CHECK_THROWS_AS(aggregate_series(s, 4), Error);

    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    Eigen::VectorXd w(3);
    w << 1, 0, 3;
    const auto a = weighted_aggregate(m, w);
    CHECK(a[0] == doctest::Approx(2.5));
    CHECK(a[1] == doctest::Approx(5.5));
    CHECK_THROWS_AS(weighted_aggregate(m, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("metadata and CSV output") {
    const auto net = uniform_coupling(build_topology(TopologyKind::Complete, 2), 0.2);
    auto cfg = short_run(50, 10);
    const auto tr = simulate(net, replicate_params(cycle_agent(), 2), kQ, {}, cfg);
    for (const char* k : {"seed", "steps", "burn_in", "normal_method", "rng", "initial_perturbation", "beta"})
        CHECK(tr.metadata.count(k) == 1);
    CHECK(tr.metadata.at("normal_method") == kNormalMethod);
    write_trajectory_csv(tr, test::scratch_path("simulator_trajectory.csv"));
    std::ifstream in(test::scratch_path("simulator_trajectory.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "node,step,x,y");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 * 40);
    write_metadata_json(tr.metadata, test::scratch_path("simulator_meta.json"));
    std::ifstream j(test::scratch_path("simulator_meta.json"));
    std::getline(j, line);
    CHECK(line == "{");
}
