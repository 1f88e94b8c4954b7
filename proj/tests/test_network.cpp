#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <tuple>
#include <numeric>
#include <random>

#include "cyclesync/error.hpp"
#include "cyclesync/network.hpp"
#include "support.hpp"

using namespace cyclesync;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Config;  // sentinel: nothing thrown
}

FlowTable random_table(int countries, int sectors, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    FlowTable t;
    for (int c = 0; c < countries; ++c)
        for (int s = 0; s < sectors; ++s)
            for (int d = 0; d < countries; ++d) {
                t.records.push_back({"S" + std::to_string(s), "C" + std::to_string(c), kFinalDemand,
                                     "C" + std::to_string(d), (c == d ? 3.0 : 0.2) * u(rng)});
                for (int k = 0; k < sectors; ++k)
                    t.records.push_back({"S" + std::to_string(s), "C" + std::to_string(c), "S" + std::to_string(k),
                                         "C" + std::to_string(d), (c == d ? 1.0 : 0.1) * u(rng)});
            }
    return t;
}

double max_row_error(const InteractionNetwork& net) {
    return (net.w.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

}  // namespace

TEST_CASE("topology builders") {
    const auto star = build_topology(TopologyKind::Star, 10);
    CHECK(star.degree(0) == 9);
    for (int i = 1; i < 10; ++i) CHECK(star.degree(i) == 1);

    TopologyOptions opt;
    opt.bridge_a = 0;
    opt.bridge_b = 0;
    const auto tc = build_topology(TopologyKind::TwoClique, 6, opt);
    CHECK(tc.degrees() == std::vector<int>{3, 2, 2, 3, 2, 2});

    const auto chain = build_topology(TopologyKind::Chain, 10);
    CHECK(chain.degree(0) == 1);
    CHECK(chain.degree(9) == 1);
    for (int i = 1; i < 9; ++i) CHECK(chain.degree(i) == 2);

    const auto complete = build_topology(TopologyKind::Complete, 5);
    for (int i = 0; i < 5; ++i) CHECK(complete.degree(i) == 4);
    CHECK(complete.connected());

    CHECK_THROWS_AS(build_topology(TopologyKind::Star, 1), Error);
    CHECK_THROWS_AS(parse_topology("ring"), Error);
    CHECK(parse_topology("two_clique") == TopologyKind::TwoClique);

    const auto sos = build_star_of_stars(3, 4);
    CHECK(sos.n == 15);
    CHECK(sos.connected());
    CHECK(sos.degree(0) == 4 + 2);
}

TEST_CASE("uniform coupling weights") {
    const auto pair = uniform_coupling(build_topology(TopologyKind::Complete, 2), 0.3);
    CHECK(pair.w(0, 0) == doctest::Approx(0.7));
    CHECK(pair.w(0, 1) == doctest::Approx(0.3));
    CHECK(pair.w(1, 0) == doctest::Approx(0.3));

    const auto id = uniform_coupling(build_topology(TopologyKind::Chain, 4), 0.0);
    CHECK(id.w.isApprox(Eigen::MatrixXd::Identity(4, 4)));

    const auto star = uniform_coupling(build_topology(TopologyKind::Star, 3), 0.4);
    CHECK(star.w(0, 0) == doctest::Approx(0.6));
    CHECK(star.w(0, 1) == doctest::Approx(0.2));
    CHECK(star.w(0, 2) == doctest::Approx(0.2));
    CHECK(star.w(1, 0) == doctest::Approx(0.4));
    CHECK(star.w(1, 1) == doctest::Approx(0.6));
    CHECK(star.w(1, 2) == 0.0);

    CHECK_THROWS_AS(uniform_coupling(build_topology(TopologyKind::Star, 3), 1.5), Error);
    CHECK_THROWS_AS(uniform_coupling(build_topology(TopologyKind::Star, 3), -0.1), Error);

    const auto u = uniform_matrix(4);
    CHECK((u.w.array() == 0.25).all());
}

TEST_CASE("input-output network from flows") {
    SUBCASE("degenerate single sector") {
        FlowTable t;
        t.records = {{"A", "X", "A", "X", 2.0}, {"A", "X", kFinalDemand, "X", 3.0}};
        const auto net = build_io_network(t);
        REQUIRE(net.size() == 2);
        CHECK(net.w(0, 0) == doctest::Approx(0.4));
        CHECK(net.w(0, 1) == doctest::Approx(0.6));
        CHECK(net.w(1, 0) == doctest::Approx(1.0));
        CHECK(net.w(1, 1) == 0.0);
        CHECK(max_row_error(net) < 1e-12);
        CHECK(net.nodes[1].final_demand);
        CHECK(net.nodes[0].label == "A.X");
        CHECK(net.nodes[1].label == "FinD.X");
    }
    SUBCASE("synthetic fixture") {
        const auto t = load_flow_table_csv(test::data_path("fixtures/synthetic_3x5_flows.csv"));
        const auto net = build_io_network(t);
        REQUIRE(net.size() == 18);
        CHECK(max_row_error(net) < 1e-10);
        CHECK(net.countries == std::vector<std::string>{"AAA", "BBB", "CCC"});
        // final-demand row: domestic output shares only
        const int fd = 5;
        CHECK(net.nodes[fd].final_demand);
        double total = 0.0;
        for (int i = 0; i < 5; ++i) total += net.nodes[i].output;
        for (int i = 0; i < 5; ++i) CHECK(net.w(fd, i) == doctest::Approx(net.nodes[i].output / total));
        for (int j = 6; j < 18; ++j) CHECK(net.w(fd, j) == 0.0);
        CHECK(net.w(fd, fd) == 0.0);
        // sector row is flow / output
        double out0 = 0.0;
        for (const auto& r : t.records)
            if (r.source_sector == "D" && r.source_country == "AAA") out0 += r.value;
        CHECK(net.nodes[0].output == doctest::Approx(out0));
    }
    SUBCASE("errors") {
        FlowTable zero;
        zero.records = {{"A", "X", "A", "X", 0.0}, {"A", "X", kFinalDemand, "X", 0.0}, {"B", "X", "A", "X", 1.0},
                        {"B", "X", kFinalDemand, "X", 1.0}};
        CHECK(code_of([&] { build_io_network(zero); }) == ErrorCode::ZeroOutput);
        FlowTable nofd;
        nofd.records = {{"A", "X", "A", "X", 1.0}, {"A", "Y", "A", "Y", 1.0}, {"A", "Y", kFinalDemand, "Y", 1.0}};
        CHECK(code_of([&] { build_io_network(nofd); }) == ErrorCode::MissingFinalDemand);
    }
}

TEST_CASE("flow table CSV round trip and validation") {
    const auto t = random_table(2, 3, 9);
    const std::string path = test::scratch_path("network_roundtrip_flows.csv");
    write_flow_table_csv(t, path);
    const auto back = load_flow_table_csv(path);
    REQUIRE(back.records.size() == t.records.size());
    for (size_t i = 0; i < t.records.size(); ++i) CHECK(back.records[i].value == doctest::Approx(t.records[i].value).epsilon(1e-14));

    auto write = [](const std::string& body) {
        const auto path = test::scratch_path("network_bad_flows.csv");
        std::ofstream(path) << "source_sector,source_country,dest_sector,dest_country,value\n" << body;
        return path;
    };
    CHECK(code_of([&] { load_flow_table_csv(write("A,X,A,X,abc\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { load_flow_table_csv(write("A,X,A,X,-1\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { load_flow_table_csv(write("A,X,A\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { load_flow_table_csv("does/not/exist.csv"); }) == ErrorCode::Io);
}

TEST_CASE("aggregation") {
    const auto t = random_table(1, 27, 4);
    const auto fine = build_io_network(t);
    SUBCASE("identity partition") {
        std::vector<int> part(fine.size());
        std::iota(part.begin(), part.end(), 0);
        const auto same = aggregate_nodes(fine, part, fine.outputs());
        CHECK((same.w - fine.w).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("27 sectors into 10 blocks matches the directly built network") {
        auto block_of = [](int s) { return s * 10 / 27; };
        FlowTable coarse;
        std::map<std::tuple<std::string, std::string>, double> sums;
        std::vector<std::tuple<std::string, std::string>> order;
        for (const auto& r : t.records) {
            const std::string src = "B" + std::to_string(block_of(std::stoi(r.source_sector.substr(1))));
            const std::string dst = r.dest_sector == kFinalDemand
                                        ? std::string(kFinalDemand)
                                        : "B" + std::to_string(block_of(std::stoi(r.dest_sector.substr(1))));
            auto key = std::make_tuple(src, dst);
            if (!sums.count(key)) order.push_back(key);
            sums[key] += r.value;
        }
        for (const auto& k : order) coarse.records.push_back({std::get<0>(k), "C0", std::get<1>(k), "C0", sums[k]});
        const auto direct = build_io_network(coarse);

        std::vector<int> part(fine.size());
        for (int i = 0; i < 27; ++i) part[i] = block_of(i);
        part[27] = 10;  // final demand stays its own block
        const auto agg = aggregate_nodes(fine, part, fine.outputs());
        REQUIRE(agg.size() == direct.size());
        CHECK((agg.w - direct.w).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(max_row_error(agg) < 1e-10);

        CHECK(eigenvector_centrality(agg).sum() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(aggregate_nodes(fine, std::vector<int>(fine.size(), 2), fine.outputs()), Error);
}

TEST_CASE("generalized Laplacian spectra") {
    SUBCASE("two nodes") {
        const auto s = generalized_laplacian(build_topology(TopologyKind::Complete, 2), 1.0);
        CHECK(std::abs(s.lambda[0]) < 1e-12);
        CHECK(s.lambda[1] == doctest::Approx(2.0));
        CHECK(std::abs(s.q(0, 0) - 1 / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(std::abs(s.q(0, 1)) - 1 / std::sqrt(2.0)) < 1e-12);
        CHECK(s.q(0, 1) * s.q(1, 1) < 0.0);
    }
    SUBCASE("complete uniform matrix") {
        const auto s = generalized_laplacian(uniform_matrix(6));
        CHECK(std::abs(s.lambda[0]) < 1e-10);
        for (int i = 1; i < 6; ++i) CHECK(s.lambda[i] == doctest::Approx(1.0));
        CHECK(s.max_imag < 1e-12);
    }
    SUBCASE("two cliques against the numpy oracle") {
        TopologyOptions opt;
        opt.bridge_a = 2;
        opt.bridge_b = 0;
        const auto adj = build_topology(TopologyKind::TwoClique, 6, opt);
        for (const auto& r : test::oracle("spectra.csv", {"case", "eps", "index", "lambda"})) {
            const double eps = test::num(r[1]);
            const int k = std::stoi(r[2]);
            const auto s = r[0] == "two_clique_klk" ? generalized_laplacian(adj, eps)
                                                    : generalized_laplacian(uniform_coupling(adj, eps));
            CHECK(std::abs(s.lambda[k] - test::num(r[3])) < 1e-10);
        }
        const auto iw = generalized_laplacian(uniform_coupling(adj, 0.3));
        const Eigen::MatrixXd resid = iw.b * iw.q - iw.q * iw.lambda.asDiagonal();
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
        for (int i = 0; i < 6; ++i) CHECK(iw.q(i, 0) == doctest::Approx(1 / std::sqrt(6.0)));
        CHECK((iw.b.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((iw.q * iw.q_inv - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("star of stars shape") {
        const auto s = generalized_laplacian(uniform_coupling(build_star_of_stars(17, 27), 1.0));
        int low = 0, high = 0, mid = 0;
        for (int i = 0; i < s.size(); ++i) {
            if (s.lambda[i] < 0.3) ++low;
            else if (s.lambda[i] > 1.5) ++high;
            else ++mid;
        }
        CHECK(low == 17);
        CHECK(high == 17);
        CHECK(mid == 17 * 28 - 34);
    }
    SUBCASE("complex spectrum aborts") {
        InteractionNetwork cyc;
        cyc.w = Eigen::MatrixXd::Zero(3, 3);
        cyc.w(0, 1) = cyc.w(1, 2) = cyc.w(2, 0) = 1.0;
        cyc.nodes.resize(3);
        CHECK(code_of([&] { generalized_laplacian(cyc); }) == ErrorCode::ComplexSpectrum);
        SpectralOptions loose;
        loose.max_imag = 1.0;
        const auto s = generalized_laplacian(cyc, loose);
        CHECK(s.max_imag == doctest::Approx(std::sqrt(3.0) / 2));
    }
    SUBCASE("disconnected") {
        Adjacency a;
        a.n = 4;
        a.neighbors.assign(4, {});
        a.add_edge(0, 1);
        a.add_edge(2, 3);
        CHECK(code_of([&] { generalized_laplacian(a, 1.0); }) == ErrorCode::Disconnected);
        CHECK(code_of([&] { generalized_laplacian(uniform_coupling(a, 0.5)); }) == ErrorCode::Disconnected);
    }
}

TEST_CASE("Fiedler vector") {
    TopologyOptions opt;
    opt.bridge_a = 2;
    opt.bridge_b = 0;
    const auto adj = build_topology(TopologyKind::TwoClique, 6, opt);
    for (const auto& spec : {generalized_laplacian(adj, 1.0), generalized_laplacian(uniform_coupling(adj, 0.3))}) {
        const auto f = fiedler_vector(spec);
        const double s = f.vector[0] > 0 ? 1.0 : -1.0;
        for (int i = 0; i < 3; ++i) CHECK(s * f.vector[i] > 0.0);
        for (int i = 3; i < 6; ++i) CHECK(s * f.vector[i] < 0.0);
        CHECK(f.vector[0] == doctest::Approx(f.vector[1]));
        CHECK(std::abs(f.vector[2]) < std::abs(f.vector[0]));
        CHECK_FALSE(f.near_degenerate);
    }
    const auto two = fiedler_vector(generalized_laplacian(build_topology(TopologyKind::Complete, 2), 1.0));
    CHECK(std::abs(std::abs(two.vector[0]) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(two.vector[0] == doctest::Approx(-two.vector[1]));
}

TEST_CASE("eigenvector centrality") {
    const auto u = eigenvector_centrality(uniform_matrix(5));
    for (int i = 0; i < 5; ++i) CHECK(u[i] == doctest::Approx(0.2));

    InteractionNetwork two;
    two.w.resize(2, 2);
    two.w << 0.7, 0.3, 0.6, 0.4;
    two.nodes.resize(2);
    const auto c = eigenvector_centrality(two);
    CHECK(c[0] == doctest::Approx(2.0 / 3.0));
    CHECK(c[1] == doctest::Approx(1.0 / 3.0));

    InteractionNetwork red;
    red.w.resize(2, 2);
    red.w << 1.0, 0.0, 0.5, 0.5;
    red.nodes.resize(2);
    CHECK(code_of([&] { eigenvector_centrality(red); }) == ErrorCode::Reducible);

    CentralityOptions few;
    few.max_iter = 1;
    CHECK(code_of([&] { eigenvector_centrality(two, few); }) == ErrorCode::NonConvergence);

    auto t = random_table(2, 4, 12);
    const auto base = eigenvector_centrality(build_io_network(t));
    for (auto& r : t.records) r.value *= 37.5;
    const auto scaled = eigenvector_centrality(build_io_network(t));
    CHECK((base - scaled).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(base.sum() == doctest::Approx(1.0));
}
