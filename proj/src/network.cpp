#include "cyclesync/network.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>

#include "csv.hpp"
#include "cyclesync/error.hpp"
#include "format.hpp"

namespace cyclesync {

std::vector<int> Adjacency::degrees() const {
    std::vector<int> k(n);
    for (int i = 0; i < n; ++i) k[i] = degree(i);
    return k;
}

void Adjacency::add_edge(int i, int j) {
    require(i >= 0 && j >= 0 && i < n && j < n, "edge endpoint out of range");
    require(i != j, "self-loops are not allowed");
    auto ins = [](std::vector<int>& v, int x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x) v.insert(it, x);
    };
    ins(neighbors[i], j);
    ins(neighbors[j], i);
}

bool Adjacency::connected() const {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = 1;
    int count = 1;
    while (!todo.empty()) {
        int i = todo.front();
        todo.pop();
        for (int j : neighbors[i])
            if (!seen[j]) {
                seen[j] = 1;
                ++count;
                todo.push(j);
            }
    }
    return count == n;
}

TopologyKind parse_topology(const std::string& name) {
    if (name == "complete") return TopologyKind::Complete;
    if (name == "star") return TopologyKind::Star;
    if (name == "chain") return TopologyKind::Chain;
    if (name == "two_clique") return TopologyKind::TwoClique;
    fail(ErrorCode::InvalidArgument, "unknown topology '" + name + "'");
}

static Adjacency empty_graph(int n) {
    Adjacency a;
    a.n = n;
    a.neighbors.assign(n, {});
    return a;
}

Adjacency build_topology(TopologyKind kind, int n, const TopologyOptions& opt) {
    switch (kind) {
        case TopologyKind::Complete: {
            require(n >= 2, "complete graph needs N >= 2");
            auto a = empty_graph(n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) a.add_edge(i, j);
            return a;
        }
        case TopologyKind::Star: {
            require(n >= 2, "star needs N >= 2");
            auto a = empty_graph(n);
            for (int j = 1; j < n; ++j) a.add_edge(0, j);
            return a;
        }
        case TopologyKind::Chain: {
            require(n >= 2, "chain needs N >= 2");
            auto a = empty_graph(n);
            for (int j = 1; j < n; ++j) a.add_edge(j - 1, j);
            return a;
        }
        case TopologyKind::TwoClique: {
            require(opt.clique_a >= 2 && opt.clique_b >= 2, "two_clique needs cliques of size >= 2");
            require(n == 0 || n == opt.clique_a + opt.clique_b, "two_clique: N must equal the clique sizes' sum");
            require(opt.bridge_a >= 0 && opt.bridge_a < opt.clique_a, "two_clique: bridge_a outside first clique");
            require(opt.bridge_b >= 0 && opt.bridge_b < opt.clique_b, "two_clique: bridge_b outside second clique");
            const int total = opt.clique_a + opt.clique_b;
            auto a = empty_graph(total);
            for (int i = 0; i < opt.clique_a; ++i)
                for (int j = i + 1; j < opt.clique_a; ++j) a.add_edge(i, j);
            for (int i = opt.clique_a; i < total; ++i)
                for (int j = i + 1; j < total; ++j) a.add_edge(i, j);
            a.add_edge(opt.bridge_a, opt.clique_a + opt.bridge_b);
            return a;
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown topology");
}

Adjacency build_star_of_stars(int stars, int leaves) {
    require(stars >= 1 && leaves >= 1, "star_of_stars needs at least one star with one leaf");
    const int per = leaves + 1;
    auto a = empty_graph(stars * per);
    for (int s = 0; s < stars; ++s) {
        for (int l = 1; l <= leaves; ++l) a.add_edge(s * per, s * per + l);
        for (int t = s + 1; t < stars; ++t) a.add_edge(s * per, t * per);
    }
    return a;
}

Eigen::VectorXd InteractionNetwork::outputs() const {
    Eigen::VectorXd o(size());
    for (int i = 0; i < size(); ++i) o[i] = nodes[i].output;
    return o;
}

void InteractionNetwork::validate(double tol) const {
    require(w.rows() == w.cols() && w.rows() > 0, "weight matrix must be square and non-empty");
    require(static_cast<int>(nodes.size()) == size(), "node metadata size mismatch");
    for (int i = 0; i < size(); ++i) {
        const double s = w.row(i).sum();
        if (std::abs(s - 1.0) > tol)
            fail(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " sums to " + detail::fmt_double(s));
        for (int j = 0; j < size(); ++j)
            if (!(w(i, j) >= -tol && w(i, j) <= 1.0 + tol))
                fail(ErrorCode::InvalidArgument, "weight outside [0,1] at (" + std::to_string(i) + "," +
                                                     std::to_string(j) + ")");
    }
}

static std::vector<NodeInfo> default_nodes(int n) {
    std::vector<NodeInfo> v(n);
    for (int i = 0; i < n; ++i) v[i].label = std::to_string(i);
    return v;
}

InteractionNetwork uniform_coupling(const Adjacency& adj, double eps) {
    require(eps >= 0.0 && eps <= 1.0, "eps must lie in [0,1]");
    InteractionNetwork net;
    net.w = Eigen::MatrixXd::Identity(adj.n, adj.n) * (1.0 - eps);
    for (int i = 0; i < adj.n; ++i) {
        const int k = adj.degree(i);
        if (k == 0) {
            require(eps == 0.0, "isolated node with positive coupling");
            net.w(i, i) = 1.0;
            continue;
        }
        for (int j : adj.neighbors[i]) net.w(i, j) = eps / k;
    }
    net.nodes = default_nodes(adj.n);
    return net;
}

InteractionNetwork uniform_matrix(int n) {
    require(n >= 1, "uniform matrix needs N >= 1");
    InteractionNetwork net;
    net.w = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    net.nodes = default_nodes(n);
    return net;
}

FlowTable load_flow_table_csv(const std::string& path) {
    auto rows = detail::read_csv(path, {"source_sector", "source_country", "dest_sector", "dest_country", "value"});
    FlowTable t;
    t.records.reserve(rows.size());
    for (auto& r : rows) {
        FlowRecord rec{r.fields[0], r.fields[1], r.fields[2], r.fields[3], 0.0};
        if (!detail::parse_double(r.fields[4], rec.value) || !std::isfinite(rec.value) || rec.value < 0.0)
            fail(ErrorCode::MalformedRow, path + ":" + std::to_string(r.line) + ": invalid value '" + r.fields[4] + "'");
        if (rec.source_sector.empty() || rec.source_country.empty() || rec.dest_sector.empty() ||
            rec.dest_country.empty())
            fail(ErrorCode::MalformedRow, path + ":" + std::to_string(r.line) + ": empty key field");
        if (rec.source_sector == kFinalDemand)
            fail(ErrorCode::MalformedRow, path + ":" + std::to_string(r.line) + ": final demand cannot be a source");
        t.records.push_back(std::move(rec));
    }
    return t;
}

void write_flow_table_csv(const FlowTable& flows, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << "source_sector,source_country,dest_sector,dest_country,value\n";
    for (const auto& r : flows.records)
        out << r.source_sector << ',' << r.source_country << ',' << r.dest_sector << ',' << r.dest_country << ','
            << detail::fmt_double(r.value) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

namespace {

int intern(std::vector<std::string>& names, std::map<std::string, int>& index, const std::string& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(names.size());
    names.push_back(s);
    index.emplace(s, id);
    return id;
}

}  // namespace

InteractionNetwork build_io_network(const FlowTable& flows) {
    require(!flows.records.empty(), "empty flow table");
    InteractionNetwork net;
    std::map<std::string, int> sector_idx, country_idx;
    // sectors present per country, in first-appearance order
    std::vector<std::vector<int>> country_sectors;
    auto touch = [&](const std::string& sector, const std::string& country) {
        const int c = intern(net.countries, country_idx, country);
        if (static_cast<int>(country_sectors.size()) <= c) country_sectors.resize(c + 1);
        if (sector == kFinalDemand) return;
        const int s = intern(net.sectors, sector_idx, sector);
        auto& v = country_sectors[c];
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    };
    for (const auto& r : flows.records) {
        touch(r.source_sector, r.source_country);
        touch(r.dest_sector, r.dest_country);
    }
    const int nc = static_cast<int>(net.countries.size());
    std::map<std::pair<int, int>, int> node_of;  // (sector or -1, country) -> node
    for (int c = 0; c < nc; ++c) {
        for (int s : country_sectors[c]) {
            node_of[{s, c}] = static_cast<int>(net.nodes.size());
            net.nodes.push_back({net.sectors[s] + "." + net.countries[c], s, c, 0.0, false});
        }
        node_of[{-1, c}] = static_cast<int>(net.nodes.size());
        net.nodes.push_back({std::string(kFinalDemand) + "." + net.countries[c], -1, c, 0.0, true});
    }
    const int n = static_cast<int>(net.nodes.size());
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(n, n);
    for (const auto& r : flows.records) {
        const int src = node_of.at({sector_idx.at(r.source_sector), country_idx.at(r.source_country)});
        const int dst = r.dest_sector == kFinalDemand
                            ? node_of.at({-1, country_idx.at(r.dest_country)})
                            : node_of.at({sector_idx.at(r.dest_sector), country_idx.at(r.dest_country)});
        flow(src, dst) += r.value;
    }
    net.w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (net.nodes[i].final_demand) continue;
        const double o = flow.row(i).sum();
        if (!(o > 0.0)) fail(ErrorCode::ZeroOutput, "node '" + net.nodes[i].label + "' has no outflow");
        net.nodes[i].output = o;
        net.w.row(i) = flow.row(i) / o;
    }
    for (int c = 0; c < nc; ++c) {
        const int fd = node_of.at({-1, c});
        const double demand = flow.col(fd).sum();
        if (!(demand > 0.0))
            fail(ErrorCode::MissingFinalDemand, "country '" + net.countries[c] + "' has no final-demand flows");
        net.nodes[fd].output = demand;
        double total = 0.0;
        for (int s : country_sectors[c]) total += net.nodes[node_of.at({s, c})].output;
        if (!(total > 0.0)) fail(ErrorCode::ZeroOutput, "country '" + net.countries[c] + "' has no sector output");
        for (int s : country_sectors[c]) {
            const int i = node_of.at({s, c});
            net.w(fd, i) = net.nodes[i].output / total;
        }
    }
    return net;
}

InteractionNetwork aggregate_nodes(const InteractionNetwork& net, const std::vector<int>& partition,
                                   const Eigen::VectorXd& outputs, const std::vector<std::string>& labels) {
    const int n = net.size();
    require(static_cast<int>(partition.size()) == n, "partition must cover all nodes");
    require(outputs.size() == n, "outputs size mismatch");
    int blocks = 0;
    for (int b : partition) {
        require(b >= 0, "negative block id");
        blocks = std::max(blocks, b + 1);
    }
    std::vector<std::vector<int>> members(blocks);
    for (int i = 0; i < n; ++i) members[partition[i]].push_back(i);
    for (int b = 0; b < blocks; ++b) require(!members[b].empty(), "empty block " + std::to_string(b));

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, blocks);
    for (int i = 0; i < n; ++i) p(i, partition[i]) = 1.0;
    const Eigen::MatrixXd extensive = p.transpose() * outputs.asDiagonal() * net.w * p;

    InteractionNetwork agg;
    agg.w.resize(blocks, blocks);
    agg.sectors = net.sectors;
    agg.countries = net.countries;
    agg.nodes.resize(blocks);
    for (int b = 0; b < blocks; ++b) {
        const double total = extensive.row(b).sum();
        if (!(total > 0.0)) fail(ErrorCode::ZeroOutput, "block " + std::to_string(b) + " has no outflow");
        agg.w.row(b) = extensive.row(b) / total;
        NodeInfo info;
        info.label = b < static_cast<int>(labels.size()) ? labels[b] : "block" + std::to_string(b);
        info.output = 0.0;
        info.sector = net.nodes[members[b][0]].sector;
        info.country = net.nodes[members[b][0]].country;
        info.final_demand = true;
        for (int i : members[b]) {
            info.output += outputs[i];
            if (net.nodes[i].sector != info.sector) info.sector = -1;
            if (net.nodes[i].country != info.country) info.country = -1;
            info.final_demand = info.final_demand && net.nodes[i].final_demand;
        }
        agg.nodes[b] = info;
    }
    return agg;
}

namespace {

// Index of the node used to orient eigenvectors: highest output, lowest index on ties.
int orientation_node(const Eigen::VectorXd& outputs) {
    int best = 0;
    for (int i = 1; i < outputs.size(); ++i)
        if (outputs[i] > outputs[best]) best = i;
    return best;
}

void orient_columns(Eigen::MatrixXd& q, const Eigen::VectorXd& outputs) {
    const int pivot = orientation_node(outputs);
    for (int c = 0; c < q.cols(); ++c) {
        double ref = q(pivot, c);
        if (std::abs(ref) < 1e-12) {
            ref = 0.0;
            for (int r = 0; r < q.rows(); ++r)
                if (std::abs(q(r, c)) >= 1e-12) {
                    ref = q(r, c);
                    break;
                }
        }
        if (ref < 0.0) q.col(c) = -q.col(c);
    }
}

void check_connected(const SpectralDecomposition& s) {
    if (s.size() >= 2 && std::abs(s.lambda[1]) < 1e-10)
        fail(ErrorCode::Disconnected, "zero eigenvalue has multiplicity > 1");
}

// Detailed balance pi_i W_ij = pi_j W_ji makes I - W similar to a symmetric matrix. The symmetric
// solver then yields a well-conditioned real basis even for highly degenerate spectra.
bool reversible_decomposition(const InteractionNetwork& net, SpectralDecomposition& s) {
    const int n = net.size();
    Eigen::VectorXd pi;
    try {
        pi = eigenvector_centrality(net);
    } catch (const Error&) {
        return false;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pi[i] * net.w(i, j) - pi[j] * net.w(j, i)) > 1e-9 * std::max(pi[i], pi[j])) return false;
    const Eigen::VectorXd root = pi.cwiseSqrt();
    Eigen::MatrixXd sym = root.asDiagonal() * s.b * root.cwiseInverse().asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) return false;
    s.lambda = es.eigenvalues();
    s.lambda_imag = Eigen::VectorXd::Zero(n);
    s.max_imag = 0.0;
    s.q = root.cwiseInverse().asDiagonal() * es.eigenvectors();
    for (int k = 0; k < n; ++k) s.q.col(k).normalize();
    return true;
}

}  // namespace

SpectralDecomposition generalized_laplacian(const Adjacency& adj, double eps) {
    require(adj.n >= 2, "spectrum needs N >= 2");
    require(eps >= 0.0 && eps <= 1.0, "eps must lie in [0,1]");
    const int n = adj.n;
    SpectralDecomposition s;
    s.coupling = eps;
    s.symmetric = true;
    s.b = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        if (adj.degree(i) == 0) fail(ErrorCode::Disconnected, "isolated node " + std::to_string(i));
        for (int j : adj.neighbors[i]) s.b(i, j) = -1.0 / std::sqrt(double(adj.degree(i)) * adj.degree(j));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.b);
    if (es.info() != Eigen::Success) fail(ErrorCode::NonConvergence, "symmetric eigen-solver failed");
    s.lambda = es.eigenvalues();
    s.lambda_imag = Eigen::VectorXd::Zero(n);
    s.q = es.eigenvectors();
    s.node_outputs = Eigen::VectorXd::Ones(n);
    orient_columns(s.q, s.node_outputs);
    s.q_inv = s.q.transpose();
    check_connected(s);
    return s;
}

SpectralDecomposition generalized_laplacian(const InteractionNetwork& net, const SpectralOptions& opt) {
    const int n = net.size();
    require(n >= 2, "spectrum needs N >= 2");
    SpectralDecomposition s;
    s.coupling = 1.0;
    s.symmetric = false;
    s.b = Eigen::MatrixXd::Identity(n, n) - net.w;
    s.node_outputs = net.outputs();
    if (reversible_decomposition(net, s)) {
        orient_columns(s.q, s.node_outputs);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(s.q);
        if (!lu.isInvertible()) fail(ErrorCode::IllConditioned, "eigenvector matrix is singular");
        s.q_inv = lu.inverse();
        check_connected(s);
        return s;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(s.b, true);
    if (es.info() != Eigen::Success) fail(ErrorCode::NonConvergence, "eigen-solver failed");
    const Eigen::VectorXcd ev = es.eigenvalues();
    const Eigen::MatrixXcd vec = es.eigenvectors();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Ascending real part; conjugate pairs ordered with positive imaginary part first.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(ev[a].real() - ev[b].real()) > 1e-12) return ev[a].real() < ev[b].real();
        return ev[a].imag() > ev[b].imag();
    });
    s.lambda.resize(n);
    s.lambda_imag.resize(n);
    s.q.resize(n, n);
    s.max_imag = 0.0;
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        s.lambda[k] = ev[i].real();
        s.lambda_imag[k] = ev[i].imag();
        s.max_imag = std::max(s.max_imag, std::abs(ev[i].imag()));
        Eigen::VectorXd col;
        if (std::abs(ev[i].imag()) > 1e-12 && ev[i].imag() < 0.0 && k > 0 &&
            std::abs(s.lambda_imag[k - 1] + ev[i].imag()) < 1e-9) {
            // second member of a conjugate pair: use the imaginary part for a real basis
            col = vec.col(order[k - 1]).imag();
        } else {
            col = vec.col(i).real();
        }
        const double nrm = col.norm();
        if (!(nrm > 0.0)) fail(ErrorCode::IllConditioned, "zero eigenvector column");
        s.q.col(k) = col / nrm;
    }
    if (s.max_imag > opt.max_imag)
        fail(ErrorCode::ComplexSpectrum, "max imaginary eigenvalue part " + detail::fmt_double(s.max_imag) +
                                             " exceeds tolerance " + detail::fmt_double(opt.max_imag));
    orient_columns(s.q, s.node_outputs);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s.q);
    if (!lu.isInvertible()) fail(ErrorCode::IllConditioned, "eigenvector matrix is singular");
    s.q_inv = lu.inverse();
    check_connected(s);
    return s;
}

FiedlerResult fiedler_vector(const SpectralDecomposition& spec) {
    require(spec.size() >= 2, "Fiedler vector needs N >= 2");
    FiedlerResult r;
    r.vector = spec.q.col(1);
    r.lambda2 = spec.lambda[1];
    r.near_degenerate = spec.size() >= 3 && std::abs(spec.lambda[2] - spec.lambda[1]) < 1e-8;
    return r;
}

Eigen::VectorXd eigenvector_centrality(const InteractionNetwork& net, const CentralityOptions& opt) {
    const int n = net.size();
    require(n >= 1, "empty network");
    // Lazy chain (I + W)/2 shares the stationary vector and avoids periodic oscillation.
    const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + net.w);
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < opt.max_iter; ++it) {
        Eigen::RowVectorXd next = pi * lazy;
        next /= next.sum();
        const double resid = (next * net.w - next).lpNorm<1>();
        pi = next;
        if (resid < opt.tol) {
            if (pi.minCoeff() < 1e-10) fail(ErrorCode::Reducible, "stationary vector has zero entries");
            return pi.transpose();
        }
    }
    fail(ErrorCode::NonConvergence, "power iteration did not converge");
}

}  // namespace cyclesync
