#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "csv.hpp"
#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/empirics.hpp"
#include "cyclesync/error.hpp"
#include "cyclesync/master_stability.hpp"
#include "cyclesync/network.hpp"
#include "cyclesync/phase_analysis.hpp"
#include "cyclesync/simulator.hpp"
#include "format.hpp"

namespace fs = std::filesystem;

namespace cyclesync {

void write_table_csv(const ResultTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    for (size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (const double* d = std::get_if<double>(&row[c]))
                out << detail::fmt_double(*d);
            else
                out << std::get<std::string>(row[c]);
        }
        out << '\n';
    }
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

namespace {

using Defaults = std::vector<std::pair<std::string, std::string>>;

const Defaults kAgent = {{"agent.alpha1", "-0.04"}, {"agent.alpha2", "0.4"}, {"agent.delta", "0.1"},
                         {"agent.beta", "-0.5 0.1 0.2 0.5 -0.3"}};
const Defaults kPeaks = {{"peaks.min_separation", "5"}, {"peaks.prominence_fraction", "0.3"}};
const Defaults kShocks = {{"shocks.rho_u", "0"},   {"shocks.sigma_u", "0"}, {"shocks.rho_v", "0"},
                          {"shocks.sigma_v", "0"}, {"shocks.rho_z", "0"},   {"shocks.sigma_z", "0"},
                          {"shocks.during_burn_in", "true"}};

Defaults network_defaults(const std::string& kind, const std::string& n, const std::string& eps) {
    return {{"network.kind", kind},     {"network.n", n},          {"network.eps", eps},
            {"network.clique_a", "3"},  {"network.clique_b", "3"}, {"network.bridge_a", "0"},
            {"network.bridge_b", "0"},  {"network.stars", "17"},   {"network.leaves", "27"},
            {"network.flows", ""}};
}

Defaults simulation_defaults(const std::string& steps, const std::string& burn_in) {
    return {{"simulation.steps", steps},          {"simulation.burn_in", burn_in},
            {"simulation.retain", "0"},           {"simulation.stride", "1"},
            {"simulation.initial", "perturbed"},  {"simulation.perturbation", "0.1"},
            {"simulation.blowup_bound", "1000"}};
}

Defaults concat(std::initializer_list<Defaults> parts) {
    Defaults out = {{"run.seed", "1"}};
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<ExperimentInfo> build_catalog() {
    std::vector<ExperimentInfo> v;
    v.push_back({"simulate", "simulate the coupled map and export trajectories with measured periods",
                 concat({network_defaults("isolated", "1", "0"), kAgent, simulation_defaults("2000", "1000"), kShocks,
                         kPeaks})});
    v.push_back({"sweep-epsilon", "entrainment sweep over the coupling strength",
                 concat({network_defaults("complete", "10", "0"), kAgent,
                         {{"sweep.eps_min", "0"}, {"sweep.eps_max", "0.5"}, {"sweep.eps_step", "0.05"},
                          {"sweep.seeds", "1"}, {"sweep.spread_tol", "0.01"}, {"sweep.fourier", "false"}},
                         simulation_defaults("4000", "2000"), kShocks, kPeaks})});
    v.push_back({"sync-centrality", "Monte Carlo synchronization centrality against a uniform benchmark",
                 concat({network_defaults("star", "10", "0.5"), kAgent,
                         {{"sync.draws", "100"}, {"sync.mode", "L"}, {"sync.alpha1_min", "-0.1"},
                          {"sync.alpha1_max", "-0.02"}, {"sync.spread_tol", "0.01"}},
                         simulation_defaults("3000", "1000"), kPeaks})});
    v.push_back({"msf", "master stability function and time-resolved volume growth",
                 concat({kAgent,
                         {{"msf.k_min", "0"}, {"msf.k_max", "2"}, {"msf.k_points", "21"},
                          {"msf.orbit_steps", "103000"}, {"msf.orbit_burn_in", "2000"},
                          {"msf.lyapunov_burn_in", "1000"}, {"volume.k", "0"}, {"volume.periods", "3"}}})});
    v.push_back({"shock-response", "linearized versus nonlinear response to a shock on the synchronized orbit",
                 concat({network_defaults("complete", "2", "0.3"), kAgent,
                         {{"shock.y", "0.2 0"}, {"shock.x", ""}, {"shock.tau", "expansion"}, {"shock.steps", "0"},
                          {"shock.orbit_steps", "4000"}, {"shock.orbit_burn_in", "2000"},
                          {"output.figure", "9"}}})});
    v.push_back({"scenarios", "model comovement across dynamics and shock presets",
                 concat({network_defaults("flows", "0", "0"),
                         {{"agent.beta", "-0.5 0.1 0.2 0.5 -0.3"},
                          {"scenarios.dynamics", "cycle focus node"},
                          {"scenarios.shocks", "idiosyncratic country sector"},
                          {"scenarios.sigma_u", "0 0.1 0.2 0.3 0.4"},
                          {"scenarios.seeds", "20"},
                          {"scenarios.steps", "600"},
                          {"scenarios.retain", "228"},
                          {"scenarios.stride", "4"},
                          {"scenarios.rho_u", "0"},
                          {"scenarios.rho_v", "0.3"},
                          {"scenarios.rho_z", "0.3"},
                          {"scenarios.sigma_common", "0.05"},
                          {"scenarios.detrend", "false"},
                          {"scenarios.exclusions", "default"},
                          {"scenarios.sector_map", ""}}})});
    v.push_back({"spectrum", "generalized Laplacian spectrum, Fiedler vector and eigenvector centrality",
                 concat({network_defaults("star_of_stars", "0", "1"), {{"spectrum.max_imag", "0.1"}}})});
    return v;
}

// Resolved configuration with typed accessors. Errors name the offending key.
class Config {
public:
    Config(const ExperimentInfo& info, const std::map<std::string, std::string>& overrides) {
        for (const auto& [k, v] : info.defaults) values_[k] = v;
        for (const auto& [k, v] : overrides) {
            if (!values_.count(k))
                fail(ErrorCode::Config, "unknown key '" + k + "' for experiment '" + info.name + "'");
            values_[k] = v;
        }
        order_ = info.defaults;
        for (auto& [k, v] : order_) v = values_[k];
    }

    const std::string& str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) fail(ErrorCode::Config, "missing key '" + key + "'");
        return it->second;
    }

    double num(const std::string& key) const {
        double v = 0.0;
        if (!detail::parse_double(detail::trim(str(key)), v))
            fail(ErrorCode::Config, "key '" + key + "' expects a number, got '" + str(key) + "'");
        return v;
    }

    int integer(const std::string& key) const {
        int v = 0;
        if (!detail::parse_int(detail::trim(str(key)), v))
            fail(ErrorCode::Config, "key '" + key + "' expects an integer, got '" + str(key) + "'");
        return v;
    }

    std::uint64_t seed() const {
        const std::string s = detail::trim(str("run.seed"));
        try {
            size_t pos = 0;
            const auto v = std::stoull(s, &pos);
            if (pos == s.size()) return v;
        } catch (...) {
        }
        fail(ErrorCode::Config, "key 'run.seed' expects a non-negative integer");
    }

    bool flag(const std::string& key) const {
        const std::string v = detail::trim(str(key));
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        fail(ErrorCode::Config, "key '" + key + "' expects true/false, got '" + v + "'");
    }

    std::vector<std::string> words(const std::string& key) const {
        std::string s = str(key);
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<std::string> out;
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& w : words(key)) {
            double v = 0.0;
            if (!detail::parse_double(w, v)) fail(ErrorCode::Config, "key '" + key + "' has non-numeric entry '" + w + "'");
            out.push_back(v);
        }
        return out;
    }

    // Single value (broadcast), explicit list of n values, or linspace(lo,hi).
    std::vector<double> per_node(const std::string& key, int n) const {
        const std::string s = detail::trim(str(key));
        if (s.rfind("linspace(", 0) == 0 && s.back() == ')') {
            auto parts = detail::split_csv(s.substr(9, s.size() - 10));
            double lo = 0.0, hi = 0.0;
            if (parts.size() != 2 || !detail::parse_double(detail::trim(parts[0]), lo) ||
                !detail::parse_double(detail::trim(parts[1]), hi))
                fail(ErrorCode::Config, "key '" + key + "': expected linspace(lo,hi)");
            return linspace(lo, hi, n);
        }
        const auto v = numbers(key);
        if (v.size() == 1) return std::vector<double>(n, v[0]);
        if (static_cast<int>(v.size()) != n)
            fail(ErrorCode::Config, "key '" + key + "' needs 1 or " + std::to_string(n) + " values");
        return v;
    }

    const Defaults& resolved() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    Defaults order_;
};

QuarticCoefficients beta_of(const Config& c) {
    const auto b = c.numbers("agent.beta");
    if (b.size() != 5) fail(ErrorCode::Config, "agent.beta needs five coefficients");
    return {b[0], b[1], b[2], b[3], b[4]};
}

struct BuiltNetwork {
    InteractionNetwork net;
    bool has_adjacency = false;
    Adjacency adj;
    double eps = 0.0;
};

BuiltNetwork network_of(const Config& c) {
    BuiltNetwork b;
    const std::string kind = c.str("network.kind");
    b.eps = c.num("network.eps");
    if (kind == "flows") {
        const std::string path = c.str("network.flows");
        if (path.empty()) fail(ErrorCode::Config, "network.flows must name a flow-table CSV");
        b.net = build_io_network(load_flow_table_csv(path));
        return b;
    }
    if (kind == "uniform") {
        b.net = uniform_matrix(c.integer("network.n"));
        return b;
    }
    if (kind == "isolated") {
        const int n = c.integer("network.n");
        if (n < 1) fail(ErrorCode::Config, "network.n must be positive");
        b.adj.n = n;
        b.adj.neighbors.assign(n, {});
        if (b.eps != 0.0) fail(ErrorCode::Config, "isolated nodes require network.eps = 0");
    } else if (kind == "star_of_stars") {
        b.adj = build_star_of_stars(c.integer("network.stars"), c.integer("network.leaves"));
    } else {
        TopologyKind tk;
        try {
            tk = parse_topology(kind);
        } catch (const Error&) {
            fail(ErrorCode::Config, "unknown network.kind '" + kind + "'");
        }
        TopologyOptions opt;
        opt.clique_a = c.integer("network.clique_a");
        opt.clique_b = c.integer("network.clique_b");
        opt.bridge_a = c.integer("network.bridge_a");
        opt.bridge_b = c.integer("network.bridge_b");
        const int n = tk == TopologyKind::TwoClique ? opt.clique_a + opt.clique_b : c.integer("network.n");
        b.adj = build_topology(tk, n, opt);
    }
    b.has_adjacency = true;
    b.net = uniform_coupling(b.adj, b.eps);
    return b;
}

SimulationConfig simulation_of(const Config& c) {
    SimulationConfig s;
    s.steps = c.integer("simulation.steps");
    s.burn_in = c.integer("simulation.burn_in");
    s.retain = c.integer("simulation.retain");
    s.stride = c.integer("simulation.stride");
    s.seed = c.seed();
    const std::string init = c.str("simulation.initial");
    if (init == "perturbed")
        s.initial = InitialMode::Perturbed;
    else if (init == "fixed_point")
        s.initial = InitialMode::FixedPoint;
    else
        fail(ErrorCode::Config, "simulation.initial must be perturbed or fixed_point");
    s.perturbation = c.num("simulation.perturbation");
    s.blowup_bound = c.num("simulation.blowup_bound");
    return s;
}

ShockConfig shocks_of(const Config& c) {
    ShockConfig s;
    s.idiosyncratic = {c.num("shocks.rho_u"), c.num("shocks.sigma_u")};
    s.sector = {c.num("shocks.rho_v"), c.num("shocks.sigma_v")};
    s.country = {c.num("shocks.rho_z"), c.num("shocks.sigma_z")};
    s.during_burn_in = c.flag("shocks.during_burn_in");
    return s;
}

PeakOptions peaks_of(const Config& c) {
    PeakOptions p;
    p.min_separation = c.integer("peaks.min_separation");
    p.prominence_fraction = c.num("peaks.prominence_fraction");
    return p;
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) fail(ErrorCode::Config, "invalid grid specification");
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::round((lo + i * step) * 1e12) / 1e12;
    return v;
}

class Outputs {
public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir_ + "': " + ec.message());
    }
    std::string path(const std::string& name) {
        std::string p = (fs::path(dir_) / name).string();
        files.push_back(p);
        return p;
    }
    std::vector<std::string> files;

private:
    std::string dir_;
};

void write_resolved(Outputs& out, const std::string& experiment, const Config& c) {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    std::vector<std::string> order;
    for (const auto& [k, v] : c.resolved()) {
        const auto dot = k.find('.');
        const std::string sec = k.substr(0, dot);
        if (!sections.count(sec)) order.push_back(sec);
        sections[sec].push_back({k.substr(dot + 1), v});
    }
    std::ofstream f(out.path("resolved_config.ini"));
    if (!f) fail(ErrorCode::Io, "cannot write resolved config");
    f << "; experiment = " << experiment << '\n';
    for (const auto& sec : order) {
        f << '[' << sec << "]\n";
        for (const auto& [k, v] : sections[sec]) f << k << " = " << v << '\n';
    }
}

std::map<std::string, std::string> config_meta(const std::string& experiment, const Config& c) {
    std::map<std::string, std::string> m;
    m["experiment"] = experiment;
    for (const auto& [k, v] : c.resolved()) m["config." + k] = v;
    return m;
}

std::vector<AgentParams> node_params(const Config& c, const QuarticCoefficients& q, int n) {
    const auto a1 = c.per_node("agent.alpha1", n);
    const double a2 = c.num("agent.alpha2");
    const double d = c.num("agent.delta");
    std::vector<AgentParams> p;
    for (double v : a1) p.push_back(calibrated_params(v, a2, d, q));
    return p;
}

std::vector<Cell> row(std::initializer_list<Cell> cells) { return std::vector<Cell>(cells); }

// ---------------------------------------------------------------------------------------------

RunOutput run_simulate(const Config& c, Outputs& out, int) {
    const auto q = beta_of(c);
    const auto bn = network_of(c);
    const int n = bn.net.size();
    const auto params = node_params(c, q, n);
    const auto sim = simulation_of(c);
    const auto traj = simulate(bn.net, params, q, shocks_of(c), sim);
    const auto peaks = peaks_of(c);

    auto meta = config_meta("simulate", c);
    for (const auto& [k, v] : traj.metadata) meta["trajectory." + k] = v;
    RunOutput r;
    r.summary.columns = {"node", "label", "period", "omega"};
    std::vector<double> periods;
    for (int i = 0; i < n; ++i) {
        double period = std::numeric_limits<double>::quiet_NaN(), omega = period;
        try {
            const auto ps = phase_series(column(traj.y, i), peaks);
            period = ps.period();
            omega = ps.omega;
            periods.push_back(period);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TooFewPeaks && e.code() != ErrorCode::InvalidArgument) throw;
        }
        meta["period.node" + std::to_string(i)] = std::isnan(period) ? "undefined" : detail::fmt_double(period);
        r.summary.add(row({double(i), bn.net.nodes[i].label, period, omega}));
    }
    if (!periods.empty()) {
        const auto [lo, hi] = std::minmax_element(periods.begin(), periods.end());
        double mean = 0.0;
        for (double p : periods) mean += p / periods.size();
        meta["period_mean"] = detail::fmt_double(mean);
        meta["period_min"] = detail::fmt_double(*lo);
        meta["period_max"] = detail::fmt_double(*hi);
    } else {
        meta["period_mean"] = "undefined";
    }
    write_trajectory_csv(traj, out.path("trajectory.csv"));
    write_metadata_json(meta, out.path("trajectory.meta.json"));
    write_table_csv(r.summary, out.path("periods.csv"));
    return r;
}

RunOutput run_sweep(const Config& c, Outputs& out, int jobs) {
    const auto q = beta_of(c);
    const auto bn = network_of(c);
    if (!bn.has_adjacency) fail(ErrorCode::Config, "sweep-epsilon needs an abstract topology");
    SweepConfig cfg;
    cfg.alpha1 = c.per_node("agent.alpha1", bn.adj.n);
    cfg.alpha2 = c.num("agent.alpha2");
    cfg.delta = c.num("agent.delta");
    cfg.eps_grid = grid(c.num("sweep.eps_min"), c.num("sweep.eps_max"), c.num("sweep.eps_step"));
    cfg.seeds = c.integer("sweep.seeds");
    cfg.spread_tol = c.num("sweep.spread_tol");
    cfg.fourier = c.flag("sweep.fourier");
    cfg.shocks = shocks_of(c);
    cfg.sim = simulation_of(c);
    cfg.peaks = peaks_of(c);
    cfg.jobs = jobs;
    const auto res = epsilon_sweep(bn.adj, q, cfg);

    RunOutput r;
    r.summary.columns = {"eps",  "coherence", "coherence_sd", "correlation", "correlation_sd",
                         "spread", "common_frequency", "entrained", "seeds"};
    ResultTable omega{{"eps", "node", "omega"}, {}};
    ResultTable fig{{"x", "y", "series"}, {}};
    for (const auto& rw : res.rows) {
        double mean = 0.0;
        for (double w : rw.omega) mean += w / rw.omega.size();
        r.summary.add(row({rw.eps, rw.coherence, rw.coherence_sd, rw.correlation, rw.correlation_sd, rw.spread, mean,
                           std::string(rw.entrained ? "true" : "false"), double(rw.seeds)}));
        fig.add(row({rw.eps, rw.coherence, std::string("phase_coherence")}));
        fig.add(row({rw.eps, rw.correlation, std::string("mean_correlation")}));
        for (size_t i = 0; i < rw.omega.size(); ++i) {
            omega.add(row({rw.eps, double(i), rw.omega[i]}));
            fig.add(row({rw.eps, rw.omega[i], "omega_node" + std::to_string(i)}));
        }
    }
    for (size_t i = 0; i < res.uncoupled_omega.size(); ++i)
        omega.add(row({std::string("uncoupled"), double(i), res.uncoupled_omega[i]}));
    auto meta = config_meta("sweep-epsilon", c);
    meta["normal_method"] = kNormalMethod;
    write_table_csv(r.summary, out.path("sweep.csv"));
    write_table_csv(omega, out.path("sweep_omega.csv"));
    write_table_csv(fig, out.path("figure-4.csv"));
    write_metadata_json(meta, out.path("sweep.meta.json"));
    return r;
}

RunOutput run_sync(const Config& c, Outputs& out, int jobs) {
    const auto q = beta_of(c);
    const auto bn = network_of(c);
    const int n = bn.net.size();
    SyncCentralityConfig cfg;
    cfg.alpha1_grid = linspace(c.num("sync.alpha1_min"), c.num("sync.alpha1_max"), n);
    cfg.alpha2 = c.num("agent.alpha2");
    cfg.delta = c.num("agent.delta");
    cfg.draws = c.integer("sync.draws");
    const std::string mode = c.str("sync.mode");
    if (mode == "L")
        cfg.mode = SyncMode::L;
    else if (mode == "H")
        cfg.mode = SyncMode::H;
    else
        fail(ErrorCode::Config, "sync.mode must be L or H");
    cfg.seed = c.seed();
    cfg.sim = simulation_of(c);
    cfg.peaks = peaks_of(c);
    cfg.spread_tol = c.num("sync.spread_tol");
    cfg.jobs = jobs;
    const auto res = sync_centrality(bn.net, q, cfg);
    Eigen::VectorXd eig = eigenvector_centrality(bn.net);

    RunOutput r;
    r.summary.columns = {"node", "score", "stderr"};
    ResultTable detail{{"node", "label", "score", "stderr", "raw_diff", "mean_frequency", "frequency_stderr",
                        "eigenvector_centrality"},
                       {}};
    for (int i = 0; i < n; ++i) {
        r.summary.add(row({double(i), res.score[i], res.stderr_[i]}));
        detail.add(row({double(i), bn.net.nodes[i].label, res.score[i], res.stderr_[i], res.raw_diff[i],
                        res.mean_frequency[i], res.frequency_stderr[i], eig[i]}));
    }
    auto meta = config_meta("sync-centrality", c);
    meta["benchmark_frequency"] = detail::fmt_double(res.benchmark);
    meta["draws"] = std::to_string(res.draws);
    meta["mode"] = mode;
    write_table_csv(r.summary, out.path("sync_centrality.csv"));
    write_table_csv(detail, out.path("sync_centrality_detail.csv"));
    write_metadata_json(meta, out.path("sync_centrality.meta.json"));
    return r;
}

RunOutput run_msf(const Config& c, Outputs& out, int jobs) {
    const auto q = beta_of(c);
    const auto a1 = c.numbers("agent.alpha1");
    if (a1.size() != 1) fail(ErrorCode::Config, "msf needs a single agent.alpha1");
    const auto p = calibrated_params(a1[0], c.num("agent.alpha2"), c.num("agent.delta"), q);
    OrbitOptions oo;
    oo.steps = c.integer("msf.orbit_steps");
    oo.burn_in = c.integer("msf.orbit_burn_in");
    const auto orbit = synchronized_orbit(p, q, oo);
    LyapunovOptions lo;
    lo.burn_in = c.integer("msf.lyapunov_burn_in");
    const int points = c.integer("msf.k_points");
    if (points < 1) fail(ErrorCode::Config, "msf.k_points must be positive");
    const auto ks = linspace(c.num("msf.k_min"), c.num("msf.k_max"), points);
    const auto curve = master_stability_function(orbit, ks, lo, jobs);

    RunOutput r;
    r.summary.columns = {"K", "mu1", "mu2"};
    ResultTable fig{{"x", "y", "series"}, {}};
    for (const auto& pt : curve) {
        r.summary.add(row({pt.k, pt.mu1, pt.mu2}));
        fig.add(row({pt.k, pt.mu1, std::string("mu1")}));
        fig.add(row({pt.k, pt.mu2, std::string("mu2")}));
        fig.add(row({pt.k, pt.mu1 + pt.mu2, std::string("mu1_plus_mu2")}));
    }
    const double kv = c.num("volume.k");
    const auto rate = time_resolved_volume_rate(orbit, kv);
    const int span = std::min(orbit.size(), static_cast<int>(std::lround(c.integer("volume.periods") * orbit.period)));
    ResultTable vol{{"step", "y", "fprime", "log_det"}, {}};
    for (int t = 0; t < span; ++t) {
        vol.add(row({double(t), orbit.y[t], orbit.fprime[t], rate[t]}));
        fig.add(row({double(t), rate[t], std::string("log_det_t")}));
        fig.add(row({double(t), orbit.y[t], std::string("y_sync_t")}));
        fig.add(row({double(t), orbit.fprime[t], std::string("fprime_t")}));
    }
    auto meta = config_meta("msf", c);
    meta["orbit_period"] = detail::fmt_double(orbit.period);
    write_table_csv(r.summary, out.path("msf.csv"));
    write_table_csv(vol, out.path("volume_rate.csv"));
    write_table_csv(fig, out.path("figure-8.csv"));
    write_metadata_json(meta, out.path("msf.meta.json"));
    return r;
}

int resolve_tau(const std::string& s, const SynchronizedOrbit& orbit) {
    const int from = static_cast<int>(std::lround(orbit.period));
    if (s == "peak") return cycle_point(orbit, CyclePoint::Peak, from);
    if (s == "trough") return cycle_point(orbit, CyclePoint::Trough, from);
    if (s == "recession") return cycle_point(orbit, CyclePoint::Recession, from);
    if (s == "expansion") return cycle_point(orbit, CyclePoint::Expansion, from);
    int t = 0;
    if (!detail::parse_int(s, t)) fail(ErrorCode::Config, "shock.tau must be peak|trough|recession|expansion or a step");
    return t;
}

RunOutput run_shock(const Config& c, Outputs& out, int) {
    const auto q = beta_of(c);
    const auto bn = network_of(c);
    const int n = bn.net.size();
    const auto a1 = c.numbers("agent.alpha1");
    if (a1.size() != 1) fail(ErrorCode::Config, "shock-response needs homogeneous agents (single agent.alpha1)");
    const auto p = calibrated_params(a1[0], c.num("agent.alpha2"), c.num("agent.delta"), q);
    OrbitOptions oo;
    oo.steps = c.integer("shock.orbit_steps");
    oo.burn_in = c.integer("shock.orbit_burn_in");
    const auto orbit = synchronized_orbit(p, q, oo);
    const auto ys = c.numbers("shock.y");
    if (static_cast<int>(ys.size()) != n) fail(ErrorCode::Config, "shock.y needs one value per node");
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    Eigen::VectorXd x;
    ShockCompareOptions opt;
    opt.steps = c.integer("shock.steps");
    const auto xs = c.numbers("shock.x");
    if (!xs.empty()) {
        if (static_cast<int>(xs.size()) != n) fail(ErrorCode::Config, "shock.x needs one value per node");
        x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
        opt.inject_x = true;
    }
    const int tau = resolve_tau(c.str("shock.tau"), orbit);
    const auto r = shock_response_compare(bn.net, orbit, y, tau, opt, x);

    ResultTable lng{{"basis", "node_or_mode", "step", "value"}, {}};
    ResultTable fig{{"x", "y", "series"}, {}};
    const int steps = static_cast<int>(r.xi.rows());
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < steps; ++t) {
            const double nl = r.nonlinear_y(t, i) - r.unperturbed_y(t, i);
            lng.add(row({std::string("node"), double(i), double(tau + t), r.xi(t, 2 * i + 1)}));
            lng.add(row({std::string("eigen"), double(i), double(tau + t), r.zeta(t, 2 * i + 1)}));
            lng.add(row({std::string("nonlinear"), double(i), double(tau + t), nl}));
            fig.add(row({double(tau + t), r.nonlinear_y(t, i), "y_nonlinear_node" + std::to_string(i)}));
            fig.add(row({double(tau + t), r.unperturbed_y(t, i) + r.xi(t, 2 * i + 1),
                         "y_linear_node" + std::to_string(i)}));
            fig.add(row({double(tau + t), r.zeta(t, 2 * i + 1), "zeta_y_mode" + std::to_string(i)}));
        }
    for (int t = 0; t < steps; ++t) fig.add(row({double(tau + t), r.unperturbed_y(t, 0), std::string("y_sync")}));

    RunOutput o;
    o.summary.columns = {"tau", "rmse", "phase_shift", "rmse_window", "large_shock_warning", "max_consistency_error"};
    o.summary.add(row({double(tau), r.rmse, r.phase_shift, double(r.rmse_window),
                       std::string(r.large_shock_warning ? "true" : "false"), r.max_consistency_error}));
    auto meta = config_meta("shock-response", c);
    meta["tau"] = std::to_string(tau);
    meta["rmse"] = detail::fmt_double(r.rmse);
    meta["phase_shift"] = detail::fmt_double(r.phase_shift);
    meta["orbit_period"] = detail::fmt_double(orbit.period);
    write_table_csv(lng, out.path("shock_response.csv"));
    write_table_csv(o.summary, out.path("shock_summary.csv"));
    write_table_csv(fig, out.path("figure-" + c.str("output.figure") + ".csv"));
    write_metadata_json(meta, out.path("shock_response.meta.json"));
    return o;
}

RunOutput run_scenarios(const Config& c, Outputs& out, int jobs) {
    const auto q = beta_of(c);
    const auto bn = network_of(c);
    ScenarioSpec spec;
    spec.dynamics = c.words("scenarios.dynamics");
    spec.shocks.clear();
    for (const auto& w : c.words("scenarios.shocks")) spec.shocks.push_back(parse_shock_type(w));
    spec.sigma_u = c.numbers("scenarios.sigma_u");
    spec.seeds = c.integer("scenarios.seeds");
    spec.base_seed = c.seed();
    spec.steps = c.integer("scenarios.steps");
    spec.retain = c.integer("scenarios.retain");
    spec.stride = c.integer("scenarios.stride");
    spec.rho_u = c.num("scenarios.rho_u");
    spec.rho_v = c.num("scenarios.rho_v");
    spec.rho_z = c.num("scenarios.rho_z");
    spec.sigma_common = c.num("scenarios.sigma_common");
    spec.detrend = c.flag("scenarios.detrend");
    const auto ex = c.words("scenarios.exclusions");
    if (ex.size() == 1 && ex[0] == "default")
        spec.exclusions = default_exclusions();
    else if (!(ex.size() == 1 && ex[0] == "none"))
        spec.exclusions = ex;
    for (const auto& w : c.words("scenarios.sector_map")) {
        const auto colon = w.find(':');
        if (colon == std::string::npos) fail(ErrorCode::Config, "scenarios.sector_map entries look like sector:macro");
        spec.sector_map[w.substr(0, colon)] = w.substr(colon + 1);
    }
    spec.jobs = jobs;
    const auto rows = scenario_run(bn.net, q, spec);

    RunOutput r;
    r.summary.columns = {"dynamics", "shock_type", "sigma_u", "group", "mean_corr", "sd_corr", "n_seeds"};
    ResultTable fig{{"x", "y", "series"}, {}};
    for (const auto& rw : rows) {
        r.summary.add(row({rw.dynamics, rw.shock_type, rw.sigma_u, rw.group, rw.mean_corr, rw.sd_corr,
                           double(rw.n_seeds)}));
        if (rw.group.size() > 4 && rw.group.substr(rw.group.size() - 4) == "/ALL")
            fig.add(row({rw.sigma_u, rw.mean_corr, rw.dynamics + "/" + rw.shock_type + "/" +
                                                       rw.group.substr(0, rw.group.size() - 4)}));
    }
    write_scenario_csv(rows, out.path("results.csv"));
    write_table_csv(fig, out.path("figure-14.csv"));
    write_metadata_json(config_meta("scenarios", c), out.path("results.meta.json"));
    return r;
}

RunOutput run_spectrum(const Config& c, Outputs& out, int) {
    const auto bn = network_of(c);
    SpectralOptions so;
    so.max_imag = c.num("spectrum.max_imag");
    const auto spec = generalized_laplacian(bn.net, so);
    const auto fied = fiedler_vector(spec);
    const Eigen::VectorXd eig = eigenvector_centrality(bn.net);

    RunOutput r;
    r.summary.columns = {"index", "lambda_re", "lambda_im"};
    ResultTable fv{{"node", "label", "fiedler", "eigenvector_centrality"}, {}};
    ResultTable fig{{"x", "y", "series"}, {}};
    for (int i = 0; i < spec.size(); ++i) {
        r.summary.add(row({double(i), spec.lambda[i], spec.lambda_imag[i]}));
        fig.add(row({double(i), spec.lambda[i], std::string("lambda_I_minus_W")}));
        fv.add(row({double(i), bn.net.nodes[i].label, fied.vector[i], eig[i]}));
    }
    if (bn.has_adjacency && bn.adj.n >= 2) {
        const auto sym = generalized_laplacian(bn.adj, 1.0);
        for (int i = 0; i < sym.size(); ++i) fig.add(row({double(i), sym.lambda[i], std::string("lambda_KLK")}));
    }
    auto meta = config_meta("spectrum", c);
    meta["max_imag"] = detail::fmt_double(spec.max_imag);
    meta["fiedler_near_degenerate"] = fied.near_degenerate ? "true" : "false";
    write_table_csv(r.summary, out.path("spectrum.csv"));
    write_table_csv(fv, out.path("fiedler.csv"));
    write_table_csv(fig, out.path("figure-13.csv"));
    write_metadata_json(meta, out.path("spectrum.meta.json"));
    return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> catalog = build_catalog();
    return catalog;
}

const ExperimentInfo& experiment(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return e;
    fail(ErrorCode::Config, "unknown experiment '" + name + "'");
}

RunOutput run_experiment(const std::string& name, const std::map<std::string, std::string>& overrides,
                         const std::string& out_dir, int jobs) {
    const ExperimentInfo& info = experiment(name);
    const Config cfg(info, overrides);
    if (jobs < 1) fail(ErrorCode::Config, "jobs must be at least 1");
    Outputs out(out_dir);
    RunOutput r;
    if (name == "simulate") r = run_simulate(cfg, out, jobs);
    else if (name == "sweep-epsilon") r = run_sweep(cfg, out, jobs);
    else if (name == "sync-centrality") r = run_sync(cfg, out, jobs);
    else if (name == "msf") r = run_msf(cfg, out, jobs);
    else if (name == "shock-response") r = run_shock(cfg, out, jobs);
    else if (name == "scenarios") r = run_scenarios(cfg, out, jobs);
    else if (name == "spectrum") r = run_spectrum(cfg, out, jobs);
    write_resolved(out, name, cfg);
    r.files = out.files;
    return r;
}

}  // namespace cyclesync
