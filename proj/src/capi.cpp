#include "cyclesync/cyclesync.h"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/error.hpp"
#include "cyclesync/master_stability.hpp"
#include "cyclesync/network.hpp"
#include "cyclesync/phase_analysis.hpp"
#include "cyclesync/simulator.hpp"
#include "experiments.hpp"
#include "format.hpp"

using namespace cyclesync;

struct csync_network {
    InteractionNetwork net;
    std::optional<Adjacency> adj;
    double eps = 0.0;
};

struct csync_spectrum {
    SpectralDecomposition spec;
};

struct csync_trajectory {
    TrajectorySet traj;
};

struct csync_orbit {
    SynchronizedOrbit orbit;
};

struct csync_params {
    std::map<std::string, std::string> values;
};

struct csync_table {
    ResultTable table;
    std::vector<std::string> files;
    mutable std::string text;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_scratch;

csync_status set_error(csync_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
csync_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return CSYNC_OK;
    } catch (const Error& e) {
        return set_error(static_cast<csync_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(CSYNC_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(CSYNC_INTERNAL, std::string("internal error: ") + e.what());
    } catch (...) {
        return set_error(CSYNC_INTERNAL, "internal error");
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

void index_in(int i, int n, const char* what) {
    if (i < 0 || i >= n) fail(ErrorCode::InvalidArgument, std::string(what) + " out of range");
}

}  // namespace

extern "C" {

const char* csync_version(void) { return "1.0.0"; }

const char* csync_last_error(void) { return g_last_error.c_str(); }

const char* csync_status_name(csync_status status) {
    if (status == CSYNC_OK) return "Ok";
    if (status == CSYNC_INTERNAL) return "Internal";
    if (status < 1 || status > 26) return "Unknown";
    return error_name(static_cast<ErrorCode>(status));
}

csync_error_kind csync_status_kind(csync_status status) {
    if (status == CSYNC_OK) return CSYNC_KIND_NONE;
    if (status < 1 || status > 26) return CSYNC_KIND_NUMERICAL;
    switch (error_kind(static_cast<ErrorCode>(status))) {
        case ErrorKind::Config: return CSYNC_KIND_CONFIG;
        case ErrorKind::Data: return CSYNC_KIND_DATA;
        case ErrorKind::Numerical: break;
    }
    return CSYNC_KIND_NUMERICAL;
}

csync_status csync_steady_state_alpha0(double alpha1, double alpha2, double delta, double* alpha0) {
    return guarded([&] {
        need(alpha0, "alpha0");
        *alpha0 = steady_state_alpha0(alpha1, alpha2, delta, QuarticCoefficients::reference());
    });
}

csync_status csync_linear_frequency(double alpha1, double alpha2, double delta, double* psi) {
    return guarded([&] {
        need(psi, "psi");
        const auto q = QuarticCoefficients::reference();
        const auto p = calibrated_params(alpha1, alpha2, delta, q);
        *psi = linear_frequency(jacobian_at(p, eval_f_prime(q, 1.0)));
    });
}

csync_status csync_classify(double alpha1, double alpha2, double delta, int* stability) {
    return guarded([&] {
        need(stability, "stability");
        const auto q = QuarticCoefficients::reference();
        const auto p = calibrated_params(alpha1, alpha2, delta, q);
        *stability = static_cast<int>(classify_stability(jacobian_at(p, eval_f_prime(q, 1.0))));
    });
}

csync_status csync_network_topology(const char* topology, int n, double eps, csync_network** out) {
    return guarded([&] {
        need(topology, "topology");
        need(out, "out");
        *out = nullptr;
        auto h = std::make_unique<csync_network>();
        h->adj = build_topology(parse_topology(topology), n);
        h->eps = eps;
        h->net = uniform_coupling(*h->adj, eps);
        *out = h.release();
    });
}

csync_status csync_network_two_clique(int clique_a, int clique_b, int bridge_a, int bridge_b, double eps,
                                      csync_network** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        TopologyOptions opt{clique_a, clique_b, bridge_a, bridge_b};
        auto h = std::make_unique<csync_network>();
        h->adj = build_topology(TopologyKind::TwoClique, clique_a + clique_b, opt);
        h->eps = eps;
        h->net = uniform_coupling(*h->adj, eps);
        *out = h.release();
    });
}

csync_status csync_network_from_matrix(const double* w_row_major, int n, csync_network** out) {
    return guarded([&] {
        need(w_row_major, "matrix");
        need(out, "out");
        *out = nullptr;
        require(n > 0, "matrix size must be positive");
        auto h = std::make_unique<csync_network>();
        h->net.w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            w_row_major, n, n);
        h->net.nodes.resize(n);
        for (int i = 0; i < n; ++i) h->net.nodes[i].label = std::to_string(i);
        h->net.validate(1e-9);
        *out = h.release();
    });
}

csync_status csync_network_from_flows(const char* csv_path, csync_network** out) {
    return guarded([&] {
        need(csv_path, "path");
        need(out, "out");
        *out = nullptr;
        auto h = std::make_unique<csync_network>();
        h->net = build_io_network(load_flow_table_csv(csv_path));
        *out = h.release();
    });
}

csync_status csync_network_uniform(int n, csync_network** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        auto h = std::make_unique<csync_network>();
        h->net = uniform_matrix(n);
        *out = h.release();
    });
}

int csync_network_size(const csync_network* net) { return net ? net->net.size() : 0; }

csync_status csync_network_weight(const csync_network* net, int i, int j, double* w) {
    return guarded([&] {
        need(net, "network");
        need(w, "w");
        index_in(i, net->net.size(), "row");
        index_in(j, net->net.size(), "column");
        *w = net->net.w(i, j);
    });
}

const char* csync_network_label(const csync_network* net, int i) {
    if (!net || i < 0 || i >= net->net.size()) return nullptr;
    return net->net.nodes[i].label.c_str();
}

csync_status csync_network_output(const csync_network* net, int i, double* output) {
    return guarded([&] {
        need(net, "network");
        need(output, "output");
        index_in(i, net->net.size(), "node");
        *output = net->net.nodes[i].output;
    });
}

csync_status csync_network_centrality(const csync_network* net, double* out) {
    return guarded([&] {
        need(net, "network");
        need(out, "out");
        const Eigen::VectorXd c = eigenvector_centrality(net->net);
        for (int i = 0; i < c.size(); ++i) out[i] = c[i];
    });
}

void csync_network_free(csync_network* net) { delete net; }

csync_status csync_spectrum_compute(const csync_network* net, double max_imag, csync_spectrum** out) {
    return guarded([&] {
        need(net, "network");
        need(out, "out");
        *out = nullptr;
        SpectralOptions opt;
        opt.max_imag = max_imag;
        auto h = std::make_unique<csync_spectrum>();
        h->spec = generalized_laplacian(net->net, opt);
        *out = h.release();
    });
}

csync_status csync_spectrum_laplacian(const csync_network* net, csync_spectrum** out) {
    return guarded([&] {
        need(net, "network");
        need(out, "out");
        *out = nullptr;
        if (!net->adj) fail(ErrorCode::InvalidArgument, "network was not built from a topology");
        auto h = std::make_unique<csync_spectrum>();
        h->spec = generalized_laplacian(*net->adj, net->eps);
        *out = h.release();
    });
}

int csync_spectrum_size(const csync_spectrum* spec) { return spec ? spec->spec.size() : 0; }

csync_status csync_spectrum_eigenvalue(const csync_spectrum* spec, int k, double* re, double* im) {
    return guarded([&] {
        need(spec, "spectrum");
        index_in(k, spec->spec.size(), "mode");
        if (re) *re = spec->spec.lambda[k];
        if (im) *im = spec->spec.lambda_imag[k];
    });
}

csync_status csync_spectrum_vector(const csync_spectrum* spec, int k, double* out) {
    return guarded([&] {
        need(spec, "spectrum");
        need(out, "out");
        index_in(k, spec->spec.size(), "mode");
        for (int i = 0; i < spec->spec.size(); ++i) out[i] = spec->spec.q(i, k);
    });
}

csync_status csync_spectrum_coupling(const csync_spectrum* spec, double* coupling) {
    return guarded([&] {
        need(spec, "spectrum");
        need(coupling, "coupling");
        *coupling = spec->spec.coupling;
    });
}

csync_status csync_to_eigenbasis(const csync_spectrum* spec, const double* xi, double* zeta) {
    return guarded([&] {
        need(spec, "spectrum");
        need(xi, "xi");
        need(zeta, "zeta");
        const int n = 2 * spec->spec.size();
        const Eigen::VectorXd z = to_eigenbasis(Eigen::Map<const Eigen::VectorXd>(xi, n), spec->spec);
        Eigen::Map<Eigen::VectorXd>(zeta, n) = z;
    });
}

csync_status csync_from_eigenbasis(const csync_spectrum* spec, const double* zeta, double* xi) {
    return guarded([&] {
        need(spec, "spectrum");
        need(xi, "xi");
        need(zeta, "zeta");
        const int n = 2 * spec->spec.size();
        const Eigen::VectorXd x = from_eigenbasis(Eigen::Map<const Eigen::VectorXd>(zeta, n), spec->spec);
        Eigen::Map<Eigen::VectorXd>(xi, n) = x;
    });
}

void csync_spectrum_free(csync_spectrum* spec) { delete spec; }

void csync_sim_options_default(csync_sim_options* opt) {
    if (!opt) return;
    const SimulationConfig d;
    *opt = csync_sim_options{};
    opt->steps = d.steps;
    opt->burn_in = d.burn_in;
    opt->retain = d.retain;
    opt->stride = d.stride;
    opt->seed = d.seed;
    opt->alpha2 = 0.4;
    opt->delta = 0.1;
}

csync_status csync_simulate(const csync_network* net, const double* alpha1, const csync_sim_options* opt,
                            csync_trajectory** out) {
    return guarded([&] {
        need(net, "network");
        need(alpha1, "alpha1");
        need(opt, "options");
        need(out, "out");
        *out = nullptr;
        const auto q = QuarticCoefficients::reference();
        std::vector<AgentParams> params;
        for (int i = 0; i < net->net.size(); ++i)
            params.push_back(calibrated_params(alpha1[i], opt->alpha2, opt->delta, q));
        ShockConfig shocks;
        shocks.idiosyncratic = {opt->rho_u, opt->sigma_u};
        shocks.sector = {opt->rho_v, opt->sigma_v};
        shocks.country = {opt->rho_z, opt->sigma_z};
        SimulationConfig cfg;
        cfg.steps = opt->steps;
        cfg.burn_in = opt->burn_in;
        cfg.retain = opt->retain;
        cfg.stride = opt->stride;
        cfg.seed = opt->seed;
        auto h = std::make_unique<csync_trajectory>();
        h->traj = simulate(net->net, params, q, shocks, cfg);
        *out = h.release();
    });
}

int csync_trajectory_steps(const csync_trajectory* traj) { return traj ? traj->traj.steps() : 0; }
int csync_trajectory_nodes(const csync_trajectory* traj) { return traj ? traj->traj.nodes_count() : 0; }
int csync_trajectory_first_step(const csync_trajectory* traj) { return traj ? traj->traj.first_step : 0; }

csync_status csync_trajectory_value(const csync_trajectory* traj, char var, int step, int node, double* out) {
    return guarded([&] {
        need(traj, "trajectory");
        need(out, "out");
        index_in(step, traj->traj.steps(), "step");
        index_in(node, traj->traj.nodes_count(), "node");
        if (var == 'x')
            *out = traj->traj.x(step, node);
        else if (var == 'y')
            *out = traj->traj.y(step, node);
        else
            fail(ErrorCode::InvalidArgument, "variable must be 'x' or 'y'");
    });
}

csync_status csync_trajectory_period(const csync_trajectory* traj, int node, double* period) {
    return guarded([&] {
        need(traj, "trajectory");
        need(period, "period");
        index_in(node, traj->traj.nodes_count(), "node");
        *period = phase_series(column(traj->traj.y, node)).period();
    });
}

csync_status csync_trajectory_write_csv(const csync_trajectory* traj, const char* path) {
    return guarded([&] {
        need(traj, "trajectory");
        need(path, "path");
        write_trajectory_csv(traj->traj, path);
    });
}

void csync_trajectory_free(csync_trajectory* traj) { delete traj; }

csync_status csync_orbit_create(double alpha1, double alpha2, double delta, int steps, int burn_in,
                                csync_orbit** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        const auto q = QuarticCoefficients::reference();
        OrbitOptions opt;
        opt.steps = steps;
        opt.burn_in = burn_in;
        auto h = std::make_unique<csync_orbit>();
        h->orbit = synchronized_orbit(calibrated_params(alpha1, alpha2, delta, q), q, opt);
        *out = h.release();
    });
}

csync_status csync_orbit_period(const csync_orbit* orbit, double* period) {
    return guarded([&] {
        need(orbit, "orbit");
        need(period, "period");
        *period = orbit->orbit.period;
    });
}

csync_status csync_orbit_lyapunov(const csync_orbit* orbit, double k, int burn_in, double* mu1, double* mu2) {
    return guarded([&] {
        need(orbit, "orbit");
        LyapunovOptions opt;
        opt.burn_in = burn_in;
        const auto est = mode_lyapunov(orbit->orbit, k, opt);
        if (mu1) *mu1 = est.mu1;
        if (mu2) *mu2 = est.mu2;
    });
}

void csync_orbit_free(csync_orbit* orbit) { delete orbit; }

csync_status csync_params_create(csync_params** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        *out = new csync_params;
    });
}

csync_status csync_params_set(csync_params* params, const char* key, const char* value) {
    return guarded([&] {
        need(params, "params");
        need(key, "key");
        need(value, "value");
        const std::string k = key;
        if (k.find('.') == std::string::npos || k.front() == '.' || k.back() == '.')
            fail(ErrorCode::Config, "key '" + k + "' must look like section.key");
        params->values[k] = value;
    });
}

void csync_params_free(csync_params* params) { delete params; }

int csync_experiment_count(void) { return static_cast<int>(experiments().size()); }

const char* csync_experiment_name(int index) {
    if (index < 0 || index >= csync_experiment_count()) return nullptr;
    return experiments()[index].name.c_str();
}

const char* csync_experiment_description(int index) {
    if (index < 0 || index >= csync_experiment_count()) return nullptr;
    return experiments()[index].description.c_str();
}

const char* csync_experiment_defaults(const char* name) {
    if (!name) return nullptr;
    for (const auto& e : experiments()) {
        if (e.name != name) continue;
        g_scratch.clear();
        for (const auto& [k, v] : e.defaults) g_scratch += k + " = " + v + "\n";
        return g_scratch.c_str();
    }
    return nullptr;
}

csync_status csync_run(const char* experiment, const csync_params* params, const char* out_dir, int jobs,
                       csync_table** summary) {
    return guarded([&] {
        need(experiment, "experiment");
        need(out_dir, "out_dir");
        if (summary) *summary = nullptr;
        static const std::map<std::string, std::string> empty;
        auto r = run_experiment(experiment, params ? params->values : empty, out_dir, jobs);
        if (summary) {
            auto h = std::make_unique<csync_table>();
            h->table = std::move(r.summary);
            h->files = std::move(r.files);
            *summary = h.release();
        }
    });
}

int csync_table_rows(const csync_table* table) { return table ? static_cast<int>(table->table.rows.size()) : 0; }
int csync_table_cols(const csync_table* table) { return table ? static_cast<int>(table->table.columns.size()) : 0; }

const char* csync_table_column(const csync_table* table, int col) {
    if (!table || col < 0 || col >= csync_table_cols(table)) return nullptr;
    return table->table.columns[col].c_str();
}

double csync_table_value(const csync_table* table, int row, int col) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!table || row < 0 || row >= csync_table_rows(table) || col < 0 ||
        col >= static_cast<int>(table->table.rows[row].size()))
        return nan;
    const Cell& c = table->table.rows[row][col];
    const double* d = std::get_if<double>(&c);
    return d ? *d : nan;
}

const char* csync_table_text(const csync_table* table, int row, int col) {
    if (!table || row < 0 || row >= csync_table_rows(table) || col < 0 ||
        col >= static_cast<int>(table->table.rows[row].size()))
        return nullptr;
    const Cell& c = table->table.rows[row][col];
    if (const double* d = std::get_if<double>(&c))
        table->text = detail::fmt_double(*d);
    else
        table->text = std::get<std::string>(c);
    return table->text.c_str();
}

int csync_table_file_count(const csync_table* table) { return table ? static_cast<int>(table->files.size()) : 0; }

const char* csync_table_file(const csync_table* table, int index) {
    if (!table || index < 0 || index >= csync_table_file_count(table)) return nullptr;
    return table->files[index].c_str();
}

csync_status csync_table_write_csv(const csync_table* table, const char* path) {
    return guarded([&] {
        need(table, "table");
        need(path, "path");
        write_table_csv(table->table, path);
    });
}

void csync_table_free(csync_table* table) { delete table; }

}  // extern "C"
