#include "cyclesync/simulator.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "cyclesync/error.hpp"
#include "format.hpp"

namespace cyclesync {

void ShockConfig::validate() const {
    for (const Ar1* a : {&idiosyncratic, &sector, &country}) {
        require(a->rho >= 0.0 && a->rho < 1.0, "shock persistence must lie in [0,1)");
        require(a->sigma >= 0.0, "shock sigma must be non-negative");
    }
}

void SimulationConfig::validate() const {
    require(steps > 0, "steps must be positive");
    require(burn_in >= 0 && burn_in < steps, "burn_in must lie in [0, steps)");
    require(retain >= 0 && burn_in + retained() <= steps, "burn_in + retain exceeds steps");
    require(stride >= 1 && retained() % stride == 0, "stride must divide the retained length");
    require(perturbation >= 0.0 && perturbation < 1.0, "perturbation must lie in [0,1)");
    require(blowup_bound > 0.0, "blowup bound must be positive");
}

std::mt19937_64 make_stream(std::uint64_t seed, StreamLayer layer, std::uint64_t index, std::uint64_t sub_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), static_cast<std::uint32_t>(sub_index),
                      static_cast<std::uint32_t>(sub_index >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> ar1_path(double rho, double sigma, int steps, std::mt19937_64& rng) {
    require(rho >= 0.0 && rho < 1.0, "rho must lie in [0,1)");
    require(sigma >= 0.0, "sigma must be non-negative");
    require(steps >= 0, "steps must be non-negative");
    std::vector<double> u(steps, 0.0);
    if (sigma == 0.0) return u;
    std::normal_distribution<double> normal(0.0, sigma);
    for (int t = 0; t + 1 < steps; ++t) u[t + 1] = rho * u[t] + normal(rng);
    return u;
}

std::vector<AgentParams> replicate_params(const AgentParams& p, int n) { return std::vector<AgentParams>(n, p); }

namespace {

Eigen::MatrixXd shock_matrix(const Ar1& a, int columns, int steps, int start, std::uint64_t seed, StreamLayer layer) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(steps, columns);
    if (a.sigma == 0.0) return m;
    for (int c = 0; c < columns; ++c) {
        auto rng = make_stream(seed, layer, static_cast<std::uint64_t>(c));
        const auto path = ar1_path(a.rho, a.sigma, steps - start, rng);
        for (int t = start; t < steps; ++t) m(t, c) = path[t - start];
    }
    return m;
}

const char* initial_name(InitialMode m) {
    switch (m) {
        case InitialMode::Perturbed: return "perturbed";
        case InitialMode::FixedPoint: return "fixed_point";
        case InitialMode::Explicit: return "explicit";
    }
    return "perturbed";
}

}  // namespace

TrajectorySet simulate(const InteractionNetwork& net, const std::vector<AgentParams>& params,
                       const QuarticCoefficients& q, const ShockConfig& shocks, const SimulationConfig& cfg) {
    cfg.validate();
    shocks.validate();
    const int n = net.size();
    require(n >= 1, "empty network");
    require(static_cast<int>(params.size()) == n, "one parameter set per node is required");
    net.validate(1e-9);
    for (const auto& p : params) require(p.delta > 0.0 && p.delta <= 1.0, "delta must lie in (0,1]");

    const int ns = static_cast<int>(net.sectors.size());
    const int nc = static_cast<int>(net.countries.size());
    const int start = shocks.during_burn_in ? 0 : cfg.burn_in;
    const Eigen::MatrixXd u = shock_matrix(shocks.idiosyncratic, n, cfg.steps, start, cfg.seed, StreamLayer::Idiosyncratic);
    const Eigen::MatrixXd v = shock_matrix(shocks.sector, ns, cfg.steps, start, cfg.seed, StreamLayer::Sector);
    const Eigen::MatrixXd z = shock_matrix(shocks.country, nc, cfg.steps, start, cfg.seed, StreamLayer::Country);

    Eigen::VectorXd x(n), y(n);
    switch (cfg.initial) {
        case InitialMode::FixedPoint:
            for (int i = 0; i < n; ++i) {
                x[i] = 1.0 / params[i].delta;
                y[i] = 1.0;
            }
            break;
        case InitialMode::Perturbed: {
            auto rng = make_stream(cfg.seed, StreamLayer::Initial, 0);
            std::uniform_real_distribution<double> unif(-cfg.perturbation, cfg.perturbation);
            for (int i = 0; i < n; ++i) {
                x[i] = (1.0 / params[i].delta) * (1.0 + unif(rng));
                y[i] = 1.0 + unif(rng);
            }
            break;
        }
        case InitialMode::Explicit:
            require(static_cast<int>(cfg.initial_x.size()) == n && static_cast<int>(cfg.initial_y.size()) == n,
                    "explicit initial condition needs one (x,y) per node");
            for (int i = 0; i < n; ++i) {
                x[i] = cfg.initial_x[i];
                y[i] = cfg.initial_y[i];
            }
            break;
    }

    const int keep = cfg.retained();
    TrajectorySet out;
    out.first_step = cfg.burn_in;
    out.x.resize(keep, n);
    out.y.resize(keep, n);
    out.u = u.middleRows(cfg.burn_in, keep);
    out.v = v.middleRows(cfg.burn_in, keep);
    out.z = z.middleRows(cfg.burn_in, keep);
    out.nodes = net.nodes;

    Eigen::VectorXd ybar(n), nx(n), ny(n);
    for (int t = 0; t < cfg.steps; ++t) {
        if (t >= cfg.burn_in && t < cfg.burn_in + keep) {
            out.x.row(t - cfg.burn_in) = x.transpose();
            out.y.row(t - cfg.burn_in) = y.transpose();
        }
        if (t + 1 == cfg.steps || t + 1 >= cfg.burn_in + keep) break;
        ybar.noalias() = net.w * y;
        for (int i = 0; i < n; ++i) {
            const NodeInfo& info = net.nodes[i];
            double shock = u(t, i);
            if (info.sector >= 0 && info.sector < ns) shock += v(t, info.sector);
            if (info.country >= 0 && info.country < nc) shock += z(t, info.country);
            const AgentState s = map_step(params[i], q, {x[i], y[i]}, ybar[i], shock);
            nx[i] = s.x;
            ny[i] = s.y;
            if (!std::isfinite(s.y) || !std::isfinite(s.x) || std::abs(s.y) > cfg.blowup_bound)
                fail(ErrorCode::NumericalBlowup, "|y| exceeded " + detail::fmt_double(cfg.blowup_bound) +
                                                     " at step " + std::to_string(t + 1) + " (node " +
                                                     std::to_string(i) + ")");
        }
        x.swap(nx);
        y.swap(ny);
    }

    auto& m = out.metadata;
    m["nodes"] = std::to_string(n);
    m["steps"] = std::to_string(cfg.steps);
    m["burn_in"] = std::to_string(cfg.burn_in);
    m["retain"] = std::to_string(keep);
    m["stride"] = std::to_string(cfg.stride);
    m["seed"] = std::to_string(cfg.seed);
    m["initial_mode"] = initial_name(cfg.initial);
    m["initial_perturbation"] = detail::fmt_double(cfg.perturbation);
    m["blowup_bound"] = detail::fmt_double(cfg.blowup_bound);
    m["normal_method"] = kNormalMethod;
    m["rng"] = "mt19937_64/seed_seq(seed,layer,index)";
    m["rho_u"] = detail::fmt_double(shocks.idiosyncratic.rho);
    m["sigma_u"] = detail::fmt_double(shocks.idiosyncratic.sigma);
    m["rho_v"] = detail::fmt_double(shocks.sector.rho);
    m["sigma_v"] = detail::fmt_double(shocks.sector.sigma);
    m["rho_z"] = detail::fmt_double(shocks.country.rho);
    m["sigma_z"] = detail::fmt_double(shocks.country.sigma);
    m["shocks_during_burn_in"] = shocks.during_burn_in ? "true" : "false";
    m["beta"] = detail::fmt_double(q.b0) + " " + detail::fmt_double(q.b1) + " " + detail::fmt_double(q.b2) + " " +
                detail::fmt_double(q.b3) + " " + detail::fmt_double(q.b4);
    return out;
}

Eigen::MatrixXd aggregate_series(const Eigen::MatrixXd& series, int stride) {
    require(stride >= 1, "stride must be positive");
    require(series.rows() % stride == 0, "stride must divide the series length");
    const int blocks = static_cast<int>(series.rows()) / stride;
    Eigen::MatrixXd out(blocks, series.cols());
    for (int b = 0; b < blocks; ++b) out.row(b) = series.middleRows(b * stride, stride).colwise().mean();
    return out;
}

std::vector<double> aggregate_series(const std::vector<double>& series, int stride) {
    Eigen::Map<const Eigen::VectorXd> v(series.data(), static_cast<Eigen::Index>(series.size()));
    Eigen::MatrixXd r = aggregate_series(Eigen::MatrixXd(v), stride);
    return std::vector<double>(r.data(), r.data() + r.rows());
}

Eigen::VectorXd weighted_aggregate(const Eigen::MatrixXd& series, const Eigen::VectorXd& weights) {
    require(weights.size() == series.cols(), "one weight per column is required");
    const double total = weights.sum();
    require(total > 0.0, "weights must have positive sum");
    return series * weights / total;
}

void write_trajectory_csv(const TrajectorySet& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << "node,step,x,y\n";
    for (int i = 0; i < traj.nodes_count(); ++i)
        for (int t = 0; t < traj.steps(); ++t)
            out << i << ',' << traj.first_step + t << ',' << detail::fmt_double(traj.x(t, i)) << ','
                << detail::fmt_double(traj.y(t, i)) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

void write_metadata_json(const std::map<std::string, std::string>& meta, const std::string& path) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) j[k] = v;
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace cyclesync
