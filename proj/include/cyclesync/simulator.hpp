#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/network.hpp"

namespace cyclesync {

struct Ar1 {
    double rho = 0.0;
    double sigma = 0.0;
};

struct ShockConfig {
    Ar1 idiosyncratic;  // u, per node
    Ar1 sector;         // v, per sector id
    Ar1 country;        // z, per country id
    bool during_burn_in = true;

    void validate() const;
    bool active() const { return idiosyncratic.sigma > 0 || sector.sigma > 0 || country.sigma > 0; }
};

enum class InitialMode { Perturbed, FixedPoint, Explicit };

struct SimulationConfig {
    int steps = 600;
    int burn_in = 372;
    int retain = 0;  // 0: steps - burn_in
    int stride = 1;
    std::uint64_t seed = 1;
    InitialMode initial = InitialMode::Perturbed;
    double perturbation = 0.1;        // relative half-width of the uniform initial draw
    std::vector<double> initial_x;    // Explicit mode
    std::vector<double> initial_y;
    double blowup_bound = 1e3;

    int retained() const { return retain > 0 ? retain : steps - burn_in; }
    void validate() const;
};

// Independent random streams keyed by (seed, layer, index).
enum class StreamLayer : std::uint32_t { Initial = 1, Idiosyncratic = 2, Sector = 3, Country = 4, Draw = 5 };

std::mt19937_64 make_stream(std::uint64_t seed, StreamLayer layer, std::uint64_t index,
                            std::uint64_t sub_index = 0);

inline constexpr const char* kNormalMethod = "marsaglia_polar";

// u_0 = 0, u_{t+1} = rho u_t + iota_t with iota ~ N(0, sigma).
std::vector<double> ar1_path(double rho, double sigma, int steps, std::mt19937_64& rng);

struct TrajectorySet {
    int first_step = 0;           // absolute step of row 0
    Eigen::MatrixXd x;            // rows: retained steps, cols: nodes
    Eigen::MatrixXd y;
    Eigen::MatrixXd u;            // per node
    Eigen::MatrixXd v;            // per sector
    Eigen::MatrixXd z;            // per country
    std::vector<NodeInfo> nodes;
    std::map<std::string, std::string> metadata;

    int steps() const { return static_cast<int>(y.rows()); }
    int nodes_count() const { return static_cast<int>(y.cols()); }
};

TrajectorySet simulate(const InteractionNetwork& net, const std::vector<AgentParams>& params,
                       const QuarticCoefficients& q, const ShockConfig& shocks, const SimulationConfig& cfg);

// Homogeneous parameters for every node.
std::vector<AgentParams> replicate_params(const AgentParams& p, int n);

// Non-overlapping block means along rows.
Eigen::MatrixXd aggregate_series(const Eigen::MatrixXd& series, int stride);
std::vector<double> aggregate_series(const std::vector<double>& series, int stride);

// Weighted cross-node mean of each row: sum_i w_i y_ti / sum_i w_i over the selected columns.
Eigen::VectorXd weighted_aggregate(const Eigen::MatrixXd& series, const Eigen::VectorXd& weights);

void write_trajectory_csv(const TrajectorySet& traj, const std::string& path);
void write_metadata_json(const std::map<std::string, std::string>& meta, const std::string& path);

}  // namespace cyclesync
