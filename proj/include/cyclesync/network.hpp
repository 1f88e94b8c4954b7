#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cyclesync {

struct Adjacency {
    int n = 0;
    std::vector<std::vector<int>> neighbors;  // sorted, symmetric, no self-loops

    int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
    std::vector<int> degrees() const;
    bool connected() const;
    void add_edge(int i, int j);
};

enum class TopologyKind { Complete, Star, Chain, TwoClique };

TopologyKind parse_topology(const std::string& name);

struct TopologyOptions {
    int clique_a = 3;
    int clique_b = 3;
    int bridge_a = 0;   // node index within the first clique
    int bridge_b = 0;   // node index within the second clique
};

Adjacency build_topology(TopologyKind kind, int n, const TopologyOptions& opt = {});

// Stars of `leaves`+1 nodes whose hubs form a complete graph.
Adjacency build_star_of_stars(int stars, int leaves);

struct NodeInfo {
    std::string label;
    int sector = -1;   // index into InteractionNetwork::sectors, -1 if none
    int country = -1;  // index into InteractionNetwork::countries, -1 if none
    double output = 1.0;
    bool final_demand = false;
};

struct InteractionNetwork {
    Eigen::MatrixXd w;
    std::vector<NodeInfo> nodes;
    std::vector<std::string> sectors;
    std::vector<std::string> countries;

    int size() const { return static_cast<int>(w.rows()); }
    Eigen::VectorXd outputs() const;
    // Throws InvalidArgument unless rows sum to 1 within tol and entries lie in [0,1].
    void validate(double tol = 1e-10) const;
};

InteractionNetwork uniform_coupling(const Adjacency& adj, double eps);
InteractionNetwork uniform_matrix(int n);

struct FlowRecord {
    std::string source_sector;
    std::string source_country;
    std::string dest_sector;  // "FinD" for final demand
    std::string dest_country;
    double value = 0.0;
};

struct FlowTable {
    std::vector<FlowRecord> records;
};

inline constexpr const char* kFinalDemand = "FinD";

FlowTable load_flow_table_csv(const std::string& path);
void write_flow_table_csv(const FlowTable& flows, const std::string& path);

// Demand-driven input-output network. Node order: per country (first appearance), its sectors
// (first appearance) followed by the country's final-demand node.
InteractionNetwork build_io_network(const FlowTable& flows);

// Sums extensive flows O_i w_ij over blocks and re-normalizes rows. partition[i] = block id.
InteractionNetwork aggregate_nodes(const InteractionNetwork& net, const std::vector<int>& partition,
                                   const Eigen::VectorXd& outputs, const std::vector<std::string>& labels = {});

struct SpectralDecomposition {
    Eigen::MatrixXd b;          // KLK (undirected input) or I - W
    double coupling = 1.0;      // eps multiplying B for adjacency input, 1 for I - W
    Eigen::VectorXd lambda;     // real parts, ascending
    Eigen::VectorXd lambda_imag;
    Eigen::MatrixXd q;          // unit-norm right eigenvectors (real parts), columns
    Eigen::MatrixXd q_inv;
    double max_imag = 0.0;
    bool symmetric = false;
    Eigen::VectorXd node_outputs;

    int size() const { return static_cast<int>(lambda.size()); }
};

struct SpectralOptions {
    double max_imag = 0.1;  // abort above this imaginary magnitude
};

SpectralDecomposition generalized_laplacian(const Adjacency& adj, double eps = 1.0);
SpectralDecomposition generalized_laplacian(const InteractionNetwork& net, const SpectralOptions& opt = {});

struct FiedlerResult {
    Eigen::VectorXd vector;
    double lambda2 = 0.0;
    bool near_degenerate = false;
};

FiedlerResult fiedler_vector(const SpectralDecomposition& spec);

struct CentralityOptions {
    int max_iter = 1000000;
    double tol = 1e-12;
};

Eigen::VectorXd eigenvector_centrality(const InteractionNetwork& net, const CentralityOptions& opt = {});

}  // namespace cyclesync
