#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/network.hpp"
#include "cyclesync/parallel.hpp"
#include "cyclesync/simulator.hpp"

namespace cyclesync {

struct PeakOptions {
    int min_separation = 5;
    double prominence_fraction = 0.3;  // of the series' interquartile range
    double min_prominence = -1.0;      // absolute; overrides the fraction when >= 0
};

// Local maxima with prominence >= min_prominence, thinned to min_separation (taller peaks win).
// Throws TooFewPeaks when fewer than three remain.
std::vector<int> detect_peaks(const std::vector<double>& series, int min_separation, double min_prominence);
std::vector<int> detect_peaks(const std::vector<double>& series, const PeakOptions& opt = {});

double interquartile_range(std::vector<double> v);

// Linear phase between the enclosing peaks. Throws PhaseUndefined outside [first, last) peak.
double phase_at(int t, const std::vector<int>& peaks);

struct PhaseSeries {
    std::vector<int> peaks;
    int first = 0;               // phase defined on [first, last)
    int last = 0;
    std::vector<double> phase;   // phase[t - first]
    double omega = 0.0;          // 2 pi / mean inter-peak spacing

    double period() const;
};

PhaseSeries phase_series(const std::vector<double>& series, const PeakOptions& opt = {});

// Angular frequency of the dominant periodogram bin (mean removed), parabolically refined.
double dominant_frequency(const std::vector<double>& series);

// Time-averaged modulus of the mean unit phasor over the common window of all nodes.
double phase_coherence(const std::vector<PhaseSeries>& phases);
double phase_coherence(const std::vector<std::vector<double>>& phases_on_common_window);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double mean_pairwise_correlation(const Eigen::MatrixXd& columns);

std::vector<double> column(const Eigen::MatrixXd& m, int c);

struct FrequencyMeasure {
    std::vector<double> omega;
    std::vector<PhaseSeries> phases;
};

FrequencyMeasure measure_frequencies(const Eigen::MatrixXd& y, const PeakOptions& opt = {}, bool fourier = false);

bool is_entrained(const std::vector<double>& omega, double spread_tol);
double relative_spread(const std::vector<double>& omega);

struct SweepConfig {
    double alpha2 = 0.4;
    double delta = 0.1;
    std::vector<double> alpha1;  // per node
    std::vector<double> eps_grid;
    ShockConfig shocks;
    SimulationConfig sim;
    int seeds = 1;
    double spread_tol = 0.01;
    PeakOptions peaks;
    bool fourier = false;
    int jobs = 1;
};

struct SweepRow {
    double eps = 0.0;
    std::vector<double> omega;  // seed-averaged
    double coherence = 0.0;     // seed-averaged
    double coherence_sd = 0.0;
    double correlation = 0.0;
    double correlation_sd = 0.0;
    double spread = 0.0;
    bool entrained = false;
    int seeds = 0;
};

struct EntrainmentResult {
    std::vector<SweepRow> rows;
    std::vector<double> uncoupled_omega;
};

EntrainmentResult epsilon_sweep(const Adjacency& adj, const QuarticCoefficients& q, const SweepConfig& cfg);

// Evenly spaced grid with `n` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

enum class SyncMode { L, H };

struct SyncCentralityConfig {
    std::vector<double> alpha1_grid;  // one value per node; focus takes the max (L) or min (H)
    double alpha2 = 0.4;
    double delta = 0.1;
    int draws = 1000;
    SyncMode mode = SyncMode::L;
    std::uint64_t seed = 1;
    SimulationConfig sim;
    PeakOptions peaks;
    double spread_tol = 0.01;
    int jobs = 1;
};

struct SyncCentralityResult {
    std::vector<double> score;       // normalized, sums to 1
    std::vector<double> stderr_;     // of the score
    std::vector<double> raw_diff;    // benchmark - mean common frequency
    std::vector<double> mean_frequency;
    std::vector<double> frequency_stderr;
    double benchmark = 0.0;
    int draws = 0;
};

SyncCentralityResult sync_centrality(const InteractionNetwork& net, const QuarticCoefficients& q,
                                     const SyncCentralityConfig& cfg);

}  // namespace cyclesync
