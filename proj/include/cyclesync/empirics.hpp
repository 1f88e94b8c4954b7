#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cyclesync/core_dynamics.hpp"
#include "cyclesync/network.hpp"
#include "cyclesync/simulator.hpp"

namespace cyclesync {

struct PanelRecord {
    std::string country;
    std::string sector;
    std::string variable;
    int year = 0;
    double value = 0.0;
};

struct SeriesKey {
    std::string country;
    std::string sector;
    std::string variable;
    auto operator<=>(const SeriesKey&) const = default;
};

struct YearGap {
    SeriesKey key;
    int after_year;   // last observed year before the gap
    int before_year;  // first observed year after the gap
};

struct PanelSeries {
    std::vector<PanelRecord> records;
    std::vector<YearGap> gaps;

    std::vector<SeriesKey> keys() const;
};

PanelSeries load_panel_csv(const std::string& path);

// Year-indexed series; missing years are NaN.
struct YearSeries {
    int first_year = 0;
    std::vector<double> values;

    int last_year() const { return first_year + static_cast<int>(values.size()) - 1; }
    bool has(int year) const;
    double at(int year) const;  // NaN if absent
};

YearSeries panel_series(const PanelSeries& panel, const SeriesKey& key);

struct BandPass {
    double p_low = 2.0;
    double p_high = 25.0;
    double trend_floor = 1e-6;  // relative to max |original|
};

struct FilteredSeries {
    std::vector<double> original;
    std::vector<double> cycle;
    std::vector<double> trend;      // original - cycle
    std::vector<double> indicator;  // cycle / trend, NaN where |trend| is below the floor
    double p_low = 2.0;
    double p_high = 25.0;
};

FilteredSeries cf_bandpass(const std::vector<double>& series, const BandPass& band = {});

YearSeries join_offset(const YearSeries& x, const YearSeries& y, int year);
YearSeries join_log(const YearSeries& x, const YearSeries& y, int year);

struct CorrelationMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;      // NaN where overlap is insufficient
    Eigen::MatrixXi overlap;
};

struct CorrelationOptions {
    bool detrend = false;
    int min_overlap = 10;
    BandPass band;
};

// Pairwise-complete Pearson correlations of year-aligned series.
CorrelationMatrix correlation_matrix(const std::vector<YearSeries>& series, const std::vector<std::string>& labels,
                                     const CorrelationOptions& opt = {});
// Columns of a complete matrix (e.g. simulated annual output).
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& columns, const std::vector<std::string>& labels,
                                     const CorrelationOptions& opt = {});

enum class Grouping { WithinCountrySectors, AcrossCountryAggregates };

struct GroupMember {
    std::string country;
    std::string sector;
};

struct GroupRow {
    std::string group;
    double mean = 0.0;
    int pairs = 0;
};

std::vector<std::string> default_exclusions();

// members[i] describes row/column i of the matrix. For aggregates the sector field is ignored.
std::vector<GroupRow> grouped_correlations(const CorrelationMatrix& m, const std::vector<GroupMember>& members,
                                           Grouping grouping, const std::vector<std::string>& exclusions = {});

enum class ShockType { Idiosyncratic, Country, Sector };

const char* shock_type_name(ShockType t);
ShockType parse_shock_type(const std::string& s);

struct ScenarioSpec {
    std::vector<std::string> dynamics{"cycle", "focus", "node"};
    std::vector<ShockType> shocks{ShockType::Idiosyncratic, ShockType::Country, ShockType::Sector};
    std::vector<double> sigma_u{0.0, 0.1, 0.2, 0.3, 0.4};
    double rho_u = 0.0;
    double rho_v = 0.3;
    double rho_z = 0.3;
    double sigma_common = 0.05;  // sigma_v or sigma_z where active
    int seeds = 20;
    std::uint64_t base_seed = 1;
    int steps = 600;
    int retain = 228;
    int stride = 4;
    bool detrend = false;
    std::vector<std::string> exclusions;
    std::map<std::string, std::string> sector_map;  // model sector -> macro-sector; identity when absent
    int jobs = 1;
};

struct ScenarioRow {
    std::string dynamics;
    std::string shock_type;
    double sigma_u = 0.0;
    std::string group;
    double mean_corr = 0.0;
    double sd_corr = 0.0;
    int n_seeds = 0;
};

std::vector<ScenarioRow> scenario_run(const InteractionNetwork& net, const QuarticCoefficients& q,
                                      const ScenarioSpec& spec);

void write_scenario_csv(const std::vector<ScenarioRow>& rows, const std::string& path);

}  // namespace cyclesync
