#include "cyclesync/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "csv.hpp"
#include "cyclesync/error.hpp"
#include "cyclesync/parallel.hpp"
#include "cyclesync/phase_analysis.hpp"
#include "format.hpp"

namespace cyclesync {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<SeriesKey> PanelSeries::keys() const {
    std::vector<SeriesKey> out;
    std::set<SeriesKey> seen;
    for (const auto& r : records) {
        SeriesKey k{r.country, r.sector, r.variable};
        if (seen.insert(k).second) out.push_back(k);
    }
    return out;
}

PanelSeries load_panel_csv(const std::string& path) {
    const auto rows = detail::read_csv(path, {"country", "sector", "variable", "year", "value"});
    PanelSeries panel;
    std::map<std::tuple<std::string, std::string, std::string, int>, int> lines;
    std::map<SeriesKey, std::set<int>> years;
    for (const auto& r : rows) {
        PanelRecord rec{r.fields[0], r.fields[1], r.fields[2], 0, 0.0};
        const std::string where = path + ":" + std::to_string(r.line);
        if (rec.country.empty() || rec.sector.empty() || rec.variable.empty())
            fail(ErrorCode::MalformedRow, where + ": empty key field");
        if (!detail::parse_int(r.fields[3], rec.year)) fail(ErrorCode::MalformedRow, where + ": invalid year");
        if (!detail::parse_double(r.fields[4], rec.value) || !std::isfinite(rec.value))
            fail(ErrorCode::MalformedRow, where + ": invalid value");
        auto key = std::make_tuple(rec.country, rec.sector, rec.variable, rec.year);
        auto [it, inserted] = lines.emplace(key, r.line);
        if (!inserted)
            fail(ErrorCode::DuplicateKey, where + ": duplicate of line " + std::to_string(it->second));
        years[{rec.country, rec.sector, rec.variable}].insert(rec.year);
        panel.records.push_back(std::move(rec));
    }
    for (const auto& [key, ys] : years) {
        int prev = *ys.begin();
        for (int y : ys) {
            if (y > prev + 1) panel.gaps.push_back({key, prev, y});
            prev = y;
        }
    }
    return panel;
}

bool YearSeries::has(int year) const { return !std::isnan(at(year)); }

double YearSeries::at(int year) const {
    if (year < first_year || year > last_year()) return kNaN;
    return values[year - first_year];
}

YearSeries panel_series(const PanelSeries& panel, const SeriesKey& key) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& r : panel.records)
        if (r.country == key.country && r.sector == key.sector && r.variable == key.variable) {
            lo = std::min(lo, r.year);
            hi = std::max(hi, r.year);
        }
    YearSeries s;
    if (lo > hi) return s;
    s.first_year = lo;
    s.values.assign(hi - lo + 1, kNaN);
    for (const auto& r : panel.records)
        if (r.country == key.country && r.sector == key.sector && r.variable == key.variable)
            s.values[r.year - lo] = r.value;
    return s;
}

FilteredSeries cf_bandpass(const std::vector<double>& series, const BandPass& band) {
    const int n = static_cast<int>(series.size());
    if (n < 8) fail(ErrorCode::SeriesTooShort, "band-pass filter needs at least 8 observations");
    require(band.p_low >= 2.0, "p_low must be at least 2");
    require(band.p_low < band.p_high, "p_low must be below p_high");
    for (double v : series) require(std::isfinite(v), "band-pass input must be finite");

    const double pi = std::numbers::pi;
    const double a = 2.0 * pi / band.p_high;
    const double b = 2.0 * pi / band.p_low;
    std::vector<double> w(n + 1);
    w[0] = (b - a) / pi;
    for (int j = 1; j <= n; ++j) w[j] = (std::sin(j * b) - std::sin(j * a)) / (pi * j);

    // random-walk drift removal
    const double drift = (series[n - 1] - series[0]) / (n - 1);
    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) x[t] = series[t] - t * drift;

    // prefix sums of the ideal weights, excluding w[0]
    std::vector<double> cum(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) cum[j] = cum[j - 1] + w[j];
    auto wsum = [&](int count) { return count > 0 ? cum[count] : 0.0; };

    FilteredSeries out;
    out.p_low = band.p_low;
    out.p_high = band.p_high;
    out.original = series;
    out.cycle.resize(n);
    for (int i = 0; i < n; ++i) {
        const int fwd = n - i - 2;  // interior leads
        const int bwd = i - 1;      // interior lags
        double acc = w[0] * x[i];
        for (int j = 1; j <= fwd; ++j) acc += w[j] * x[i + j];
        for (int j = 1; j <= bwd; ++j) acc += w[j] * x[i - j];
        const double end_w = -0.5 * w[0] - wsum(fwd);
        const double start_w = -w[0] - wsum(fwd) - wsum(bwd) - end_w;
        out.cycle[i] = acc + end_w * x[n - 1] + start_w * x[0];
    }
    double max_abs = 0.0;
    for (double v : series) max_abs = std::max(max_abs, std::abs(v));
    const double floor = band.trend_floor * max_abs;
    out.trend.resize(n);
    out.indicator.resize(n);
    for (int t = 0; t < n; ++t) {
        out.trend[t] = series[t] - out.cycle[t];
        out.indicator[t] = std::abs(out.trend[t]) > floor ? out.cycle[t] / out.trend[t] : kNaN;
    }
    return out;
}

YearSeries join_offset(const YearSeries& x, const YearSeries& y, int year) {
    if (!x.has(year) || !y.has(year)) fail(ErrorCode::MissingJoinYear, "join year " + std::to_string(year) + " missing");
    YearSeries out = y;
    const double off = x.at(year) - y.at(year);
    for (double& v : out.values) v += off;
    return out;
}

YearSeries join_log(const YearSeries& x, const YearSeries& y, int year) {
    if (!x.has(year) || !y.has(year)) fail(ErrorCode::MissingJoinYear, "join year " + std::to_string(year) + " missing");
    if (!(x.at(year) > 0.0)) fail(ErrorCode::NonPositiveValue, "x is not positive at the join year");
    for (double v : y.values)
        if (!std::isnan(v) && !(v > 0.0)) fail(ErrorCode::NonPositiveValue, "y has non-positive values");
    YearSeries out = y;
    const double shift = std::log(x.at(year)) - std::log(y.at(year));
    for (double& v : out.values)
        if (!std::isnan(v)) v = std::exp(std::log(v) + shift);
    out.values[year - out.first_year] = x.at(year);
    return out;
}

namespace {

// CF indicator applied to each contiguous run; runs shorter than 8 become missing.
std::vector<double> detrend_runs(const std::vector<double>& v, const BandPass& band) {
    std::vector<double> out(v.size(), kNaN);
    size_t i = 0;
    while (i < v.size()) {
        if (std::isnan(v[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < v.size() && !std::isnan(v[j])) ++j;
        if (j - i >= 8) {
            const auto f = cf_bandpass(std::vector<double>(v.begin() + i, v.begin() + j), band);
            std::copy(f.indicator.begin(), f.indicator.end(), out.begin() + i);
        }
        i = j;
    }
    return out;
}

CorrelationMatrix correlate_aligned(const std::vector<std::vector<double>>& cols, const std::vector<std::string>& labels,
                                    const CorrelationOptions& opt) {
    const int n = static_cast<int>(cols.size());
    require(static_cast<int>(labels.size()) == n, "one label per series is required");
    std::vector<std::vector<double>> data = cols;
    if (opt.detrend)
        for (auto& c : data) c = detrend_runs(c, opt.band);
    CorrelationMatrix m;
    m.labels = labels;
    m.values = Eigen::MatrixXd::Constant(n, n, kNaN);
    m.overlap = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<double> a, b;
            for (size_t t = 0; t < data[i].size(); ++t)
                if (!std::isnan(data[i][t]) && !std::isnan(data[j][t])) {
                    a.push_back(data[i][t]);
                    b.push_back(data[j][t]);
                }
            m.overlap(i, j) = m.overlap(j, i) = static_cast<int>(a.size());
            if (static_cast<int>(a.size()) < std::max(3, opt.min_overlap)) continue;  // insufficient overlap
            double r = kNaN;
            try {
                r = pearson(a, b);  // degenerate series also leave the diagonal missing
                if (i == j) r = 1.0;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateSeries) throw;
                r = kNaN;
            }
            m.values(i, j) = m.values(j, i) = r;
        }
    return m;
}

}  // namespace

CorrelationMatrix correlation_matrix(const std::vector<YearSeries>& series, const std::vector<std::string>& labels,
                                     const CorrelationOptions& opt) {
    require(!series.empty(), "no series");
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (const auto& s : series)
        if (!s.values.empty()) {
            lo = std::min(lo, s.first_year);
            hi = std::max(hi, s.last_year());
        }
    require(lo <= hi, "all series are empty");
    std::vector<std::vector<double>> cols(series.size(), std::vector<double>(hi - lo + 1, kNaN));
    for (size_t i = 0; i < series.size(); ++i)
        for (int y = lo; y <= hi; ++y) cols[i][y - lo] = series[i].at(y);
    return correlate_aligned(cols, labels, opt);
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& columns, const std::vector<std::string>& labels,
                                     const CorrelationOptions& opt) {
    std::vector<std::vector<double>> cols(columns.cols());
    for (int i = 0; i < columns.cols(); ++i) cols[i] = column(columns, i);
    return correlate_aligned(cols, labels, opt);
}

std::vector<std::string> default_exclusions() { return {"AtB", "C", "E", "LtN", "L", "M", "N", "P"}; }

std::vector<GroupRow> grouped_correlations(const CorrelationMatrix& m, const std::vector<GroupMember>& members,
                                           Grouping grouping, const std::vector<std::string>& exclusions) {
    const int n = static_cast<int>(members.size());
    require(m.values.rows() == n && m.values.cols() == n, "metadata size does not match the matrix");
    auto excluded = [&](const std::string& s) {
        return std::find(exclusions.begin(), exclusions.end(), s) != exclusions.end();
    };
    std::vector<std::string> countries;
    for (const auto& mem : members)
        if (std::find(countries.begin(), countries.end(), mem.country) == countries.end())
            countries.push_back(mem.country);

    std::vector<GroupRow> rows;
    for (const auto& c : countries) {
        GroupRow row{c, 0.0, 0};
        if (grouping == Grouping::WithinCountrySectors) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    if (members[i].country != c || members[j].country != c) continue;
                    if (excluded(members[i].sector) || excluded(members[j].sector)) continue;
                    if (std::isnan(m.values(i, j))) continue;
                    row.mean += m.values(i, j);
                    ++row.pairs;
                }
        } else {
            if (excluded(c)) continue;
            for (int i = 0; i < n; ++i) {
                if (members[i].country != c) continue;
                for (int j = 0; j < n; ++j) {
                    if (members[j].country == c || excluded(members[j].country)) continue;
                    if (std::isnan(m.values(i, j))) continue;
                    row.mean += m.values(i, j);
                    ++row.pairs;
                }
            }
        }
        if (row.pairs == 0) fail(ErrorCode::EmptyGroup, "no valid pairs for group '" + c + "'");
        row.mean /= row.pairs;
        rows.push_back(row);
    }
    if (rows.empty()) fail(ErrorCode::EmptyGroup, "no groups");
    return rows;
}

const char* shock_type_name(ShockType t) {
    switch (t) {
        case ShockType::Idiosyncratic: return "idiosyncratic";
        case ShockType::Country: return "country";
        case ShockType::Sector: return "sector";
    }
    return "idiosyncratic";
}

ShockType parse_shock_type(const std::string& s) {
    if (s == "idiosyncratic") return ShockType::Idiosyncratic;
    if (s == "country") return ShockType::Country;
    if (s == "sector") return ShockType::Sector;
    fail(ErrorCode::InvalidArgument, "unknown shock type '" + s + "'");
}

namespace {

struct MacroLayout {
    std::vector<GroupMember> members;           // one per macro series
    std::vector<std::vector<int>> nodes;        // member nodes per macro series
    std::vector<std::string> country_labels;    // aggregates
    std::vector<std::vector<int>> country_nodes;
};

MacroLayout macro_layout(const InteractionNetwork& net, const ScenarioSpec& spec) {
    MacroLayout lay;
    std::map<std::pair<int, std::string>, int> index;
    for (int i = 0; i < net.size(); ++i) {
        const NodeInfo& info = net.nodes[i];
        if (info.final_demand || info.sector < 0 || info.country < 0) continue;
        const std::string& sec = net.sectors[info.sector];
        auto it = spec.sector_map.find(sec);
        const std::string macro = it == spec.sector_map.end() ? sec : it->second;
        if (std::find(spec.exclusions.begin(), spec.exclusions.end(), macro) != spec.exclusions.end()) continue;
        auto [pos, inserted] = index.emplace(std::make_pair(info.country, macro), static_cast<int>(lay.members.size()));
        if (inserted) {
            lay.members.push_back({net.countries[info.country], macro});
            lay.nodes.emplace_back();
        }
        lay.nodes[pos->second].push_back(i);
        auto cit = std::find(lay.country_labels.begin(), lay.country_labels.end(), net.countries[info.country]);
        if (cit == lay.country_labels.end()) {
            lay.country_labels.push_back(net.countries[info.country]);
            lay.country_nodes.emplace_back();
            cit = lay.country_labels.end() - 1;
        }
        lay.country_nodes[cit - lay.country_labels.begin()].push_back(i);
    }
    require(!lay.members.empty(), "no sector-country nodes remain after exclusions");
    return lay;
}

Eigen::MatrixXd weighted_columns(const Eigen::MatrixXd& annual, const std::vector<std::vector<int>>& groups,
                                 const Eigen::VectorXd& outputs) {
    Eigen::MatrixXd out(annual.rows(), static_cast<Eigen::Index>(groups.size()));
    for (size_t g = 0; g < groups.size(); ++g) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(annual.rows());
        double total = 0.0;
        for (int i : groups[g]) {
            acc += outputs[i] * annual.col(i);
            total += outputs[i];
        }
        out.col(g) = acc / total;
    }
    return out;
}

struct SeedGroups {
    std::map<std::string, double> value;  // group label -> mean correlation
};

double nan_mean(const std::vector<double>& v, int& count) {
    double s = 0.0;
    count = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            s += x;
            ++count;
        }
    return count ? s / count : kNaN;
}

}  // namespace

std::vector<ScenarioRow> scenario_run(const InteractionNetwork& net, const QuarticCoefficients& q,
                                      const ScenarioSpec& spec) {
    require(spec.seeds >= 1, "seeds must be positive");
    require(!spec.dynamics.empty() && !spec.shocks.empty() && !spec.sigma_u.empty(), "empty scenario grid");
    require(spec.retain > 0 && spec.retain <= spec.steps, "retain must lie in (0, steps]");
    require(spec.retain % spec.stride == 0, "stride must divide retain");
    for (const auto& d : spec.dynamics) dynamics_preset(d);
    const MacroLayout lay = macro_layout(net, spec);
    const Eigen::VectorXd outputs = net.outputs();
    std::vector<std::string> macro_labels;
    for (const auto& m : lay.members) macro_labels.push_back(m.country + "." + m.sector);

    struct Task {
        int d, s, g, seed;
    };
    std::vector<Task> tasks;
    for (int d = 0; d < static_cast<int>(spec.dynamics.size()); ++d)
        for (int s = 0; s < static_cast<int>(spec.shocks.size()); ++s)
            for (int g = 0; g < static_cast<int>(spec.sigma_u.size()); ++g)
                for (int k = 0; k < spec.seeds; ++k) tasks.push_back({d, s, g, k});

    CorrelationOptions copt;
    copt.detrend = spec.detrend;
    copt.min_overlap = 10;
    std::vector<SeedGroups> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), spec.jobs, [&](int idx) {
        const Task& t = tasks[idx];
        const DynamicsPreset dp = dynamics_preset(spec.dynamics[t.d]);
        const auto params = replicate_params(calibrated_params(dp.alpha1, dp.alpha2, dp.delta, q), net.size());
        ShockConfig sh;
        sh.idiosyncratic = {spec.rho_u, spec.sigma_u[t.g]};
        sh.sector = {spec.rho_v, spec.shocks[t.s] == ShockType::Sector ? spec.sigma_common : 0.0};
        sh.country = {spec.rho_z, spec.shocks[t.s] == ShockType::Country ? spec.sigma_common : 0.0};
        SimulationConfig sim;
        sim.steps = spec.steps;
        sim.burn_in = spec.steps - spec.retain;
        sim.retain = spec.retain;
        sim.stride = spec.stride;
        sim.seed = spec.base_seed + static_cast<std::uint64_t>(t.seed);
        const auto traj = simulate(net, params, q, sh, sim);
        const Eigen::MatrixXd annual = aggregate_series(traj.y, spec.stride);

        SeedGroups out;
        auto record = [&](const std::string& prefix, const std::vector<GroupRow>& rows) {
            std::vector<double> vals;
            for (const auto& r : rows) {
                out.value[prefix + "/" + r.group] = r.mean;
                vals.push_back(r.mean);
            }
            int cnt = 0;
            out.value[prefix + "/ALL"] = nan_mean(vals, cnt);
        };
        const auto sectors = correlation_matrix(weighted_columns(annual, lay.nodes, outputs), macro_labels, copt);
        try {
            record("within_country", grouped_correlations(sectors, lay.members, Grouping::WithinCountrySectors));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyGroup) throw;
        }
        if (lay.country_labels.size() >= 2) {
            const auto agg = correlation_matrix(weighted_columns(annual, lay.country_nodes, outputs),
                                                lay.country_labels, copt);
            std::vector<GroupMember> cm;
            for (const auto& c : lay.country_labels) cm.push_back({c, ""});
            try {
                record("across_country", grouped_correlations(agg, cm, Grouping::AcrossCountryAggregates));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyGroup) throw;
            }
        }
        results[idx] = std::move(out);
    });

    // Keyed merge in deterministic task order.
    std::vector<ScenarioRow> rows;
    for (size_t base = 0; base < tasks.size(); base += spec.seeds) {
        const Task& t = tasks[base];
        std::vector<std::string> labels;
        for (int k = 0; k < spec.seeds; ++k)
            for (const auto& [label, v] : results[base + k].value)
                if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
        std::sort(labels.begin(), labels.end());
        for (const auto& label : labels) {
            std::vector<double> vals;
            for (int k = 0; k < spec.seeds; ++k) {
                auto it = results[base + k].value.find(label);
                vals.push_back(it == results[base + k].value.end() ? kNaN : it->second);
            }
            ScenarioRow row;
            row.dynamics = spec.dynamics[t.d];
            row.shock_type = shock_type_name(spec.shocks[t.s]);
            row.sigma_u = spec.sigma_u[t.g];
            row.group = label;
            row.mean_corr = nan_mean(vals, row.n_seeds);
            double ss = 0.0;
            for (double v : vals)
                if (!std::isnan(v)) ss += (v - row.mean_corr) * (v - row.mean_corr);
            row.sd_corr = row.n_seeds > 1 ? std::sqrt(ss / (row.n_seeds - 1)) : (row.n_seeds == 1 ? 0.0 : kNaN);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_scenario_csv(const std::vector<ScenarioRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << "dynamics,shock_type,sigma_u,group,mean_corr,sd_corr,n_seeds\n";
    for (const auto& r : rows)
        out << r.dynamics << ',' << r.shock_type << ',' << detail::fmt_double(r.sigma_u) << ',' << r.group << ','
            << detail::fmt_double(r.mean_corr) << ',' << detail::fmt_double(r.sd_corr) << ',' << r.n_seeds << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace cyclesync
