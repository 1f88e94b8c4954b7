#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace cyclesync {

using Cell = std::variant<double, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

void write_table_csv(const ResultTable& t, const std::string& path);

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::vector<std::pair<std::string, std::string>> defaults;  // "section.key" -> value
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment(const std::string& name);

struct RunOutput {
    ResultTable summary;
    std::vector<std::string> files;
};

// Merges overrides into the experiment defaults (unknown keys are a Config error), runs the
// experiment and writes its files into out_dir.
RunOutput run_experiment(const std::string& name, const std::map<std::string, std::string>& overrides,
                         const std::string& out_dir, int jobs);

}  // namespace cyclesync
