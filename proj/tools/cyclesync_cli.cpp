// Command-line front end over the C API.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "cyclesync/cyclesync.h"

namespace {

constexpr int kExitConfig = 2;

struct Invocation {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string seed;
    int jobs = 1;
    bool show_defaults = false;
    bool quiet = false;
};

std::string default_out(const std::string& experiment) {
    const char* env = std::getenv("CYCLESYNC_OUT_DIR");
    const std::string base = env && *env ? env : "out";
    return base + "/" + experiment;
}

int run(const std::string& experiment, const Invocation& inv) {
    if (inv.show_defaults) {
        const char* d = csync_experiment_defaults(experiment.c_str());
        std::cout << (d ? d : "");
        return 0;
    }
    std::map<std::string, std::string> values;
    try {
        if (!inv.config.empty()) values = cyclesync::cli::load_ini(inv.config);
        for (const auto& s : inv.sets) {
            auto [k, v] = cyclesync::cli::parse_assignment(s);
            values[k] = v;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: Config: " << e.what() << '\n';
        return kExitConfig;
    }
    if (auto it = values.find("run.experiment"); it != values.end()) {
        if (it->second != experiment) {
            std::cerr << "error: Config: config file targets '" << it->second << "', not '" << experiment << "'\n";
            return kExitConfig;
        }
        values.erase(it);
    }
    if (!inv.seed.empty()) values["run.seed"] = inv.seed;

    csync_params* params = nullptr;
    csync_status st = csync_params_create(&params);
    for (auto it = values.begin(); st == CSYNC_OK && it != values.end(); ++it)
        st = csync_params_set(params, it->first.c_str(), it->second.c_str());
    csync_table* summary = nullptr;
    const std::string out = inv.out.empty() ? default_out(experiment) : inv.out;
    if (st == CSYNC_OK) st = csync_run(experiment.c_str(), params, out.c_str(), inv.jobs, &summary);
    csync_params_free(params);
    if (st != CSYNC_OK) {
        std::cerr << "error: " << csync_last_error() << '\n';
        return static_cast<int>(csync_status_kind(st));
    }
    if (!inv.quiet) {
        const int cols = csync_table_cols(summary);
        for (int c = 0; c < cols; ++c) std::cout << (c ? "," : "") << csync_table_column(summary, c);
        std::cout << '\n';
        const int rows = csync_table_rows(summary);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) std::cout << (c ? "," : "") << csync_table_text(summary, r, c);
            std::cout << '\n';
        }
        for (int i = 0; i < csync_table_file_count(summary); ++i) std::cerr << "wrote " << csync_table_file(summary, i) << '\n';
    }
    csync_table_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("cyclesync ") + csync_version() + ": coupled business-cycle oscillators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", csync_version());
    app.footer("Output directory defaults to $CYCLESYNC_OUT_DIR/<experiment> (or out/<experiment>).\n"
               "Exit codes: 0 ok, 2 configuration, 3 numerical, 4 data or I/O.");

    const int n = csync_experiment_count();
    std::vector<Invocation> invocations(n);
    std::vector<CLI::App*> subs;
    for (int i = 0; i < n; ++i) {
        auto* sub = app.add_subcommand(csync_experiment_name(i), csync_experiment_description(i));
        auto& inv = invocations[i];
        sub->add_option("-c,--config", inv.config, "INI file with [section] key = value entries")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", inv.sets, "override one key, e.g. --set network.eps=0.2");
        sub->add_option("-o,--out", inv.out, "output directory");
        sub->add_option("--seed", inv.seed, "base random seed (run.seed)");
        sub->add_option("-j,--jobs", inv.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--defaults", inv.show_defaults, "print the default configuration and exit");
        sub->add_flag("-q,--quiet", inv.quiet, "do not print the summary table");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    for (int i = 0; i < n; ++i)
        if (subs[i]->parsed()) return run(csync_experiment_name(i), invocations[i]);
    return kExitConfig;
}
