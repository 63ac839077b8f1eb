#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "excsim/config.hpp"
#include "excsim/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Exciton qubit simulator: electrically gated spin dynamics and detection"};

    std::string config_path;
    std::string experiment;
    std::string out_dir;
    long long seed = -1;
    int workers = 0;
    bool check = false;

    app.add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);
    app.add_option("--experiment", experiment,
                   "Experiment name: fig1d, fig2, fig3b, fig3cf, fig4, sweep");
    app.add_option("--seed", seed, "Random seed (overrides config)");
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--workers", workers, "Worker threads for sweeps (0 = default)");
    app.add_flag("--check", check, "Exit nonzero unless acceptance thresholds pass");

    CLI11_PARSE(app, argc, argv);

    try {
        excsim::KeyValueConfig kv =
            config_path.empty() ? excsim::KeyValueConfig{} : excsim::KeyValueConfig::parse_file(config_path);
        if (!experiment.empty()) kv.set("experiment", experiment);
        if (seed >= 0) kv.set("seed", std::to_string(seed));
        if (!out_dir.empty()) kv.set("output_dir", out_dir);
        if (workers > 0) kv.set("workers", std::to_string(workers));

        excsim::ExperimentConfig cfg = excsim::ExperimentConfig::from_config(kv);
#ifdef _OPENMP
        if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
        const auto outcome = excsim::run_experiment(cfg);
        std::cout << outcome.message << "  (summary: " << outcome.summary_path << ")\n";
        return check && !outcome.pass ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
