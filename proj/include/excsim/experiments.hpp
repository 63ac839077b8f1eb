#pragma once

#include <string>

#include "excsim/config.hpp"

namespace excsim {

struct ExperimentOutcome {
    bool pass = false;
    std::string message;      // one-line PASS/FAIL summary
    std::string summary_path; // JSON summary file
};

/// Runs the named experiment, writes CSV traces plus a JSON summary into
/// cfg.output_dir and returns the pass/fail verdict against the accept.*
/// thresholds of the config.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

} // namespace excsim
