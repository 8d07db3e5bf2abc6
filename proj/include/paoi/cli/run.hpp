#pragma once

#include <string>
#include <vector>

#include "paoi/cli/config.hpp"
#include "paoi/cli/csv.hpp"

namespace paoi::cli {

struct RunOutput {
    std::vector<ResultRow> rows;
    std::string summary;
};

/// Evaluates every (sweep point x discipline x class x method) row for the
/// verb. Throws UnsupportedModelError naming a fallback when an analytic
/// route does not apply.
RunOutput run(const ExperimentConfig& cfg, Mode mode);

struct AdviceOutput {
    std::vector<AdviceRow> rows;
    std::string summary;
};

/// Given vs. ascending-load priority order under FCFS buffers.
AdviceOutput advise(const ExperimentConfig& cfg);

/// Exit code convention: 0 ok, 1 validation, 2 capability, 3 numerical.
int exit_code_for(const std::exception& e);

/// Full command-line entry point (argv includes the program name).
int main_entry(int argc, char** argv);

}  // namespace paoi::cli
