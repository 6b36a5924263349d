#pragma once

// Experiment runner behind the command line tool. Every run writes its data
// files, the resolved configuration (config.resolved) and manifest.json into
// output.directory. A run that fails after writing data files still writes a
// manifest, marked partial.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "acldp/config.hpp"

namespace acldp {

struct RunRequest
{
    std::string command;      // profile, energy, flow, sde, invariant, action, mam, ldp-tail
    std::string config_path;  // empty: defaults
    std::vector<std::pair<std::string, std::string>> overrides;  // applied after the file, in order
    std::string input;        // energy --input, action --path, mam --target
};

struct RunOutcome
{
    int exit_code = 0;  // 0 ok, 1 numerical failure, 2 configuration error
    std::string message;
    std::vector<std::string> outputs;  // file names inside output.directory
};

RunOutcome run(RunRequest const& request, std::ostream& log);

std::vector<std::string> const& run_commands();

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string const& text);

std::string version_string();

// ACLDP_THREADS overrides run.threads when set to a positive integer.
int thread_count(ExperimentConfig const& cfg);

}  // namespace acldp
