#pragma once

// Experiment configuration: flat "section.key = value" lines, '#' starts a
// comment, lists are comma separated. Unknown keys and malformed values throw
// ConfigError naming the key.

#include <cstdint>
#include <string>
#include <vector>

#include "acldp/noise.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct ExperimentConfig
{
    // domain
    double L = 2.0;
    int n = 255;
    int modes = 0;  // 0: (n + 1) / 2

    // noise
    NoiseKind noise_kind = NoiseKind::constant;
    double g0 = 1.0;
    double c = 0.0;

    // sde
    std::vector<double> eps{0.1, 0.05, 0.025};
    double dt = 2e-3;
    double T = 10.0;
    double burn_in = -1.0;  // negative: 10 x relaxation time
    int n_chains = 8;
    double stride = 1.0;
    int samples_per_chain = 1000;
    std::uint64_t seed = 2024;
    int modes_noise = 0;
    double lambda = 0.0;
    double blowup = 50.0;

    // sobolev
    double kstar = 0.2;
    int pstar = 8;
    double alpha = 0.24;

    // flow
    double flow_dt = 1e-3;
    double flow_T = 20.0;
    double flow_stop_tol = 1e-10;
    std::string flow_init = "zero";  // zero, profile, or a CSV path

    // action
    double action_T0 = 2.0;
    int action_rungs = 4;
    double action_dt = 0.02;
    int action_max_iter = 200;
    double action_tol = 1e-12;

    // ldp
    double ldp_delta = 0.0;  // 0: automatic
    double ldp_R = 0.0;      // 0: automatic
    long ldp_min_count = 10;

    // output and run
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};
    int threads = 1;

    int resolved_modes() const { return modes > 0 ? modes : (n + 1) / 2; }
    Domain domain() const { return Domain(L, n, resolved_modes()); }
    NoiseModel noise() const;
    double noise_lipschitz() const { return noise().lipschitz(); }
};

// Sets one key from its text value; throws ConfigError on unknown keys,
// unparsable values, or values outside the key's range.
void set_config_value(ExperimentConfig& cfg, std::string const& key, std::string const& value);

// `origin` names the source in error messages.
ExperimentConfig parse_config(std::string const& text, std::string const& origin = "config");
ExperimentConfig load_config(std::string const& path);

// Cross-field checks against the module preconditions.
void validate_config(ExperimentConfig const& cfg);

// Every key with its value, one per line in a fixed order; parse_config of
// this text reproduces the configuration.
std::string resolved_config_text(ExperimentConfig const& cfg);

std::vector<std::string> config_keys();

}  // namespace acldp
