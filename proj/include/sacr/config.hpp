// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sacr/evaluation.hpp"

namespace sacr
{
    struct SweepSpec
    {
        SweepVariable variable = SweepVariable::snr_db;
        std::vector<double> values{0.0, 5.0, 10.0, 15.0, 20.0};
        int trials = 1000;
        int workers = 1;
    };

    struct LoadedConfig
    {
        TrialConfig trial;
        SweepSpec sweep;
    };

    // YAML document with optional `array`, `scene`, `sensing`, `recovery` and `sweep` sections.
    // Overrides are `dotted.key=value`, the value parsed as YAML. Missing keys keep the defaults
    // (N_v = N_h = 8, M = 6, M_c = 4, T = 200, K = 16, B = 12, SNR 15 dB).
    // Throws ConfigError on parse errors (with line numbers), unknown keys and range violations.
    LoadedConfig load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides = {});
    LoadedConfig load_config_text(const std::string &text, const std::vector<std::string> &overrides = {});

    // "start:stop:step" (stop included when it lands on the grid) or a comma-separated list
    std::vector<double> parse_values(const std::string &spec);

    // Every key load_config accepts, in dotted form
    std::vector<std::string> known_config_keys();
}
