// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sacr
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_config_error = 1,
        exit_runtime_error = 2,
        exit_validation_failed = 3
    };

    // Environment variable supplying the default worker count
    inline constexpr const char *workers_env = "SACR_WORKERS";

    // Entry point for `sacr sweep|trial|validate`; args exclude the program name
    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
}
