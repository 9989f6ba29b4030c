// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sacr/evaluation.hpp"

namespace sacr
{
    struct CheckResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
        double seconds = 0.0;
    };

    // Smallest ||y - D_S x|| over all supports S with |S| = sparsity (brute force)
    struct ExhaustiveFit
    {
        double residual = 0.0;
        std::vector<int> support;
    };
    ExhaustiveFit exhaustive_min_residual(const CVector &y, const CMatrix &dict, int sparsity);

    // Self-checks of the simulator invariants, built around `base`
    std::vector<CheckResult> run_validation(const TrialConfig &base, std::uint64_t seed);

    void write_check_report(const std::vector<CheckResult> &checks, std::ostream &os);
}
