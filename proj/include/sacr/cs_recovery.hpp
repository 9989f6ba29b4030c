// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "sacr/pilots_feedback.hpp"
#include "sacr/sparse_basis.hpp"

namespace sacr
{
    struct RecoveryParams
    {
        double epsilon = 0.05;           // halt once ||r|| <= epsilon * ||y||
        int step_size = 1;               // SAMP stage increment
        std::optional<int> max_sparsity; // unset: number of measurements
        int max_iter = 0;                // 0: 10 * number of measurements

        void validate() const;
    };

    struct SparseSolution
    {
        CVector coefficients;              // over the full dictionary index set
        std::vector<int> support;          // ascending
        double residual_norm = 0.0;        // ||y - D x||
        double relative_residual = 0.0;    // residual_norm / ||y||, 0 for y = 0
        std::vector<double> residual_history; // relative residual after each accepted update
        int stages_used = 0;
        int iterations = 0;
        bool converged = false;     // relative residual reached epsilon
        bool rank_deficient = false; // some support least-squares was solved in the minimum-norm sense
    };

    // Orthogonal matching pursuit. Atoms are ranked with unit-normalized columns; the
    // returned coefficients refer to the dictionary as given.
    SparseSolution omp(const CVector &y, const CMatrix &dict, const RecoveryParams &params);

    // Sparsity adaptive matching pursuit: stagewise support size L = stage * step_size,
    // with a preliminary/final test (backtracking) inside each stage.
    SparseSolution samp(const CVector &y, const CMatrix &dict, const RecoveryParams &params);

    // Least-squares fit of y on the given dictionary columns
    struct SupportFit
    {
        CVector x;
        CVector residual;
        bool rank_deficient = false;
    };
    SupportFit fit_support(const CVector &y, const CMatrix &dict, const std::vector<int> &support);

    enum class DictionaryMode
    {
        restricted, // X_p U_J: only the sensed subspace
        full        // X_p U with sparsity capped at J
    };

    struct ChannelEstimate
    {
        CVector h;
        SparseSolution solution;
        bool degenerate = false; // zero feedback, zero estimate
    };

    // Sensing-assisted recovery: SAMP on X_p U, h~ = U alpha~
    ChannelEstimate recover_channel_sensed(const CVector &y_fb, const PilotMatrix &pilots, const SensedBasis &basis,
                                           const RecoveryParams &params,
                                           DictionaryMode mode = DictionaryMode::restricted);

    // DFT-basis benchmark: SAMP on X_p A_d, h- = A_d alpha-
    ChannelEstimate recover_channel_dft(const CVector &y_fb, const PilotMatrix &pilots, const CMatrix &dft,
                                        const RecoveryParams &params);
}
