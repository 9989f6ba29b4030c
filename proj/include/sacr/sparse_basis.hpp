// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "sacr/array_geometry.hpp"

namespace sacr
{
    // Orthonormal basis from the SVD of the sensed steering matrix A^ = U S V^H.
    // The first `rank` columns of u span the column space of A^.
    struct SensedBasis
    {
        CMatrix u;                       // N x N unitary
        CMatrix v;                       // M x M unitary
        Eigen::VectorXd singular_values; // min(N, M) values, descending
        int rank = 0;

        auto leading() const { return u.leftCols(rank); }
    };

    constexpr double default_rank_tol = 1e-8;

    // rank = #{i : s_i > rank_tol * s_1}
    SensedBasis build_sensed_basis(std::span<const AnglePair> dirs, const ArrayConfig &array,
                                   double rank_tol = default_rank_tol);

    // ||h - U_J U_J^H h|| / ||h||
    double projection_residual(const CVector &h, const SensedBasis &basis);
}
