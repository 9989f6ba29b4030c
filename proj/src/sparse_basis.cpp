// SPDX-License-Identifier: Apache-2.0

#include "sacr/sparse_basis.hpp"

#include <string>

namespace sacr
{
    SensedBasis build_sensed_basis(std::span<const AnglePair> dirs, const ArrayConfig &array, double rank_tol)
    {
        if (dirs.empty())
            throw std::invalid_argument("build_sensed_basis: at least one direction is required");
        if (!(rank_tol >= 0.0))
            throw std::invalid_argument("build_sensed_basis: rank_tol must be >= 0");

        const CMatrix a = steering_matrix(dirs, array);
        Eigen::JacobiSVD<CMatrix, Eigen::ColPivHouseholderQRPreconditioner> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success)
            throw NumericalError("build_sensed_basis: SVD failed");

        SensedBasis basis;
        basis.u = svd.matrixU();
        basis.v = svd.matrixV();
        basis.singular_values = svd.singularValues();

        const double top = basis.singular_values.size() > 0 ? basis.singular_values(0) : 0.0;
        for (Eigen::Index i = 0; i < basis.singular_values.size(); ++i)
            if (top > 0.0 && basis.singular_values(i) > rank_tol * top)
                ++basis.rank;
        return basis;
    }

    double projection_residual(const CVector &h, const SensedBasis &basis)
    {
        if (h.size() != basis.u.rows())
            throw DimensionError("projection_residual: channel length " + std::to_string(h.size()) +
                                 " does not match basis size " + std::to_string(basis.u.rows()));
        const double norm = h.norm();
        if (!(norm > 0.0))
            throw std::invalid_argument("projection_residual: zero channel");
        const auto uj = basis.leading();
        const CVector coeff = uj.adjoint() * h;
        return (h - uj * coeff).norm() / norm;
    }
}
