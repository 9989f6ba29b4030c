// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "sacr/types.hpp"

namespace sacr
{
    // Uniform planar array, n_v rows by n_h columns. Element spacings are in wavelengths.
    struct ArrayConfig
    {
        int n_v = 8;
        int n_h = 8;
        double spacing_v = 0.5;
        double spacing_h = 0.5;

        int size() const { return n_v * n_h; }
        void validate() const;
    };

    // Steering vectors keep the 1/N_v and 1/N_h prefactors, so ||a||^2 = 1/(N_v N_h).
    CVector steering_v(double theta, const ArrayConfig &cfg);
    CVector steering_h(double theta, double phi, const ArrayConfig &cfg);

    // a_v(theta) (x) a_h(theta, phi); element p*N_h + q is a_v[p] * a_h[q]
    CVector steering(double theta, double phi, const ArrayConfig &cfg);
    inline CVector steering(const AnglePair &dir, const ArrayConfig &cfg) { return steering(dir.theta, dir.phi, cfg); }

    // Columns are steering vectors of the given directions
    CMatrix steering_matrix(std::span<const AnglePair> dirs, const ArrayConfig &cfg);

    // Unitary n-point DFT matrix, F(r, c) = exp(-j 2 pi r c / n) / sqrt(n)
    CMatrix dft_matrix(int n);

    // Kronecker DFT basis A_v (x) A_h, unitary
    CMatrix dft_basis(const ArrayConfig &cfg);

    CMatrix kronecker(const CMatrix &a, const CMatrix &b);
}
