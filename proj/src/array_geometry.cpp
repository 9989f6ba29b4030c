// SPDX-License-Identifier: Apache-2.0

#include "sacr/array_geometry.hpp"

#include <cmath>
#include <string>

namespace sacr
{
    namespace
    {
        CVector ula_response(int n, double spacing, double direction_cosine)
        {
            CVector a(n);
            const double step = 2.0 * std::numbers::pi * spacing * direction_cosine;
            const double scale = 1.0 / n;
            for (int i = 0; i < n; ++i)
                a(i) = std::polar(scale, step * i);
            return a;
        }
    }

    void ArrayConfig::validate() const
    {
        if (n_v < 1 || n_h < 1)
            throw ConfigError("array: n_v and n_h must be >= 1 (got " + std::to_string(n_v) + ", " + std::to_string(n_h) + ")");
        if (!(spacing_v > 0.0) || !(spacing_h > 0.0))
            throw ConfigError("array: element spacings must be positive");
    }

    CVector steering_v(double theta, const ArrayConfig &cfg)
    {
        return ula_response(cfg.n_v, cfg.spacing_v, std::sin(theta));
    }

    CVector steering_h(double theta, double phi, const ArrayConfig &cfg)
    {
        return ula_response(cfg.n_h, cfg.spacing_h, std::cos(theta) * std::sin(phi));
    }

    CVector steering(double theta, double phi, const ArrayConfig &cfg)
    {
        const CVector av = steering_v(theta, cfg);
        const CVector ah = steering_h(theta, phi, cfg);
        CVector a(cfg.size());
        for (int p = 0; p < cfg.n_v; ++p)
            a.segment(p * cfg.n_h, cfg.n_h) = av(p) * ah;
        return a;
    }

    CMatrix steering_matrix(std::span<const AnglePair> dirs, const ArrayConfig &cfg)
    {
        CMatrix a(cfg.size(), static_cast<Eigen::Index>(dirs.size()));
        for (std::size_t m = 0; m < dirs.size(); ++m)
            a.col(static_cast<Eigen::Index>(m)) = steering(dirs[m], cfg);
        return a;
    }

    CMatrix dft_matrix(int n)
    {
        CMatrix f(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
            {
                // reduce r*c mod n before scaling to keep the phase argument small
                const int k = (r * c) % n;
                f(r, c) = std::polar(scale, -2.0 * std::numbers::pi * k / n);
            }
        return f;
    }

    CMatrix dft_basis(const ArrayConfig &cfg)
    {
        return kronecker(dft_matrix(cfg.n_v), dft_matrix(cfg.n_h));
    }

    CMatrix kronecker(const CMatrix &a, const CMatrix &b)
    {
        CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return k;
    }
}
