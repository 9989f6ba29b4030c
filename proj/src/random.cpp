// SPDX-License-Identifier: Apache-2.0

#include "sacr/random.hpp"

#include <cmath>

namespace sacr
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }
    }

    double Rng::uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double Rng::uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    double Rng::normal()
    {
        if (spare_)
        {
            double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        return radius * std::cos(angle);
    }

    cplx Rng::cscg(double variance)
    {
        double s = std::sqrt(variance / 2.0);
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    CVector Rng::cscg_vector(Eigen::Index n, double variance)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = cscg(variance);
        return v;
    }

    CMatrix Rng::cscg_matrix(Eigen::Index rows, Eigen::Index cols, double variance)
    {
        // Row-major fill order so that a K x N pilot draw consumes symbols in time order
        CMatrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                m(r, c) = cscg(variance);
        return m;
    }

    std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids)
    {
        std::uint64_t h = splitmix64(base);
        for (auto id : ids)
            h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
        return h;
    }
}
