// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

#include "sacr/types.hpp"

namespace sacr
{
    // Seedable random stream with platform-independent variate generation.
    //
    // std::mt19937_64 output is fully specified by the standard, but the
    // standard distributions are not, so uniform and Gaussian variates are
    // derived here from raw engine output (53-bit uniforms, Box-Muller).
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        double uniform();                     // [0, 1)
        double uniform(double lo, double hi); // [lo, hi)
        double normal();                      // standard real Gaussian
        cplx cscg(double variance = 1.0);     // CN(0, variance)
        double phase() { return uniform(-std::numbers::pi, std::numbers::pi); }

        CVector cscg_vector(Eigen::Index n, double variance = 1.0);
        CMatrix cscg_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

    private:
        std::mt19937_64 engine_;
        std::optional<double> spare_;
    };

    // Mixes a base seed with a list of stream identifiers (splitmix64 chain).
    std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids);
}
