// SPDX-License-Identifier: Apache-2.0

#include "sacr/pilots_feedback.hpp"

#include <cmath>
#include <string>

namespace sacr
{
    PilotMatrix draw_pilots(int k, int n, double power, Rng &rng)
    {
        if (k < 1 || n < 1)
            throw DimensionError("draw_pilots: k and n must be >= 1");
        if (!(power > 0.0))
            throw std::invalid_argument("draw_pilots: power must be positive");

        PilotMatrix p{rng.cscg_matrix(k, n), power};
        const double amplitude = std::sqrt(power);
        for (Eigen::Index t = 0; t < p.entries.rows(); ++t)
        {
            const double norm = p.entries.row(t).norm();
            if (norm > 0.0)
                p.entries.row(t) *= amplitude / norm;
            else
                p.entries.row(t).setConstant(cplx(amplitude / std::sqrt(static_cast<double>(n)), 0.0));
        }
        return p;
    }

    CVector receive_pilots(const PilotMatrix &pilots, const CVector &h, double noise_power, Rng &rng)
    {
        if (pilots.antennas() != h.size())
            throw DimensionError("receive_pilots: pilot width " + std::to_string(pilots.antennas()) +
                                 " does not match channel length " + std::to_string(h.size()));
        if (noise_power < 0.0)
            throw std::invalid_argument("receive_pilots: negative noise power");

        CVector y = pilots.entries * h;
        if (noise_power > 0.0)
            y += rng.cscg_vector(y.size(), noise_power);
        return y;
    }

    RvqCodebook RvqCodebook::build(int k, int bits, std::uint64_t seed, int max_bits)
    {
        if (k < 1)
            throw DimensionError("rvq_build: k must be >= 1");
        if (bits < 1)
            throw std::invalid_argument("rvq_build: bits must be >= 1");
        if (bits > max_bits || bits > 31)
            throw CapacityError("rvq_build: " + std::to_string(bits) + " bits exceeds the codebook cap of " +
                                std::to_string(std::min(max_bits, 31)) + " bits");

        const Eigen::Index count = Eigen::Index{1} << bits;
        Rng rng(seed);
        CMatrix c(k, count);
        for (Eigen::Index b = 0; b < count; ++b)
        {
            CVector col = rng.cscg_vector(k);
            double norm = col.norm();
            while (!(norm > 0.0))
            {
                col = rng.cscg_vector(k);
                norm = col.norm();
            }
            c.col(b) = col / norm;
        }
        return RvqCodebook(std::move(c), bits, seed);
    }

    RvqCodebook RvqCodebook::from_codewords(CMatrix codewords)
    {
        const Eigen::Index count = codewords.cols();
        if (codewords.rows() < 1 || count < 2 || (count & (count - 1)) != 0)
            throw DimensionError("from_codewords: need k >= 1 rows and a power-of-two column count >= 2");
        for (Eigen::Index b = 0; b < count; ++b)
            if (std::abs(codewords.col(b).norm() - 1.0) > 1e-12)
                throw std::invalid_argument("from_codewords: column " + std::to_string(b) + " is not unit norm");
        int bits = 0;
        while ((Eigen::Index{1} << bits) < count)
            ++bits;
        return RvqCodebook(std::move(codewords), bits, 0);
    }

    FeedbackWord rvq_quantize(const CVector &y, const RvqCodebook &cb)
    {
        if (y.size() != cb.dimension())
            throw DimensionError("rvq_quantize: vector length " + std::to_string(y.size()) +
                                 " does not match codebook dimension " + std::to_string(cb.dimension()));
        const double norm = y.norm();
        if (!(norm > 0.0))
            throw std::invalid_argument("rvq_quantize: cannot quantize a zero vector");

        const CVector yn = y / norm;
        const Eigen::VectorXd gains = (cb.codewords().adjoint() * yn).cwiseAbs2();
        std::uint32_t best = 0;
        for (Eigen::Index b = 1; b < gains.size(); ++b)
            if (gains(b) > gains(best))
                best = static_cast<std::uint32_t>(b);
        return {best};
    }

    CVector rvq_lookup(FeedbackWord w, const RvqCodebook &cb)
    {
        if (w.index >= cb.size())
            throw std::out_of_range("rvq_lookup: index " + std::to_string(w.index) + " outside codebook of size " +
                                    std::to_string(cb.size()));
        return cb.codewords().col(w.index);
    }
}
