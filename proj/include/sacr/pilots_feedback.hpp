// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sacr/random.hpp"

namespace sacr
{
    // K x N pilot block; row t is the transmit vector of pilot symbol t
    struct PilotMatrix
    {
        CMatrix entries;
        double per_symbol_power = 0.0;

        Eigen::Index length() const { return entries.rows(); }
        Eigen::Index antennas() const { return entries.cols(); }
    };

    // I.i.d. CSCG entries, each row rescaled to squared norm `power`
    PilotMatrix draw_pilots(int k, int n, double power, Rng &rng);

    // y_p = X_p h + z, z ~ CN(0, noise_power I)
    CVector receive_pilots(const PilotMatrix &pilots, const CVector &h, double noise_power, Rng &rng);

    struct FeedbackWord
    {
        std::uint32_t index = 0;
    };

    // Random vector quantization codebook: 2^B unit-norm codewords in C^K, reproducible from a seed.
    // Immutable after construction; safe to share across threads.
    class RvqCodebook
    {
    public:
        static constexpr int default_max_bits = 24;

        static RvqCodebook build(int k, int bits, std::uint64_t seed, int max_bits = default_max_bits);
        // Explicit codewords (2^bits unit-norm columns), e.g. structured codebooks
        static RvqCodebook from_codewords(CMatrix codewords);

        const CMatrix &codewords() const { return codewords_; }
        int bits() const { return bits_; }
        int dimension() const { return static_cast<int>(codewords_.rows()); }
        std::size_t size() const { return static_cast<std::size_t>(codewords_.cols()); }
        std::uint64_t seed() const { return seed_; }

    private:
        RvqCodebook(CMatrix codewords, int bits, std::uint64_t seed)
            : codewords_(std::move(codewords)), bits_(bits), seed_(seed) {}

        CMatrix codewords_;
        int bits_ = 0;
        std::uint64_t seed_ = 0;
    };

    inline RvqCodebook rvq_build(int k, int bits, std::uint64_t seed, int max_bits = RvqCodebook::default_max_bits)
    {
        return RvqCodebook::build(k, bits, seed, max_bits);
    }

    // Index maximizing |(y/||y||)^H c_b|^2, lowest index on ties. Throws on a zero vector.
    FeedbackWord rvq_quantize(const CVector &y, const RvqCodebook &cb);

    // Codeword c_b for the fed-back index (unit norm)
    CVector rvq_lookup(FeedbackWord w, const RvqCodebook &cb);

    // Unquantized feedback: the BS receives y_p itself
    inline CVector perfect_feedback(const CVector &y) { return y; }
}
