// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "sacr/pilots_feedback.hpp"

using namespace sacr;

TEST_CASE("pilot rows carry the per-symbol power")
{
    Rng rng(3);
    const PilotMatrix x = draw_pilots(16, 64, 2.5e7, rng);
    REQUIRE(x.length() == 16);
    REQUIRE(x.antennas() == 64);
    CHECK(x.per_symbol_power == 2.5e7);
    for (Eigen::Index t = 0; t < 16; ++t)
        CHECK(x.entries.row(t).squaredNorm() == doctest::Approx(2.5e7).epsilon(1e-9));

    Rng one(1);
    const PilotMatrix s = draw_pilots(1, 1, 4.0, one);
    CHECK(std::abs(s.entries(0, 0)) == doctest::Approx(2.0));

    Rng r1(99), r2(99);
    CHECK(draw_pilots(4, 8, 1.0, r1).entries == draw_pilots(4, 8, 1.0, r2).entries);
}

TEST_CASE("received pilots")
{
    Rng rng(5);
    const PilotMatrix x = draw_pilots(16, 64, 1.0, rng);
    const CVector h = rng.cscg_vector(64);
    CHECK((receive_pilots(x, h, 0.0, rng) - x.entries * h).norm() == 0.0);

    // linearity with the noise frozen
    Rng a(8), b(8);
    const CVector y1 = receive_pilots(x, h, 0.3, a);
    const CVector y2 = receive_pilots(x, 2.0 * h, 0.3, b);
    CHECK(((y2 - y1) - x.entries * h).norm() < 1e-12);

    // noise power
    double acc = 0.0;
    const CVector zero = CVector::Zero(64);
    for (int i = 0; i < 1000; ++i)
        acc += receive_pilots(x, zero, 0.7, rng).squaredNorm() / 16.0;
    CHECK(acc / 1000.0 == doctest::Approx(0.7).epsilon(0.1));

    CHECK_THROWS_AS(receive_pilots(x, CVector::Zero(10), 1.0, rng), DimensionError);
}

TEST_CASE("codebook construction")
{
    const RvqCodebook cb = rvq_build(16, 12, 77);
    CHECK(cb.codewords().rows() == 16);
    CHECK(cb.codewords().cols() == 4096);
    CHECK(cb.size() == 4096);
    for (Eigen::Index b = 0; b < cb.codewords().cols(); ++b)
        REQUIRE(std::abs(cb.codewords().col(b).norm() - 1.0) < 1e-12);

    const RvqCodebook tiny = rvq_build(3, 1, 1);
    CHECK(tiny.size() == 2);

    // both ends of the link build the same codebook
    CHECK(rvq_build(8, 6, 5).codewords() == rvq_build(8, 6, 5).codewords());
    CHECK(rvq_build(8, 6, 5).codewords() != rvq_build(8, 6, 6).codewords());
}

TEST_CASE("codebook capacity cap")
{
    CHECK_THROWS_AS(rvq_build(16, 25, 1), CapacityError);
    CHECK_THROWS_AS(rvq_build(16, 13, 1, 12), CapacityError);
    CHECK_NOTHROW(rvq_build(2, 12, 1, 12));
    CHECK_THROWS(rvq_build(16, 0, 1));
}

TEST_CASE("quantizer picks the best aligned codeword")
{
    Rng rng(21);
    for (int bits : {1, 3, 8})
    {
        const RvqCodebook cb = rvq_build(6, bits, 1000 + static_cast<std::uint64_t>(bits));
        for (int i = 0; i < 200; ++i)
        {
            const CVector y = rng.cscg_vector(6);
            const FeedbackWord w = rvq_quantize(y, cb);
            REQUIRE(static_cast<int>(w.index) == oracle::best_codeword(y, cb.codewords()));
            // optimality against every codeword
            const double best = std::abs(y.normalized().dot(cb.codewords().col(w.index)));
            for (Eigen::Index b = 0; b < cb.codewords().cols(); ++b)
                REQUIRE(best >= std::abs(y.normalized().dot(cb.codewords().col(b))) - 1e-15);
            // complex scaling does not change the index
            CHECK(rvq_quantize(cplx(-3.0, 0.5) * y, cb).index == w.index);
        }
    }
}

TEST_CASE("exact codeword and round trip")
{
    Rng rng(4);
    const RvqCodebook cb = rvq_build(16, 10, 3);
    const CVector c = cb.codewords().col(517);
    CHECK(rvq_quantize(c, cb).index == 517);
    CHECK(rvq_quantize(cplx(0, 7) * c, cb).index == 517);
    CHECK((rvq_lookup(rvq_quantize(c, cb), cb) - c).norm() == 0.0);
    CHECK(rvq_lookup(FeedbackWord{12}, cb).norm() == doctest::Approx(1.0));
}

TEST_CASE("ties go to the lowest index")
{
    // columns 1 and 2 are the same direction up to phase; column 0 is orthogonal to y
    CMatrix c = CMatrix::Zero(2, 4);
    c(0, 0) = 1.0;
    c(1, 1) = 1.0;
    c(1, 2) = cplx(0.0, 1.0);
    c(0, 3) = c(1, 3) = 1.0 / std::sqrt(2.0);
    const RvqCodebook cb = RvqCodebook::from_codewords(c);
    CHECK(cb.bits() == 2);
    CVector y(2);
    y << 0.0, 5.0;
    CHECK(rvq_quantize(y, cb).index == 1);
}

TEST_CASE("explicit codebooks are checked")
{
    CHECK_THROWS(RvqCodebook::from_codewords(CMatrix::Identity(3, 3)));
    CHECK_THROWS(RvqCodebook::from_codewords(2.0 * CMatrix::Identity(2, 2)));
}

TEST_CASE("quantizer and lookup errors")
{
    const RvqCodebook cb = rvq_build(4, 3, 1);
    CHECK_THROWS(rvq_quantize(CVector::Zero(4), cb));
    CHECK_THROWS_AS(rvq_quantize(CVector::Ones(5), cb), DimensionError);
    CHECK_THROWS_AS(rvq_lookup(FeedbackWord{8}, cb), std::out_of_range);
}

TEST_CASE("perfect feedback is the identity")
{
    Rng rng(2);
    const CVector y = rng.cscg_vector(16);
    CHECK(perfect_feedback(y) == y);
    CHECK(perfect_feedback(CVector::Zero(3)).norm() == 0.0);
}
