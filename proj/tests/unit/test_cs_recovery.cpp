// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "sacr/cs_recovery.hpp"
#include "sacr/scene.hpp"
#include "sacr/sensing.hpp"

using namespace sacr;
using oracle::deg;

namespace
{
    RecoveryParams tight(std::optional<int> cap = std::nullopt)
    {
        RecoveryParams p;
        p.epsilon = 1e-9;
        p.max_sparsity = cap;
        return p;
    }

    std::vector<int> random_support(Rng &rng, int n, int s)
    {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < s; ++i)
            std::swap(all[static_cast<std::size_t>(i)],
                      all[static_cast<std::size_t>(i + static_cast<int>(rng.uniform() * (n - i)))]);
        all.resize(static_cast<std::size_t>(s));
        std::sort(all.begin(), all.end());
        return all;
    }

    CMatrix random_unitary(Rng &rng, int n)
    {
        return oracle::orthonormal_span(rng.cscg_matrix(n, n));
    }

    void check_solution_invariants(const SparseSolution &s, const CVector &y, const CMatrix &d, int cap)
    {
        CHECK(static_cast<int>(s.support.size()) <= cap);
        CHECK(std::is_sorted(s.support.begin(), s.support.end()));
        for (Eigen::Index i = 0; i < s.coefficients.size(); ++i)
            if (std::find(s.support.begin(), s.support.end(), static_cast<int>(i)) == s.support.end())
                REQUIRE(s.coefficients(i) == cplx(0.0, 0.0));
        CHECK(std::abs((y - d * s.coefficients).norm() - s.residual_norm) < 1e-9);
    }
}

TEST_CASE("one-atom signal")
{
    Rng rng(1);
    const CMatrix d = rng.cscg_matrix(10, 20);
    const CVector y = 3.0 * d.col(5);
    for (const SparseSolution &s : {omp(y, d, tight()), samp(y, d, tight())})
    {
        REQUIRE(s.support == std::vector<int>{5});
        CHECK(std::abs(s.coefficients(5) - 3.0) < 1e-12);
        CHECK(s.converged);
    }
    CHECK(samp(y, d, tight()).stages_used == 1);
}

TEST_CASE("orthonormal dictionary, two atoms")
{
    Rng rng(2);
    const CMatrix d = random_unitary(rng, 16);
    const CVector y = d.col(1) + d.col(2);
    const SparseSolution s = omp(y, d, tight());
    CHECK(s.support == std::vector<int>{1, 2});
    CHECK(std::abs(s.coefficients(1) - 1.0) < 1e-12);
    CHECK(s.relative_residual < 1e-12);
}

TEST_CASE("sampling adapts to an unknown sparsity level")
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const CMatrix d = random_unitary(rng, 16);
        const auto supp = random_support(rng, 16, 4);
        CVector x = CVector::Zero(16);
        for (int j : supp)
            x(j) = rng.cscg();
        const CVector y = d * x;
        const SparseSolution s = samp(y, d, tight());
        CHECK(s.support == supp);
        CHECK((s.coefficients - x).norm() < 1e-10 * x.norm());
        CHECK(s.stages_used <= 4);
        check_solution_invariants(s, y, d, 16);
    }
}

TEST_CASE("larger step size")
{
    Rng rng(4);
    const CMatrix d = random_unitary(rng, 16);
    const CVector y = d.col(0) - 2.0 * d.col(7) + d.col(9) + 0.5 * d.col(12);
    RecoveryParams p = tight();
    p.step_size = 2;
    const SparseSolution s = samp(y, d, p);
    CHECK(s.support == std::vector<int>{0, 7, 9, 12});
    CHECK(s.stages_used <= 2);
}

TEST_CASE("vacuous tolerance stops immediately")
{
    Rng rng(5);
    const CMatrix d = rng.cscg_matrix(8, 12);
    const CVector y = rng.cscg_vector(8);
    RecoveryParams p;
    p.epsilon = 1.0;
    for (const SparseSolution &s : {omp(y, d, p), samp(y, d, p)})
    {
        CHECK(s.support.size() <= 1);
        CHECK(s.residual_norm <= y.norm());
        CHECK(s.converged);
    }
}

TEST_CASE("Gaussian 16x64 dictionary, 3-sparse, noiseless")
{
    Rng rng(6);
    int exact_omp = 0, exact_samp = 0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const CMatrix d = rng.cscg_matrix(16, 64);
        const auto supp = random_support(rng, 64, 3);
        CVector y = CVector::Zero(16);
        for (int j : supp)
            y += rng.cscg() * d.col(j);
        const SparseSolution so = omp(y, d, tight());
        const SparseSolution ss = samp(y, d, tight());
        exact_omp += so.support == supp;
        exact_samp += ss.support == supp;
        check_solution_invariants(so, y, d, 16);
        check_solution_invariants(ss, y, d, 16);
    }
    CHECK(exact_omp >= 45);
    CHECK(exact_samp >= 45);
}

TEST_CASE("small instances agree with exhaustive search")
{
    Rng rng(7);
    int matched = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const CMatrix d = rng.cscg_matrix(8, 16);
        const int s = 1 + trial % 2;
        const auto supp = random_support(rng, 16, s);
        CVector y = CVector::Zero(8);
        for (int j : supp)
            y += rng.cscg() * d.col(j);
        const oracle::BestSupport best = oracle::best_support(y, d, s);
        RecoveryParams p;
        p.epsilon = 1e-12;
        p.max_sparsity = s;
        const SparseSolution so = omp(y, d, p);
        if (std::abs(so.residual_norm - best.residual) <= 1e-9)
        {
            ++matched;
            CHECK(samp(y, d, p).residual_norm <= so.residual_norm + 1e-9);
        }
    }
    CHECK(matched >= 95);
}

TEST_CASE("three-sparse supports on reduced instances")
{
    Rng rng(8);
    int oracle_hits = 0, samp_hits = 0;
    for (int trial = 0; trial < 40; ++trial)
    {
        const CMatrix d = rng.cscg_matrix(8, 16);
        const auto supp = random_support(rng, 16, 3);
        CVector y = CVector::Zero(8);
        for (int j : supp)
            y += rng.cscg() * d.col(j);
        oracle_hits += oracle::best_support(y, d, 3).support == supp;
        samp_hits += samp(y, d, tight()).support == supp;
    }
    // the exhaustive search always finds the planted support; SAMP with 8 measurements nearly always does
    CHECK(oracle_hits == 40);
    CHECK(samp_hits >= 34);
}

TEST_CASE("omp residual never increases")
{
    Rng rng(9);
    const CMatrix d = rng.cscg_matrix(16, 40);
    const CVector y = rng.cscg_vector(16);
    RecoveryParams p;
    p.epsilon = 0.0;
    const SparseSolution s = omp(y, d, p);
    REQUIRE(s.residual_history.size() >= 2);
    for (std::size_t i = 1; i < s.residual_history.size(); ++i)
        CHECK(s.residual_history[i] <= s.residual_history[i - 1] + 1e-12);
    CHECK(static_cast<int>(s.support.size()) <= 16);
}

TEST_CASE("scale equivariance")
{
    Rng rng(10);
    const CMatrix d = rng.cscg_matrix(12, 30);
    const CVector y = 2.0 * d.col(3) - d.col(17) + 0.01 * rng.cscg_vector(12);
    RecoveryParams p;
    p.epsilon = 0.05;
    const cplx c(-0.3, 4.0);
    const SparseSolution a = samp(y, d, p);
    const SparseSolution b = samp(c * y, d, p);
    CHECK(a.support == b.support);
    CHECK((b.coefficients - c * a.coefficients).norm() < 1e-10 * b.coefficients.norm());
}

TEST_CASE("repeated atoms are solved in the minimum-norm sense")
{
    Rng rng(11);
    CMatrix d = rng.cscg_matrix(6, 8);
    d.col(4) = d.col(2);
    const SupportFit fit = fit_support(d.col(2), d, {2, 4});
    CHECK(fit.rank_deficient);
    CHECK(std::abs(fit.x(0) - 0.5) < 1e-10);
    CHECK(std::abs(fit.x(1) - 0.5) < 1e-10);
    CHECK(fit.residual.norm() < 1e-12);
}

TEST_CASE("solver argument checks")
{
    Rng rng(12);
    CMatrix d = rng.cscg_matrix(4, 6);
    CHECK_THROWS_AS(omp(CVector::Ones(5), d, RecoveryParams{}), DimensionError);
    d.col(3).setZero();
    CHECK_THROWS(samp(CVector::Ones(4), d, RecoveryParams{}));
    RecoveryParams bad;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.step_size = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sensed recovery is exact with exact angles and clean feedback")
{
    const ArrayConfig arr;
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Scene scene = draw_scene(SceneConfig{}, arr, rng);
        const auto dirs = scene.directions();
        const SensedBasis basis = build_sensed_basis(dirs, arr);
        const PilotMatrix x = draw_pilots(16, 64, 1e7, rng);
        const CVector y = x.entries * scene.channel;
        RecoveryParams p;
        p.epsilon = 1e-8;
        for (auto mode : {DictionaryMode::restricted, DictionaryMode::full})
        {
            const ChannelEstimate est = recover_channel_sensed(y, x, basis, p, mode);
            CHECK((est.h - scene.channel).norm() < 1e-6 * scene.channel.norm());
            CHECK(static_cast<int>(est.solution.support.size()) <= basis.rank);
        }
        // scaled feedback: estimate scales along
        const ChannelEstimate scaled = recover_channel_sensed(cplx(0, 2) * y / y.norm(), x, basis, p);
        const ChannelEstimate plain = recover_channel_sensed(y, x, basis, p);
        CHECK((scaled.h * (y.norm() / 2.0) * cplx(0, -1) - plain.h).norm() < 1e-8 * plain.h.norm());
    }
}

TEST_CASE("rank-one basis gives an estimate along the sensed direction")
{
    const ArrayConfig arr;
    Rng rng(14);
    const std::vector<AnglePair> d{{deg(1), deg(25)}};
    const SensedBasis basis = build_sensed_basis(d, arr);
    const PilotMatrix x = draw_pilots(16, 64, 1.0, rng);
    const ChannelEstimate est = recover_channel_sensed(rng.cscg_vector(16), x, basis, RecoveryParams{});
    const CVector a = oracle::steering(deg(1), deg(25), 8, 8).normalized();
    CHECK(std::abs(std::abs(a.dot(est.h.normalized())) - 1.0) < 1e-12);
}

TEST_CASE("DFT recovery of an on-grid channel")
{
    // sin(theta) = -2 r / N_v and cos(theta) sin(phi) = -2 s / N_h put a(theta, phi) on DFT column r*N_h+s
    const ArrayConfig arr;
    const CMatrix dft = dft_basis(arr);
    Rng rng(15);
    CVector h = CVector::Zero(64);
    for (auto [r, s] : {std::pair{1, 2}, std::pair{0, 7}, std::pair{7, 5}})
    {
        const double st = -2.0 * (r > 4 ? r - 8 : r) / 8.0;
        const double theta = std::asin(st);
        const double phi = std::asin(-2.0 * (s > 4 ? s - 8 : s) / 8.0 / std::cos(theta));
        const CVector a = steering(theta, phi, arr);
        CHECK(std::abs(std::abs(a.normalized().dot(dft.col(r * 8 + s))) - 1.0) < 1e-12);
        h += rng.cscg() * a;
    }
    const PilotMatrix x = draw_pilots(16, 64, 1.0, rng);
    RecoveryParams p;
    p.epsilon = 1e-10;
    const ChannelEstimate est = recover_channel_dft(x.entries * h, x, dft, p);
    CHECK(est.solution.support.size() == 3);
    CHECK((est.h - h).norm() < 1e-6 * h.norm());
}

TEST_CASE("off-grid channel leaks across DFT columns")
{
    const ArrayConfig arr;
    Rng rng(16);
    int leaky = 0;
    for (int trial = 0; trial < 10; ++trial)
    {
        const Scene scene = draw_scene(SceneConfig{}, arr, rng);
        const PilotMatrix x = draw_pilots(16, 64, 1.0, rng);
        RecoveryParams p;
        p.epsilon = 1e-6;
        const ChannelEstimate est = recover_channel_dft(x.entries * scene.channel, x, dft_basis(arr), p);
        leaky += static_cast<int>(est.solution.support.size()) > 4;
    }
    CHECK(leaky == 10);
}

TEST_CASE("zero feedback gives a flagged zero estimate")
{
    const ArrayConfig arr;
    Rng rng(17);
    const PilotMatrix x = draw_pilots(16, 64, 1.0, rng);
    const std::vector<AnglePair> d{{0.0, 0.1}};
    const ChannelEstimate a = recover_channel_dft(CVector::Zero(16), x, dft_basis(arr), RecoveryParams{});
    const ChannelEstimate b = recover_channel_sensed(CVector::Zero(16), x, build_sensed_basis(d, arr), RecoveryParams{});
    CHECK(a.degenerate);
    CHECK(b.degenerate);
    CHECK(a.h.norm() == 0.0);
    CHECK(b.h.norm() == 0.0);
    CHECK_THROWS_AS(recover_channel_dft(CVector::Zero(15), x, dft_basis(arr), RecoveryParams{}), DimensionError);
}
