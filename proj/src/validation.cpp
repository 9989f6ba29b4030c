// SPDX-License-Identifier: Apache-2.0

#include "sacr/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "sacr/array_geometry.hpp"
#include "sacr/random.hpp"
#include "sacr/scene.hpp"
#include "sacr/sparse_basis.hpp"

namespace sacr
{
    ExhaustiveFit exhaustive_min_residual(const CVector &y, const CMatrix &dict, int sparsity)
    {
        const int d = static_cast<int>(dict.cols());
        if (sparsity < 1 || sparsity > d)
            throw DimensionError("exhaustive_min_residual: sparsity out of range");
        ExhaustiveFit best{std::numeric_limits<double>::infinity(), {}};
        std::vector<int> idx(static_cast<std::size_t>(sparsity));
        std::iota(idx.begin(), idx.end(), 0);
        while (true)
        {
            CMatrix sub(dict.rows(), sparsity);
            for (int i = 0; i < sparsity; ++i)
                sub.col(i) = dict.col(idx[static_cast<std::size_t>(i)]);
            // SVD route, independent of the solvers' QR/Cholesky paths
            const Eigen::JacobiSVD<CMatrix> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const double r = (y - sub * svd.solve(y)).norm();
            if (r < best.residual)
                best = {r, idx};

            int pos = sparsity - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == d - sparsity + pos)
                --pos;
            if (pos < 0)
                break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < sparsity; ++i)
                idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
        }
        return best;
    }

    namespace
    {
        double unitarity_error(const CMatrix &a)
        {
            return (a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff();
        }

        CheckResult timed(const std::string &name, const std::function<bool(std::string &)> &body)
        {
            CheckResult res;
            res.name = name;
            const auto t0 = std::chrono::steady_clock::now();
            try
            {
                res.passed = body(res.detail);
            }
            catch (const std::exception &e)
            {
                res.passed = false;
                res.detail = std::string("exception: ") + e.what();
            }
            res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return res;
        }

        bool check_steering(const TrialConfig &cfg, std::uint64_t seed, std::string &detail)
        {
            Rng rng(seed);
            const ArrayConfig &arr = cfg.array;
            const double n = arr.size();
            double norm_err = 0.0;
            double kron_err = 0.0;
            for (int i = 0; i < 1000; ++i)
            {
                const double th = deg2rad(rng.uniform(-90.0, 90.0));
                const double ph = deg2rad(rng.uniform(-180.0, 180.0));
                const CVector a = steering(th, ph, arr);
                norm_err = std::max(norm_err, std::abs(a.squaredNorm() - 1.0 / n));
                const CVector av = steering_v(th, arr);
                const CVector ah = steering_h(th, ph, arr);
                for (int p = 0; p < arr.n_v; ++p)
                    for (int q = 0; q < arr.n_h; ++q)
                        kron_err = std::max(kron_err, std::abs(a(p * arr.n_h + q) - av(p) * ah(q)));
            }
            detail = fmt::format("max | ||a||^2 - 1/N | = {:.3g}, kron mismatch {:.3g}", norm_err, kron_err);
            return norm_err < 1e-12 && kron_err < 1e-14;
        }

        bool check_unitarity(const TrialConfig &cfg, std::uint64_t seed, std::string &detail)
        {
            const double dft_err = unitarity_error(dft_basis(cfg.array));
            Rng rng(seed);
            double u_err = 0.0;
            for (int i = 0; i < 20; ++i)
            {
                const Scene scene = draw_scene(cfg.scene, cfg.array, rng);
                const auto dirs = scene.directions();
                const SensedBasis basis = build_sensed_basis(dirs, cfg.array, cfg.rank_tol);
                u_err = std::max(u_err, unitarity_error(basis.u));
            }
            detail = fmt::format("DFT {:.3g}, sensed U {:.3g}", dft_err, u_err);
            return dft_err < 1e-10 && u_err < 1e-10;
        }

        bool check_dichotomy(const TrialConfig &cfg, std::uint64_t seed, std::string &detail)
        {
            Rng rng(seed);
            int bad = 0;
            double synth_err = 0.0;
            for (int i = 0; i < 200; ++i)
            {
                const Scene scene = draw_scene(cfg.scene, cfg.array, rng);
                for (std::size_t m = 0; m < scene.scatterers.size(); ++m)
                {
                    const bool comm = static_cast<int>(m) < cfg.scene.m_comm;
                    const bool nonzero = std::abs(scene.scatterers[m].alpha) > 0.0;
                    if (comm != nonzero)
                        ++bad;
                }
                synth_err = std::max(synth_err,
                                     (scene.channel - synthesize_channel(scene.scatterers, cfg.array)).norm());
            }
            detail = fmt::format("{} misassigned coefficients in 200 scenes, channel mismatch {:.3g}", bad, synth_err);
            return bad == 0 && synth_err == 0.0;
        }

        bool check_exactness(const TrialConfig &base, std::uint64_t seed, std::string &detail)
        {
            TrialConfig cfg = base;
            cfg.sensing_mode = SensingMode::oracle;
            cfg.sigma_angle = 0.0;
            cfg.pilot_noise_power = 0.0;
            cfg.sensing_noise_power = 0.0;
            cfg.recovery.epsilon = 1e-8;
            const TrialRunner runner(cfg);
            int ok = 0;
            double worst = 0.0;
            for (std::uint64_t i = 0; i < 50; ++i)
            {
                const TrialResult r = runner.run(derive_seed(seed, {i}));
                const double ub = r.rate(Scheme::upper_bound);
                const double rel = std::abs(r.rate(Scheme::proposed_perfect) - ub) / ub;
                worst = std::max(worst, rel);
                if (rel <= 1e-6)
                    ++ok;
            }
            detail = fmt::format("{}/50 seeds within 1e-6, worst relative gap {:.3g}", ok, worst);
            return ok == 50;
        }

        bool check_solver_oracle(std::uint64_t seed, std::string &detail)
        {
            Rng rng(seed);
            int matches = 0;
            int samp_ok = 0;
            for (int t = 0; t < 100; ++t)
            {
                const CMatrix dict = rng.cscg_matrix(8, 16);
                const int s = 1 + t % 2;
                std::vector<int> cols(16);
                std::iota(cols.begin(), cols.end(), 0);
                for (int i = 0; i < s; ++i) // partial Fisher-Yates
                {
                    const int j = i + static_cast<int>(rng.uniform() * (16 - i));
                    std::swap(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
                }
                CVector y = CVector::Zero(8);
                for (int i = 0; i < s; ++i)
                    y += rng.cscg() * dict.col(cols[static_cast<std::size_t>(i)]);

                RecoveryParams p;
                p.epsilon = 1e-12;
                p.max_sparsity = s;
                const double best = exhaustive_min_residual(y, dict, s).residual;
                const double r_omp = omp(y, dict, p).residual_norm;
                if (std::abs(r_omp - best) <= 1e-9 * std::max(1.0, y.norm()))
                {
                    ++matches;
                    if (samp(y, dict, p).residual_norm <= r_omp + 1e-9)
                        ++samp_ok;
                }
            }
            detail = fmt::format("OMP matched exhaustive minimum in {}/100, SAMP no worse in {}/{}", matches, samp_ok,
                                 matches);
            return matches >= 95 && samp_ok == matches;
        }

        bool check_scale_invariance(std::uint64_t seed, std::string &detail)
        {
            Rng rng(seed);
            double worst = 0.0;
            for (int i = 0; i < 200; ++i)
            {
                const CVector h = rng.cscg_vector(64);
                const CVector est = rng.cscg_vector(64);
                const cplx c = rng.cscg() * std::exp(rng.normal() * 3.0);
                const double a = mrt_rate(est, h, 10.0, 1.0, 200, 16).rate;
                const double b = mrt_rate(c * est, h, 10.0, 1.0, 200, 16).rate;
                worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
            }
            detail = fmt::format("worst relative change {:.3g}", worst);
            return worst < 1e-12;
        }

        bool check_bound_dominance(const TrialConfig &base, std::uint64_t seed, std::string &detail)
        {
            const TrialRunner runner(base);
            int violations = 0;
            int negative = 0;
            double worst = -std::numeric_limits<double>::infinity();
            for (std::uint64_t i = 0; i < 50; ++i)
            {
                const TrialResult r = runner.run(derive_seed(seed, {i}));
                const double ub = r.rate(Scheme::upper_bound);
                for (std::size_t s = 0; s < 4; ++s)
                {
                    worst = std::max(worst, r.rates[s] - ub);
                    if (r.rates[s] > ub + 1e-9)
                        ++violations;
                    if (r.rates[s] < 0.0)
                        ++negative;
                }
            }
            detail = fmt::format("{} bound violations, {} negative rates over 50 trials, max excess {:.3g}",
                                 violations, negative, worst);
            return violations == 0 && negative == 0;
        }

        bool check_determinism(const TrialConfig &base, std::uint64_t seed, std::string &detail)
        {
            TrialConfig cfg = base;
            cfg.seed = seed;
            const std::vector<double> values{5.0, 15.0};
            auto render = [&](int workers)
            {
                std::ostringstream os;
                write_sweep_csv(run_sweep(cfg, SweepVariable::snr_db, values, 4, workers), os);
                return os.str();
            };
            const std::string a = render(1);
            const std::string b = render(1);
            const std::string c = render(3);
            detail = fmt::format("{} bytes, repeat {}, multi-worker {}", a.size(), a == b ? "identical" : "differs",
                                 a == c ? "identical" : "differs");
            return a == b && a == c;
        }
    }

    std::vector<CheckResult> run_validation(const TrialConfig &base, std::uint64_t seed)
    {
        base.validate();
        std::vector<CheckResult> out;
        out.push_back(timed("steering_norms", [&](std::string &d) { return check_steering(base, seed, d); }));
        out.push_back(timed("unitarity", [&](std::string &d) { return check_unitarity(base, seed, d); }));
        out.push_back(timed("comm_dichotomy", [&](std::string &d) { return check_dichotomy(base, seed, d); }));
        out.push_back(timed("exactness_pipeline", [&](std::string &d) { return check_exactness(base, seed, d); }));
        out.push_back(timed("solver_oracle", [&](std::string &d) { return check_solver_oracle(seed, d); }));
        out.push_back(timed("rate_scale_invariance", [&](std::string &d) { return check_scale_invariance(seed, d); }));
        out.push_back(
            timed("bound_dominance", [&](std::string &d) { return check_bound_dominance(base, seed, d); }));
        out.push_back(timed("determinism", [&](std::string &d) { return check_determinism(base, seed, d); }));
        return out;
    }

    void write_check_report(const std::vector<CheckResult> &checks, std::ostream &os)
    {
        for (const auto &c : checks)
            os << fmt::format("{} {:<24} {:7.2f}s  {}\n", c.passed ? "PASS" : "FAIL", c.name, c.seconds, c.detail);
    }
}
