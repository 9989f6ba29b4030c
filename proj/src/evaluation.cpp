// SPDX-License-Identifier: Apache-2.0

#include "sacr/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace sacr
{
    void TrialConfig::validate() const
    {
        array.validate();
        scene.validate();
        grid.validate();
        recovery.validate();
        if (block_len < 2)
            throw ConfigError("block_len must be >= 2");
        if (pilot_len < 1 || pilot_len >= block_len)
            throw ConfigError("pilot_len must satisfy 1 <= pilot_len < block_len (got pilot_len=" +
                              std::to_string(pilot_len) + ", block_len=" + std::to_string(block_len) + ")");
        if (feedback_bits < 1)
            throw ConfigError("feedback_bits must be >= 1");
        if (feedback_bits > codebook_max_bits)
            throw ConfigError("feedback_bits exceeds codebook_max_bits");
        if (!std::isfinite(snr_db))
            throw ConfigError("snr_db must be finite");
        if (!(noise_power > 0.0))
            throw ConfigError("noise_power must be positive");
        if (!(pilot_noise_power >= 0.0))
            throw ConfigError("pilot_noise_power must be >= 0");
        if (sensing_noise_power && !(*sensing_noise_power >= 0.0))
            throw ConfigError("sensing_noise_power must be >= 0");
        if (!std::isfinite(sensing_snr_db))
            throw ConfigError("sensing_snr_db must be finite");
        if (!(sigma_angle >= 0.0))
            throw ConfigError("sensing.sigma_angle_deg must be >= 0");
        if (!(rank_tol >= 0.0) || !(rank_tol < 1.0))
            throw ConfigError("recovery.rank_tol must lie in [0, 1)");
        if (recovery.max_sparsity && *recovery.max_sparsity > pilot_len)
            throw ConfigError("recovery.max_sparsity must not exceed pilot_len");
        if (sensing_mode == SensingMode::music && scene.m_total >= array.size())
            throw ConfigError("scene.m_total must be below the antenna count for MUSIC");
    }

    std::string_view scheme_name(Scheme s)
    {
        switch (s)
        {
        case Scheme::proposed_finite:
            return "proposed_finite";
        case Scheme::proposed_perfect:
            return "proposed_perfect";
        case Scheme::benchmark_finite:
            return "benchmark_finite";
        case Scheme::benchmark_perfect:
            return "benchmark_perfect";
        case Scheme::upper_bound:
            return "upper_bound";
        }
        return "unknown";
    }

    RateOutcome mrt_rate(const CVector &h_est, const CVector &h_true, double p, double sigma2, int t, int k)
    {
        if (h_est.size() != h_true.size())
            throw DimensionError("mrt_rate: estimate and channel lengths differ");
        if (!(h_true.norm() > 0.0))
            throw std::invalid_argument("mrt_rate: zero true channel");
        if (!(sigma2 > 0.0) || p < 0.0)
            throw std::invalid_argument("mrt_rate: need sigma2 > 0 and p >= 0");
        if (t < 1 || k < 0 || k >= t)
            throw std::invalid_argument("mrt_rate: need 0 <= k < t");

        const double est_norm2 = h_est.squaredNorm();
        if (!(est_norm2 > 0.0))
            return {0.0, true};
        const double gain = std::norm(h_est.dot(h_true)) / est_norm2; // dot() conjugates h_est
        const double prefactor = static_cast<double>(t - k) / static_cast<double>(t);
        return {prefactor * std::log2(1.0 + p / sigma2 * gain), false};
    }

    double calibrate_power(double snr_db, const CVector &h, double sigma2)
    {
        const double norm2 = h.squaredNorm();
        if (!(norm2 > 0.0))
            throw std::invalid_argument("calibrate_power: zero channel");
        return db2lin(snr_db) * sigma2 / norm2;
    }

    double sensing_noise_for_snr(double snr_db, double power, double rho0, const ArrayConfig &array, double ref_dist)
    {
        // per-antenna echo power: |beta|^2 |a_n|^2 E|a^T x|^2 = rho0 d^-4 (1/N^2) (P/N^2)
        const double n = static_cast<double>(array.size());
        const double d2 = ref_dist * ref_dist;
        const double echo = rho0 / (d2 * d2) * power / (n * n * n * n);
        return echo / db2lin(snr_db);
    }

    namespace
    {
        // Greedy nearest-pair matching of estimated to true directions, RMSE over both angles in degrees
        double matched_rmse_deg(const std::vector<AnglePair> &est, const std::vector<AnglePair> &truth)
        {
            const std::size_t count = std::min(est.size(), truth.size());
            if (count == 0)
                return 0.0;
            std::vector<char> used(est.size(), 0);
            double sum = 0.0;
            for (std::size_t t = 0; t < count; ++t)
            {
                double best = std::numeric_limits<double>::infinity();
                std::size_t pick = 0;
                for (std::size_t e = 0; e < est.size(); ++e)
                {
                    if (used[e])
                        continue;
                    const double dt = rad2deg(est[e].theta - truth[t].theta);
                    const double dp = rad2deg(est[e].phi - truth[t].phi);
                    const double dist = dt * dt + dp * dp;
                    if (dist < best)
                    {
                        best = dist;
                        pick = e;
                    }
                }
                used[pick] = 1;
                sum += best;
            }
            return std::sqrt(sum / (2.0 * static_cast<double>(count)));
        }
    }

    TrialRunner::TrialRunner(TrialConfig cfg)
        : TrialRunner(cfg, std::make_shared<const RvqCodebook>(
                               rvq_build(cfg.pilot_len, cfg.feedback_bits, cfg.codebook_seed, cfg.codebook_max_bits)))
    {
    }

    TrialRunner::TrialRunner(TrialConfig cfg, std::shared_ptr<const RvqCodebook> codebook)
        : cfg_(std::move(cfg)), codebook_(std::move(codebook))
    {
        cfg_.validate();
        if (!codebook_ || codebook_->dimension() != cfg_.pilot_len || codebook_->bits() != cfg_.feedback_bits)
            throw ConfigError("codebook does not match pilot_len/feedback_bits");
        dft_ = dft_basis(cfg_.array);
        if (cfg_.sensing_mode == SensingMode::music)
            scanner_ = std::make_shared<const MusicScanner>(cfg_.array, cfg_.grid);
    }

    TrialResult TrialRunner::run(std::uint64_t seed, TrialArtifacts *artifacts) const
    {
        const TrialConfig &cfg = cfg_;
        const int t_len = cfg.block_len;
        const int k_len = cfg.pilot_len;
        Rng rng(seed);
        TrialResult res;

        const Scene scene = draw_scene(cfg.scene, cfg.array, rng);
        const CVector &h = scene.channel;
        const double power = calibrate_power(cfg.snr_db, h, cfg.noise_power);
        res.power = power;
        const PilotMatrix pilots = draw_pilots(k_len, cfg.array.size(), power, rng);

        // (a) sensing
        AngleEstimate angles;
        if (cfg.sensing_mode == SensingMode::music)
        {
            const double sigma_s2 = cfg.sensing_noise_power.value_or(
                sensing_noise_for_snr(cfg.sensing_snr_db, power, cfg.scene.rho0(), cfg.array));
            res.sensing_noise_power = sigma_s2;
            const EchoBlock echo = simulate_echo(scene, cfg.array, pilots, sigma_s2, rng);
            if (artifacts)
            {
                artifacts->spectrum = scanner_->spectrum(sample_covariance(echo), cfg.scene.m_total);
            }
            angles = scanner_->estimate(echo, cfg.scene.m_total);
        }
        else
        {
            angles = oracle_angles(scene, cfg.sigma_angle, rng);
        }
        res.angles_padded = angles.padded;
        if (artifacts)
        {
            artifacts->scene = scene;
            artifacts->angles = angles;
        }
        res.angle_rmse_deg = matched_rmse_deg(angles.pairs, scene.directions());
        const SensedBasis basis = build_sensed_basis(angles.pairs, cfg.array, cfg.rank_tol);
        res.basis_rank = basis.rank;
        res.basis_residual = projection_residual(h, basis);

        // (b) user side
        const CVector y = receive_pilots(pilots, h, cfg.pilot_noise_power, rng);
        CVector y_finite = CVector::Zero(y.size());
        if (y.norm() > 0.0)
        {
            const FeedbackWord word = rvq_quantize(y, *codebook_);
            res.feedback_index = word.index;
            y_finite = rvq_lookup(word, *codebook_);
        }
        const CVector y_perfect = perfect_feedback(y);

        // (c)-(d) recoveries and rates
        auto evaluate = [&](Scheme scheme, auto &&recover)
        {
            const auto i = static_cast<std::size_t>(scheme);
            auto &diag = res.recoveries[i];
            try
            {
                const ChannelEstimate est = recover();
                diag.sparsity = static_cast<int>(est.solution.support.size());
                diag.relative_residual = est.solution.relative_residual;
                diag.converged = est.solution.converged;
                diag.degenerate = est.degenerate;
                const RateOutcome r = mrt_rate(est.h, h, power, cfg.noise_power, t_len, k_len);
                diag.degenerate = diag.degenerate || r.degenerate;
                res.rates[i] = r.rate;
            }
            catch (const std::exception &)
            {
                diag.failed = true;
                res.rates[i] = 0.0;
            }
        };
        evaluate(Scheme::proposed_finite, [&]
                 { return recover_channel_sensed(y_finite, pilots, basis, cfg.recovery, cfg.dictionary); });
        evaluate(Scheme::proposed_perfect, [&]
                 { return recover_channel_sensed(y_perfect, pilots, basis, cfg.recovery, cfg.dictionary); });
        evaluate(Scheme::benchmark_finite, [&]
                 { return recover_channel_dft(y_finite, pilots, dft_, cfg.recovery); });
        evaluate(Scheme::benchmark_perfect, [&]
                 { return recover_channel_dft(y_perfect, pilots, dft_, cfg.recovery); });

        // (e) perfect-CSI bound
        const double prefactor = cfg.upper_bound_includes_overhead
                                     ? static_cast<double>(t_len - k_len) / static_cast<double>(t_len)
                                     : 1.0;
        res.rates[static_cast<std::size_t>(Scheme::upper_bound)] = prefactor * std::log2(1.0 + db2lin(cfg.snr_db));
        return res;
    }

    TrialResult run_trial(const TrialConfig &cfg)
    {
        return TrialRunner(cfg).run();
    }

    std::string_view variable_name(SweepVariable v)
    {
        switch (v)
        {
        case SweepVariable::snr_db:
            return "snr_db";
        case SweepVariable::feedback_bits:
            return "feedback_bits";
        case SweepVariable::pilot_len:
            return "pilot_len";
        case SweepVariable::block_len:
            return "block_len";
        }
        return "unknown";
    }

    std::optional<SweepVariable> parse_variable(std::string_view name)
    {
        for (auto v : {SweepVariable::snr_db, SweepVariable::feedback_bits, SweepVariable::pilot_len,
                       SweepVariable::block_len})
            if (variable_name(v) == name)
                return v;
        return std::nullopt;
    }

    TrialConfig apply_sweep_value(const TrialConfig &base, SweepVariable variable, double value)
    {
        TrialConfig cfg = base;
        auto as_int = [&](const char *name)
        {
            const double r = std::round(value);
            if (std::abs(r - value) > 1e-9 || std::abs(r) > 1e9)
                throw ConfigError(fmt::format("sweep value {} for {} is not an integer", value, name));
            return static_cast<int>(r);
        };
        switch (variable)
        {
        case SweepVariable::snr_db:
            cfg.snr_db = value;
            break;
        case SweepVariable::feedback_bits:
            cfg.feedback_bits = as_int("feedback_bits");
            break;
        case SweepVariable::pilot_len:
            cfg.pilot_len = as_int("pilot_len");
            break;
        case SweepVariable::block_len:
            cfg.block_len = as_int("block_len");
            break;
        }
        cfg.validate();
        return cfg;
    }

    SchemeStats summarize(std::span<const double> samples)
    {
        SchemeStats s;
        const auto n = samples.size();
        if (n == 0)
            return s;
        double sum = 0.0;
        for (double x : samples)
            sum += x;
        s.mean = sum / static_cast<double>(n);
        if (n > 1)
        {
            double ss = 0.0;
            for (double x : samples)
                ss += (x - s.mean) * (x - s.mean);
            s.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
        }
        return s;
    }

    SweepResult run_sweep(const TrialConfig &base, SweepVariable variable, std::span<const double> values, int trials,
                          int workers)
    {
        if (trials < 1)
            throw ConfigError("trials must be >= 1");
        workers = std::max(1, workers);

        SweepResult out;
        out.variable = variable;
        out.seed = base.seed;

        std::map<std::pair<int, int>, std::shared_ptr<const RvqCodebook>> codebooks;
        for (double value : values)
        {
            const TrialConfig cfg = apply_sweep_value(base, variable, value);
            auto &cb = codebooks[{cfg.pilot_len, cfg.feedback_bits}];
            if (!cb)
                cb = std::make_shared<const RvqCodebook>(
                    rvq_build(cfg.pilot_len, cfg.feedback_bits, cfg.codebook_seed, cfg.codebook_max_bits));
            const TrialRunner runner(cfg, cb);

            std::vector<std::optional<TrialResult>> slots(static_cast<std::size_t>(trials));
            std::atomic<int> next{0};
            auto work = [&]
            {
                for (int i = next++; i < trials; i = next++)
                {
                    try
                    {
                        slots[static_cast<std::size_t>(i)] = runner.run(derive_seed(base.seed, {static_cast<std::uint64_t>(i)}));
                    }
                    catch (const std::exception &)
                    {
                        slots[static_cast<std::size_t>(i)].reset();
                    }
                }
            };
            if (workers == 1)
                work();
            else
            {
                std::vector<std::jthread> pool;
                for (int w = 0; w < std::min(workers, trials); ++w)
                    pool.emplace_back(work);
            }

            SweepPoint point;
            point.value = value;
            for (auto &slot : slots)
            {
                if (slot)
                    point.results.push_back(std::move(*slot));
                else
                    ++point.failures;
            }
            point.trials = static_cast<int>(point.results.size());
            for (auto scheme : all_schemes)
            {
                std::vector<double> samples;
                samples.reserve(point.results.size());
                for (const auto &r : point.results)
                    samples.push_back(r.rate(scheme));
                point.stats[static_cast<std::size_t>(scheme)] = summarize(samples);
            }
            out.points.push_back(std::move(point));
        }
        return out;
    }

    void write_sweep_csv(const SweepResult &result, std::ostream &os)
    {
        os << "variable,value,scheme,mean_rate,stderr_rate,trials,seed\n";
        for (const auto &p : result.points)
            for (auto scheme : all_schemes)
            {
                const auto &s = p.stat(scheme);
                os << fmt::format("{},{},{},{:.12g},{:.12g},{},{}\n", variable_name(result.variable), p.value,
                                  scheme_name(scheme), s.mean, s.std_error, p.trials, result.seed);
            }
    }

    void write_sweep_table(const SweepResult &result, std::ostream &os)
    {
        os << fmt::format("{:>14}", variable_name(result.variable));
        for (auto scheme : all_schemes)
            os << fmt::format("  {:>18}", scheme_name(scheme));
        os << fmt::format("  {:>7}\n", "trials");
        for (const auto &p : result.points)
        {
            os << fmt::format("{:>14}", p.value);
            for (auto scheme : all_schemes)
            {
                const auto &s = p.stat(scheme);
                os << fmt::format("  {:>9.4f} +/- {:<5.3f}", s.mean, s.std_error);
            }
            os << fmt::format("  {:>7}", p.trials);
            if (p.failures > 0)
                os << fmt::format("  ({} failed)", p.failures);
            os << '\n';
        }
    }
}
