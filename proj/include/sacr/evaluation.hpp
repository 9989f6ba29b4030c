// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sacr/cs_recovery.hpp"
#include "sacr/scene.hpp"
#include "sacr/sensing.hpp"

namespace sacr
{
    enum class SensingMode
    {
        music,
        oracle
    };

    // One coherence block: scene, pilots, sensing, feedback and the five rate figures
    struct TrialConfig
    {
        ArrayConfig array;
        SceneConfig scene;
        int block_len = 200;    // T
        int pilot_len = 16;     // K
        int feedback_bits = 12; // B
        double snr_db = 15.0;   // 10 log10(P ||h||^2 / sigma^2)

        double noise_power = 1.0;       // sigma^2 in the rate expression
        double pilot_noise_power = 1.0; // sigma_c^2 at the user
        // sigma_s^2 at the BS; unset means "calibrated from sensing_snr_db"
        std::optional<double> sensing_noise_power;
        double sensing_snr_db = 10.0; // per-antenna echo SNR of a unit-RCS scatterer at 100 m

        SensingMode sensing_mode = SensingMode::music;
        double sigma_angle = 0.0; // rad, oracle mode only
        AngleGrid grid;

        RecoveryParams recovery;
        double rank_tol = default_rank_tol;
        DictionaryMode dictionary = DictionaryMode::restricted;

        bool upper_bound_includes_overhead = true;
        std::uint64_t seed = 1;
        std::uint64_t codebook_seed = 20240101;
        int codebook_max_bits = RvqCodebook::default_max_bits;

        void validate() const;
    };

    enum class Scheme
    {
        proposed_finite,
        proposed_perfect,
        benchmark_finite,
        benchmark_perfect,
        upper_bound
    };
    inline constexpr std::array<Scheme, 5> all_schemes{Scheme::proposed_finite, Scheme::proposed_perfect,
                                                      Scheme::benchmark_finite, Scheme::benchmark_perfect,
                                                      Scheme::upper_bound};
    std::string_view scheme_name(Scheme s);

    // Per-recovery diagnostics, indexed like the first four schemes
    struct RecoveryDiagnostics
    {
        int sparsity = 0;
        double relative_residual = 0.0;
        bool converged = false;
        bool degenerate = false;
        bool failed = false;
    };

    struct TrialResult
    {
        std::array<double, 5> rates{};
        std::array<RecoveryDiagnostics, 4> recoveries{};
        double angle_rmse_deg = 0.0;
        double basis_residual = 0.0; // projection residual of h on the sensed subspace
        int basis_rank = 0;
        bool angles_padded = false;
        std::uint32_t feedback_index = 0;
        double power = 0.0;
        double sensing_noise_power = 0.0;

        double rate(Scheme s) const { return rates[static_cast<std::size_t>(s)]; }
    };

    struct RateOutcome
    {
        double rate = 0.0;
        bool degenerate = false;
    };

    // ((T-K)/T) log2(1 + (P/sigma^2) |h_est^H h|^2 / ||h_est||^2). A zero estimate gives rate 0, flagged.
    RateOutcome mrt_rate(const CVector &h_est, const CVector &h_true, double p, double sigma2, int t, int k);

    // P = 10^(snr_db/10) sigma^2 / ||h||^2
    double calibrate_power(double snr_db, const CVector &h, double sigma2);

    // Echo noise power giving `snr_db` per antenna for a unit-RCS scatterer at `ref_dist` metres
    double sensing_noise_for_snr(double snr_db, double power, double rho0, const ArrayConfig &array,
                                 double ref_dist = 100.0);

    // Intermediate products of a trial, for debugging dumps
    struct TrialArtifacts
    {
        Scene scene;
        AngleEstimate angles;
        std::optional<MusicSpectrum> spectrum; // MUSIC mode only
    };

    // Holds the per-configuration resources (codebook, DFT basis, MUSIC grid) so repeated
    // trials only pay for the per-realization work. Immutable; run() is reentrant.
    class TrialRunner
    {
    public:
        explicit TrialRunner(TrialConfig cfg);
        TrialRunner(TrialConfig cfg, std::shared_ptr<const RvqCodebook> codebook);

        TrialResult run(std::uint64_t seed, TrialArtifacts *artifacts = nullptr) const;
        TrialResult run() const { return run(cfg_.seed); }

        const TrialConfig &config() const { return cfg_; }
        const RvqCodebook &codebook() const { return *codebook_; }

    private:
        TrialConfig cfg_;
        std::shared_ptr<const RvqCodebook> codebook_;
        CMatrix dft_;
        std::shared_ptr<const MusicScanner> scanner_;
    };

    TrialResult run_trial(const TrialConfig &cfg);

    enum class SweepVariable
    {
        snr_db,
        feedback_bits,
        pilot_len,
        block_len
    };
    std::string_view variable_name(SweepVariable v);
    std::optional<SweepVariable> parse_variable(std::string_view name);

    // Copy of `base` with the sweep variable set to `value`; throws ConfigError if invalid
    TrialConfig apply_sweep_value(const TrialConfig &base, SweepVariable variable, double value);

    struct SchemeStats
    {
        double mean = 0.0;
        double std_error = 0.0;
    };

    struct SweepPoint
    {
        double value = 0.0;
        std::array<SchemeStats, 5> stats{};
        int trials = 0;   // successful trials entering the statistics
        int failures = 0; // trials aborted by an exception
        std::vector<TrialResult> results; // in trial-index order

        const SchemeStats &stat(Scheme s) const { return stats[static_cast<std::size_t>(s)]; }
    };

    struct SweepResult
    {
        SweepVariable variable = SweepVariable::snr_db;
        std::uint64_t seed = 0;
        std::vector<SweepPoint> points;
    };

    SchemeStats summarize(std::span<const double> samples);

    // Trial i at every sweep value uses the substream derive_seed(base.seed, {i}), so the
    // sweep points are evaluated on common scene/noise realizations.
    SweepResult run_sweep(const TrialConfig &base, SweepVariable variable, std::span<const double> values, int trials,
                          int workers = 1);

    // variable,value,scheme,mean_rate,stderr_rate,trials,seed
    void write_sweep_csv(const SweepResult &result, std::ostream &os);
    void write_sweep_table(const SweepResult &result, std::ostream &os);
}
