// SPDX-License-Identifier: Apache-2.0

#include "sacr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sacr/config.hpp"
#include "sacr/validation.hpp"

namespace sacr
{
    namespace
    {
        struct Invocation
        {
            std::string config_path;
            std::vector<std::string> overrides;
            std::optional<std::uint64_t> seed;
            std::optional<int> workers;
            std::string out_path = "-";

            // sweep
            std::string variable;
            std::string values;
            std::optional<int> trials;

            // trial
            std::string scene_path;
            std::string spectrum_path;
        };

        LoadedConfig resolve(const Invocation &inv)
        {
            LoadedConfig cfg = inv.config_path.empty() ? load_config_text("", inv.overrides)
                                                       : load_config(inv.config_path, inv.overrides);
            if (inv.seed)
                cfg.trial.seed = *inv.seed;
            if (!inv.variable.empty())
            {
                const auto v = parse_variable(inv.variable);
                if (!v)
                    throw ConfigError(fmt::format("unknown sweep variable '{}'", inv.variable));
                cfg.sweep.variable = *v;
            }
            if (!inv.values.empty())
                cfg.sweep.values = parse_values(inv.values);
            if (inv.trials)
            {
                if (*inv.trials < 1)
                    throw ConfigError("--trials must be >= 1");
                cfg.sweep.trials = *inv.trials;
            }
            if (inv.workers)
                cfg.sweep.workers = *inv.workers;
            else if (const char *env = std::getenv(workers_env); env && *env)
            {
                try
                {
                    cfg.sweep.workers = std::stoi(env);
                }
                catch (const std::exception &)
                {
                    throw ConfigError(fmt::format("{}='{}' is not an integer", workers_env, env));
                }
            }
            if (cfg.sweep.workers < 1)
                throw ConfigError("workers must be >= 1");
            cfg.trial.validate();
            // every sweep point must form a valid configuration before any work starts
            for (double v : cfg.sweep.values)
                apply_sweep_value(cfg.trial, cfg.sweep.variable, v);
            return cfg;
        }

        std::ofstream open_output(const std::string &path)
        {
            std::ofstream os(path, std::ios::binary | std::ios::trunc);
            if (!os)
                throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
            return os;
        }

        void close_output(std::ofstream &os, const std::string &path)
        {
            os.close();
            if (!os)
                throw std::runtime_error(fmt::format("error writing '{}'", path));
        }

        int cmd_sweep(const Invocation &inv, std::ostream &out, std::ostream &err)
        {
            const LoadedConfig cfg = resolve(inv);
            const bool to_stdout = inv.out_path == "-";
            std::ofstream file;
            if (!to_stdout)
                file = open_output(inv.out_path); // fail before the sweep, not after
            const SweepResult res = run_sweep(cfg.trial, cfg.sweep.variable, cfg.sweep.values, cfg.sweep.trials,
                                              cfg.sweep.workers);
            if (to_stdout)
            {
                write_sweep_csv(res, out);
                write_sweep_table(res, err);
            }
            else
            {
                write_sweep_csv(res, file);
                close_output(file, inv.out_path);
                write_sweep_table(res, out);
            }
            return exit_ok;
        }

        int cmd_trial(const Invocation &inv, std::ostream &out, std::ostream &err)
        {
            const LoadedConfig cfg = resolve(inv);
            const TrialRunner runner(cfg.trial);
            TrialArtifacts art;
            const TrialResult r = runner.run(cfg.trial.seed, &art);

            out << fmt::format("seed {}  P = {:.6g}  sigma_s^2 = {:.6g}\n", cfg.trial.seed, r.power,
                               r.sensing_noise_power);
            out << fmt::format("angle rmse {:.4f} deg{}  basis rank {}  projection residual {:.3g}  feedback index {}\n",
                               r.angle_rmse_deg, r.angles_padded ? " (padded)" : "", r.basis_rank, r.basis_residual,
                               r.feedback_index);
            for (auto s : all_schemes)
            {
                out << fmt::format("{:<18} {:9.5f}", scheme_name(s), r.rate(s));
                if (s != Scheme::upper_bound)
                {
                    const auto &d = r.recoveries[static_cast<std::size_t>(s)];
                    out << fmt::format("  sparsity {:3}  rel.residual {:.3g}{}{}", d.sparsity, d.relative_residual,
                                       d.degenerate ? "  degenerate" : "", d.failed ? "  FAILED" : "");
                }
                out << '\n';
            }

            if (!inv.scene_path.empty())
            {
                std::ofstream os = open_output(inv.scene_path);
                os << scene_record(art.scene) << '\n';
                close_output(os, inv.scene_path);
            }
            if (!inv.spectrum_path.empty())
            {
                if (!art.spectrum)
                {
                    err << "no MUSIC spectrum in oracle sensing mode; --spectrum-csv ignored\n";
                }
                else
                {
                    std::ofstream os = open_output(inv.spectrum_path);
                    write_spectrum_csv(*art.spectrum, os);
                    close_output(os, inv.spectrum_path);
                }
            }
            return exit_ok;
        }

        int cmd_validate(const Invocation &inv, std::ostream &out)
        {
            const LoadedConfig cfg = resolve(inv);
            const auto checks = run_validation(cfg.trial, cfg.trial.seed);
            write_check_report(checks, out);
            const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.passed; });
            out << (ok ? "all checks passed\n" : "validation FAILED\n");
            return ok ? exit_ok : exit_validation_failed;
        }
    }

    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        Invocation inv;
        CLI::App app{"Sensing-assisted sparse channel recovery simulator", "sacr"};
        app.require_subcommand(1);

        auto common = [&](CLI::App *sub)
        {
            sub->add_option("-c,--config", inv.config_path, "YAML configuration file")->check(CLI::ExistingFile);
            sub->add_option("-s,--set", inv.overrides, "Override a config key, e.g. scene.m_total=8")
                ->allow_extra_args(false);
            sub->add_option("--seed", inv.seed, "Base seed");
            sub->add_option("-w,--workers", inv.workers,
                            fmt::format("Worker threads (default: ${} or the config)", workers_env));
        };

        CLI::App *sweep = app.add_subcommand("sweep", "Run a parameter sweep and write the rate CSV");
        common(sweep);
        sweep->add_option("--var", inv.variable, "snr_db | feedback_bits | pilot_len | block_len");
        sweep->add_option("--values", inv.values, "start:stop:step or a comma-separated list");
        sweep->add_option("-n,--trials", inv.trials, "Trials per sweep point");
        sweep->add_option("-o,--out", inv.out_path, "CSV output path ('-' for stdout)");

        CLI::App *trial = app.add_subcommand("trial", "Run one trial and print its diagnostics");
        common(trial);
        trial->add_option("--dump-scene", inv.scene_path, "Write the scene as JSON");
        trial->add_option("--spectrum-csv", inv.spectrum_path, "Write the MUSIC spectrum as CSV");

        CLI::App *validate = app.add_subcommand("validate", "Run the built-in invariant checks");
        common(validate);

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_config_error;
        }

        try
        {
            if (sweep->parsed())
                return cmd_sweep(inv, out, err);
            if (trial->parsed())
                return cmd_trial(inv, out, err);
            return cmd_validate(inv, out);
        }
        catch (const ConfigError &e)
        {
            err << "config error: " << e.what() << '\n';
            return exit_config_error;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_runtime_error;
        }
    }
}
