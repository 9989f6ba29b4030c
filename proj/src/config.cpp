// SPDX-License-Identifier: Apache-2.0

#include "sacr/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace sacr
{
    namespace
    {
        using Setter = std::function<void(const YAML::Node &, LoadedConfig &)>;

        template <typename T>
        T as(const YAML::Node &n)
        {
            return n.as<T>();
        }

        Interval as_interval(const YAML::Node &n)
        {
            if (!n.IsSequence() || n.size() != 2)
                throw YAML::BadConversion(n.Mark());
            return {n[0].as<double>(), n[1].as<double>()};
        }

        bool is_auto(const YAML::Node &n)
        {
            return n.IsNull() || (n.IsScalar() && n.Scalar() == "auto");
        }

        const std::map<std::string, Setter> &setters()
        {
            static const std::map<std::string, Setter> table = {
                {"seed", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.seed = as<std::uint64_t>(n); }},
                {"block_len", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.block_len = as<int>(n); }},
                {"pilot_len", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.pilot_len = as<int>(n); }},
                {"feedback_bits", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.feedback_bits = as<int>(n); }},
                {"snr_db", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.snr_db = as<double>(n); }},
                {"noise_power", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.noise_power = as<double>(n); }},
                {"pilot_noise_power", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.pilot_noise_power = as<double>(n); }},
                {"sensing_noise_power", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     if (is_auto(n))
                         c.trial.sensing_noise_power.reset();
                     else
                         c.trial.sensing_noise_power = as<double>(n);
                 }},
                {"sensing_snr_db", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.sensing_snr_db = as<double>(n); }},
                {"upper_bound_includes_overhead", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.upper_bound_includes_overhead = as<bool>(n); }},
                {"codebook_seed", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.codebook_seed = as<std::uint64_t>(n); }},
                {"codebook_max_bits", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.codebook_max_bits = as<int>(n); }},

                {"array.n_v", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.array.n_v = as<int>(n); }},
                {"array.n_h", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.array.n_h = as<int>(n); }},
                {"array.spacing_v", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.array.spacing_v = as<double>(n); }},
                {"array.spacing_h", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.array.spacing_h = as<double>(n); }},

                {"scene.m_total", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.m_total = as<int>(n); }},
                {"scene.m_comm", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.m_comm = as<int>(n); }},
                {"scene.theta_range_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.theta_range_deg = as_interval(n); }},
                {"scene.phi_range_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.phi_range_deg = as_interval(n); }},
                {"scene.dist_range_m", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.dist_range_m = as_interval(n); }},
                {"scene.rho0_db", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.rho0_db = as<double>(n); }},
                {"scene.bs_position_m", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     if (!n.IsSequence() || n.size() != 3)
                         throw YAML::BadConversion(n.Mark());
                     c.trial.scene.bs_position = Vec3(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
                 }},
                {"scene.cu_index", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.scene.cu_index = as<int>(n); }},

                {"sensing.mode", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     const auto s = as<std::string>(n);
                     if (s == "music")
                         c.trial.sensing_mode = SensingMode::music;
                     else if (s == "oracle")
                         c.trial.sensing_mode = SensingMode::oracle;
                     else
                         throw YAML::BadConversion(n.Mark());
                 }},
                {"sensing.sigma_angle_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.sigma_angle = deg2rad(as<double>(n)); }},
                {"sensing.grid.theta_range_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.grid.theta_deg = as_interval(n); }},
                {"sensing.grid.theta_step_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.grid.theta_step_deg = as<double>(n); }},
                {"sensing.grid.phi_range_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.grid.phi_deg = as_interval(n); }},
                {"sensing.grid.phi_step_deg", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.grid.phi_step_deg = as<double>(n); }},

                {"recovery.epsilon", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.recovery.epsilon = as<double>(n); }},
                {"recovery.step_size", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.recovery.step_size = as<int>(n); }},
                {"recovery.max_sparsity", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     if (is_auto(n))
                         c.trial.recovery.max_sparsity.reset();
                     else
                         c.trial.recovery.max_sparsity = as<int>(n);
                 }},
                {"recovery.max_iter", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.recovery.max_iter = as<int>(n); }},
                {"recovery.rank_tol", [](const YAML::Node &n, LoadedConfig &c)
                 { c.trial.rank_tol = as<double>(n); }},
                {"recovery.dictionary", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     const auto s = as<std::string>(n);
                     if (s == "restricted")
                         c.trial.dictionary = DictionaryMode::restricted;
                     else if (s == "full")
                         c.trial.dictionary = DictionaryMode::full;
                     else
                         throw YAML::BadConversion(n.Mark());
                 }},

                {"sweep.variable", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     auto v = parse_variable(as<std::string>(n));
                     if (!v)
                         throw YAML::BadConversion(n.Mark());
                     c.sweep.variable = *v;
                 }},
                {"sweep.values", [](const YAML::Node &n, LoadedConfig &c)
                 {
                     if (n.IsSequence())
                     {
                         c.sweep.values.clear();
                         for (const auto &e : n)
                             c.sweep.values.push_back(e.template as<double>());
                     }
                     else
                         c.sweep.values = parse_values(as<std::string>(n));
                 }},
                {"sweep.trials", [](const YAML::Node &n, LoadedConfig &c)
                 { c.sweep.trials = as<int>(n); }},
                {"sweep.workers", [](const YAML::Node &n, LoadedConfig &c)
                 { c.sweep.workers = as<int>(n); }},
            };
            return table;
        }

        bool is_section(const std::string &key)
        {
            const std::string prefix = key + ".";
            for (const auto &[name, _] : setters())
                if (name.rfind(prefix, 0) == 0)
                    return true;
            return false;
        }

        std::string where(const YAML::Mark &mark)
        {
            return mark.line >= 0 ? fmt::format(" (line {})", mark.line + 1) : std::string{};
        }

        void apply(const std::string &key, const YAML::Node &value, LoadedConfig &cfg)
        {
            const auto &table = setters();
            const auto it = table.find(key);
            if (it == table.end())
                throw ConfigError(fmt::format("unknown config key '{}'{}", key, where(value.Mark())));
            try
            {
                it->second(value, cfg);
            }
            catch (const YAML::Exception &e)
            {
                throw ConfigError(fmt::format("invalid value for '{}'{}", key, where(e.mark.line >= 0 ? e.mark : value.Mark())));
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(fmt::format("invalid value for '{}'{}: {}", key, where(value.Mark()), e.what()));
            }
        }

        void walk(const YAML::Node &node, const std::string &prefix, LoadedConfig &cfg)
        {
            if (!node.IsMap())
                throw ConfigError(fmt::format("expected a mapping{}{}", prefix.empty() ? "" : " under '" + prefix + "'",
                                              where(node.Mark())));
            for (const auto &entry : node)
            {
                const auto name = entry.first.as<std::string>();
                const std::string key = prefix.empty() ? name : prefix + "." + name;
                if (entry.second.IsMap() && is_section(key))
                    walk(entry.second, key, cfg);
                else
                    apply(key, entry.second, cfg);
            }
        }

        LoadedConfig build(const YAML::Node &root, const std::vector<std::string> &overrides)
        {
            LoadedConfig cfg;
            if (root && !root.IsNull())
                walk(root, "", cfg);

            for (const auto &ov : overrides)
            {
                const auto eq = ov.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("override '" + ov + "' is not of the form key=value");
                const std::string key = ov.substr(0, eq);
                YAML::Node value;
                try
                {
                    value = YAML::Load(ov.substr(eq + 1));
                }
                catch (const YAML::ParserException &e)
                {
                    throw ConfigError("cannot parse override '" + ov + "': " + e.msg);
                }
                if (!setters().contains(key))
                    throw ConfigError("unknown config key '" + key + "' in override");
                apply(key, value, cfg);
            }

            cfg.trial.validate();
            if (cfg.sweep.trials < 1)
                throw ConfigError("sweep.trials must be >= 1");
            if (cfg.sweep.workers < 1)
                throw ConfigError("sweep.workers must be >= 1");
            if (cfg.sweep.values.empty())
                throw ConfigError("sweep.values must not be empty");
            return cfg;
        }
    }

    LoadedConfig load_config_text(const std::string &text, const std::vector<std::string> &overrides)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::ParserException &e)
        {
            throw ConfigError(fmt::format("config parse error at line {}: {}", e.mark.line + 1, e.msg));
        }
        return build(root, overrides);
    }

    LoadedConfig load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path.string() + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        try
        {
            return load_config_text(buf.str(), overrides);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }

    std::vector<double> parse_values(const std::string &spec)
    {
        auto number = [&](const std::string &s)
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(s, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != s.size() || !std::isfinite(v))
                throw ConfigError("cannot parse value '" + s + "' in '" + spec + "'");
            return v;
        };

        std::vector<double> out;
        if (spec.find(':') != std::string::npos)
        {
            std::vector<std::string> parts;
            std::stringstream ss(spec);
            for (std::string p; std::getline(ss, p, ':');)
                parts.push_back(p);
            if (parts.size() != 3)
                throw ConfigError("range '" + spec + "' must be start:stop:step");
            const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
            if (!(step > 0.0) || stop < start)
                throw ConfigError("range '" + spec + "' needs step > 0 and stop >= start");
            const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
            if (count > 1'000'000)
                throw ConfigError("range '" + spec + "' has too many points");
            for (long i = 0; i < count; ++i)
                out.push_back(start + static_cast<double>(i) * step);
        }
        else
        {
            std::stringstream ss(spec);
            for (std::string p; std::getline(ss, p, ',');)
                out.push_back(number(p));
        }
        if (out.empty())
            throw ConfigError("empty value list '" + spec + "'");
        return out;
    }

    std::vector<std::string> known_config_keys()
    {
        std::vector<std::string> keys;
        for (const auto &[name, _] : setters())
            keys.push_back(name);
        return keys;
    }
}
