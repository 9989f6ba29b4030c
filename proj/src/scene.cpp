// SPDX-License-Identifier: Apache-2.0

#include "sacr/scene.hpp"

#include <cmath>

#include <json.hpp>

namespace sacr
{
    void SceneConfig::validate() const
    {
        if (m_total < 1)
            throw ConfigError("scene.m_total must be >= 1");
        if (m_comm < 1 || m_comm > m_total)
            throw ConfigError("scene.m_comm must satisfy 1 <= m_comm <= m_total");
        if (cu_index < 1 || cu_index > m_comm)
            throw ConfigError("scene.cu_index must lie in 1..m_comm");
        if (theta_range_deg.width() < 0.0 || theta_range_deg.lo <= -90.0 || theta_range_deg.hi >= 90.0)
            throw ConfigError("scene.theta_range_deg must be a nonempty interval inside (-90, 90)");
        if (phi_range_deg.width() < 0.0 || phi_range_deg.lo <= -90.0 || phi_range_deg.hi >= 90.0)
            throw ConfigError("scene.phi_range_deg must be a nonempty interval inside (-90, 90)");
        if (dist_range_m.width() < 0.0 || !(dist_range_m.lo > 0.0))
            throw ConfigError("scene.dist_range_m must be a nonempty interval of positive distances");
        if (!std::isfinite(rho0_db))
            throw ConfigError("scene.rho0_db must be finite");
    }

    std::vector<AnglePair> Scene::directions() const
    {
        std::vector<AnglePair> dirs;
        dirs.reserve(scatterers.size());
        for (const auto &s : scatterers)
            dirs.push_back(s.direction());
        return dirs;
    }

    Vec3 direction_vector(double theta, double phi)
    {
        return {std::cos(theta) * std::sin(phi), std::cos(theta) * std::cos(phi), -std::sin(theta)};
    }

    cplx sense_gain(double d, double rho0, double gamma, double phase)
    {
        const double d2 = d * d;
        return std::polar(std::sqrt(rho0 * gamma / (d2 * d2)), phase);
    }

    cplx sense_gain(double d, double rho0, Rng &rng)
    {
        const double gamma = std::abs(rng.normal());
        const double phase = rng.phase();
        return sense_gain(d, rho0, gamma, phase);
    }

    cplx comm_gain(double d, double r, double rho0, double delta, double phase)
    {
        return std::polar(std::sqrt(rho0 * delta / (d * d * r * r)), phase);
    }

    cplx comm_gain(int m, std::span<const Scatterer> scatterers, int cu_index, double rho0, Rng &rng)
    {
        const auto &s = scatterers[static_cast<std::size_t>(m - 1)];
        if (m == cu_index)
            return std::polar(std::sqrt(rho0) / s.dist_bs, rng.phase());

        const auto &user = scatterers[static_cast<std::size_t>(cu_index - 1)];
        const double r = (s.position - user.position).norm();
        if (!(r > 0.0))
            throw NumericalError("comm_gain: scatterer " + std::to_string(m) + " coincides with the user");
        const double delta = std::abs(rng.normal());
        const double phase = rng.phase();
        return comm_gain(s.dist_bs, r, rho0, delta, phase);
    }

    CVector synthesize_channel(std::span<const Scatterer> scatterers, const ArrayConfig &array)
    {
        CVector h = CVector::Zero(array.size());
        for (const auto &s : scatterers)
            if (s.alpha != cplx{0.0, 0.0})
                h += s.alpha * steering(s.theta, s.phi, array);
        return h;
    }

    Scene draw_scene(const SceneConfig &cfg, const ArrayConfig &array, Rng &rng)
    {
        cfg.validate();
        Scene scene;
        scene.cu_index = cfg.cu_index;
        scene.scatterers.resize(static_cast<std::size_t>(cfg.m_total));

        for (auto &s : scene.scatterers)
        {
            s.theta = deg2rad(rng.uniform(cfg.theta_range_deg.lo, cfg.theta_range_deg.hi));
            s.phi = deg2rad(rng.uniform(cfg.phi_range_deg.lo, cfg.phi_range_deg.hi));
            s.dist_bs = rng.uniform(cfg.dist_range_m.lo, cfg.dist_range_m.hi);
            s.position = cfg.bs_position + s.dist_bs * direction_vector(s.theta, s.phi);
        }

        const double rho0 = cfg.rho0();
        for (auto &s : scene.scatterers)
            s.beta = sense_gain(s.dist_bs, rho0, rng);
        for (int m = 1; m <= cfg.m_comm; ++m)
            scene.scatterers[static_cast<std::size_t>(m - 1)].alpha = comm_gain(m, scene.scatterers, cfg.cu_index, rho0, rng);

        scene.channel = synthesize_channel(scene.scatterers, array);
        return scene;
    }

    std::string scene_record(const Scene &scene)
    {
        nlohmann::json rec;
        rec["cu_index"] = scene.cu_index;
        auto &list = rec["scatterers"] = nlohmann::json::array();
        for (const auto &s : scene.scatterers)
        {
            list.push_back({
                {"theta_deg", rad2deg(s.theta)},
                {"phi_deg", rad2deg(s.phi)},
                {"dist_m", s.dist_bs},
                {"position_m", {s.position.x(), s.position.y(), s.position.z()}},
                {"alpha", {s.alpha.real(), s.alpha.imag()}},
                {"beta", {s.beta.real(), s.beta.imag()}},
            });
        }
        return rec.dump(2);
    }
}
