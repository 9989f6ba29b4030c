// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sacr/array_geometry.hpp"
#include "sacr/random.hpp"

namespace sacr
{
    struct SceneConfig
    {
        int m_total = 6;                     // scatterers seen by the radar
        int m_comm = 4;                      // leading scatterers that shape the channel
        Interval theta_range_deg{-5.0, 5.0}; // elevation prior
        Interval phi_range_deg{-60.0, 60.0}; // azimuth prior
        Interval dist_range_m{80.0, 120.0};  // BS-to-scatterer distance prior
        double rho0_db = -40.0;              // path loss at 1 m
        Vec3 bs_position{0.0, 0.0, 10.0};
        int cu_index = 1; // 1-based scatterer hosting the user

        double rho0() const { return db2lin(rho0_db); }
        void validate() const;
    };

    struct Scatterer
    {
        double theta = 0.0;   // rad
        double phi = 0.0;     // rad
        double dist_bs = 0.0; // m
        Vec3 position = Vec3::Zero();
        cplx alpha{0.0, 0.0}; // communication coefficient, zero outside the first m_comm
        cplx beta{0.0, 0.0};  // echo coefficient

        AnglePair direction() const { return {theta, phi}; }
    };

    struct Scene
    {
        std::vector<Scatterer> scatterers;
        int cu_index = 1;
        CVector channel;

        std::vector<AnglePair> directions() const;
        const Scatterer &user() const { return scatterers.at(static_cast<std::size_t>(cu_index - 1)); }
    };

    // Unit vector for elevation theta (from the horizontal plane) and azimuth phi
    Vec3 direction_vector(double theta, double phi);

    // |beta| = sqrt(rho0 * gamma * d^-4); gamma is a draw of |N(0,1)|, phase uniform on [-pi, pi)
    cplx sense_gain(double d, double rho0, Rng &rng);
    cplx sense_gain(double d, double rho0, double gamma, double phase);

    // Scatterer m (1-based). The user's own path is a single hop: |alpha| = sqrt(rho0 d^-2).
    // Other paths: |alpha| = sqrt(rho0 d^-2 delta r^-2), r the scatterer-to-user distance.
    cplx comm_gain(int m, std::span<const Scatterer> scatterers, int cu_index, double rho0, Rng &rng);
    cplx comm_gain(double d, double r, double rho0, double delta, double phase);

    CVector synthesize_channel(std::span<const Scatterer> scatterers, const ArrayConfig &array);

    Scene draw_scene(const SceneConfig &cfg, const ArrayConfig &array, Rng &rng);

    // JSON record: angles in degrees, distances, alpha/beta as [re, im]
    std::string scene_record(const Scene &scene);
}
