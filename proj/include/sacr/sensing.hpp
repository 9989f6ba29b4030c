// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "sacr/pilots_feedback.hpp"
#include "sacr/scene.hpp"

namespace sacr
{
    // N x K echo block; column t is the array snapshot during pilot symbol t
    struct EchoBlock
    {
        CMatrix samples;
        double noise_power = 0.0;
    };

    enum class AngleMethod
    {
        music,
        oracle
    };

    struct AngleEstimate
    {
        std::vector<AnglePair> pairs;
        AngleMethod method = AngleMethod::music;
        bool padded = false;         // fewer than m local maxima were found
        bool underdetermined = false; // fewer snapshots than sources
    };

    // Rectangular search grid in degrees, endpoints inclusive
    struct AngleGrid
    {
        Interval theta_deg{-6.0, 6.0};
        double theta_step_deg = 0.2;
        Interval phi_deg{-65.0, 65.0};
        double phi_step_deg = 0.5;

        std::vector<double> theta_values_deg() const;
        std::vector<double> phi_values_deg() const;
        void validate() const;
    };

    // y(t) = sum_m beta_m a_m a_m^T x_p(t) + z(t)
    EchoBlock simulate_echo(const Scene &scene, const ArrayConfig &array, const PilotMatrix &pilots,
                            double noise_power, Rng &rng);

    // R = Y Y^H / K
    CMatrix sample_covariance(const EchoBlock &echo);

    // Eigenvectors of the N - m smallest eigenvalues of a Hermitian matrix
    CMatrix noise_subspace(const CMatrix &r, int m);

    // MUSIC pseudo-spectrum sampled on the grid. denominator(i, j) = ||E_n^H a~||^2 for theta
    // index i and phi index j, with a~ the unit-norm steering vector.
    struct MusicSpectrum
    {
        std::vector<double> theta_deg;
        std::vector<double> phi_deg;
        Eigen::MatrixXd denominator;

        double value(Eigen::Index i, Eigen::Index j) const { return 1.0 / denominator(i, j); }
        Eigen::MatrixXd values() const { return denominator.cwiseInverse(); }
    };

    // Unit-norm steering vectors over a fixed grid, computed once and shared read-only
    class MusicScanner
    {
    public:
        MusicScanner(const ArrayConfig &array, const AngleGrid &grid);

        MusicSpectrum spectrum(const CMatrix &r, int m) const;
        AngleEstimate estimate(const EchoBlock &echo, int m) const;

        const ArrayConfig &array() const { return array_; }
        const AngleGrid &grid() const { return grid_; }

    private:
        ArrayConfig array_;
        AngleGrid grid_;
        std::vector<double> thetas_;
        std::vector<double> phis_;
        CMatrix steer_; // N x (n_theta * n_phi), column i * n_phi + j
    };

    MusicSpectrum music_spectrum_2d(const CMatrix &r, int m, const AngleGrid &grid, const ArrayConfig &array);

    // Picks the m strongest strict local maxima (8-neighbourhood) and refines each with a
    // three-point parabola per axis on the MUSIC denominator
    AngleEstimate pick_peaks(const MusicSpectrum &spectrum, int m);

    AngleEstimate estimate_angles(const EchoBlock &echo, int m, const AngleGrid &grid, const ArrayConfig &array);

    // True scatterer angles plus i.i.d. N(0, sigma_angle^2) perturbations
    AngleEstimate oracle_angles(const Scene &scene, double sigma_angle, Rng &rng);

    void write_spectrum_csv(const MusicSpectrum &spectrum, std::ostream &os);
}
