// SPDX-License-Identifier: Apache-2.0

#include "sacr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace sacr
{
    namespace
    {
        std::vector<double> grid_axis(const Interval &range, double step)
        {
            std::vector<double> v;
            const auto count = static_cast<long>(std::floor(range.width() / step + 1e-9)) + 1;
            v.reserve(static_cast<std::size_t>(count));
            for (long i = 0; i < count; ++i)
                v.push_back(range.lo + static_cast<double>(i) * step);
            return v;
        }

        CMatrix signal_subspace(const CMatrix &r, int m)
        {
            if (r.rows() != r.cols())
                throw DimensionError("covariance matrix must be square");
            if (m < 0 || m >= r.rows())
                throw std::invalid_argument("MUSIC: source count " + std::to_string(m) + " must be below the array size " +
                                            std::to_string(r.rows()));
            if (!r.allFinite())
                throw NumericalError("MUSIC: covariance contains non-finite entries");

            Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
            if (eig.info() != Eigen::Success)
                throw NumericalError("MUSIC: eigendecomposition did not converge");
            // eigenvalues ascending; the signal subspace is the trailing block
            return eig.eigenvectors().rightCols(m);
        }

        // Offset of the vertex of the parabola through (-1, lo), (0, mid), (+1, hi), in steps
        double parabola_offset(double lo, double mid, double hi)
        {
            const double curvature = lo - 2.0 * mid + hi;
            if (!(curvature > 0.0))
                return 0.0;
            return std::clamp(0.5 * (lo - hi) / curvature, -0.5, 0.5);
        }
    }

    std::vector<double> AngleGrid::theta_values_deg() const { return grid_axis(theta_deg, theta_step_deg); }
    std::vector<double> AngleGrid::phi_values_deg() const { return grid_axis(phi_deg, phi_step_deg); }

    void AngleGrid::validate() const
    {
        if (!(theta_step_deg > 0.0) || !(phi_step_deg > 0.0))
            throw ConfigError("sensing grid steps must be positive");
        if (theta_deg.width() < 0.0 || phi_deg.width() < 0.0)
            throw ConfigError("sensing grid ranges must be nonempty");
        if (theta_deg.lo <= -90.0 || theta_deg.hi >= 90.0 || phi_deg.lo <= -90.0 || phi_deg.hi >= 90.0)
            throw ConfigError("sensing grid ranges must lie inside (-90, 90) degrees");
    }

    EchoBlock simulate_echo(const Scene &scene, const ArrayConfig &array, const PilotMatrix &pilots,
                            double noise_power, Rng &rng)
    {
        const Eigen::Index n = array.size();
        if (pilots.antennas() != n)
            throw DimensionError("simulate_echo: pilot width " + std::to_string(pilots.antennas()) +
                                 " does not match array size " + std::to_string(n));
        if (noise_power < 0.0)
            throw std::invalid_argument("simulate_echo: negative noise power");

        const Eigen::Index k = pilots.length();
        CMatrix y = CMatrix::Zero(n, k);
        for (const auto &s : scene.scatterers)
        {
            const CVector a = steering(s.theta, s.phi, array);
            // (a^T x_p(t)) for every t, without conjugation
            const CVector projection = pilots.entries * a;
            y.noalias() += s.beta * a * projection.transpose();
        }
        if (noise_power > 0.0)
            y += rng.cscg_matrix(k, n, noise_power).transpose(); // snapshot-major draw order
        return {std::move(y), noise_power};
    }

    CMatrix sample_covariance(const EchoBlock &echo)
    {
        const auto k = echo.samples.cols();
        if (k < 1)
            throw DimensionError("sample_covariance: echo block has no snapshots");
        CMatrix r = echo.samples * echo.samples.adjoint() / static_cast<double>(k);
        // exact Hermitian symmetry
        return (r + r.adjoint()) * 0.5;
    }

    CMatrix noise_subspace(const CMatrix &r, int m)
    {
        if (m < 0 || m >= r.rows())
            throw std::invalid_argument("noise_subspace: source count out of range");
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
        if (eig.info() != Eigen::Success)
            throw NumericalError("noise_subspace: eigendecomposition did not converge");
        return eig.eigenvectors().leftCols(r.rows() - m);
    }

    MusicScanner::MusicScanner(const ArrayConfig &array, const AngleGrid &grid)
        : array_(array), grid_(grid), thetas_(grid.theta_values_deg()), phis_(grid.phi_values_deg())
    {
        array.validate();
        grid.validate();
        const auto n_theta = static_cast<Eigen::Index>(thetas_.size());
        const auto n_phi = static_cast<Eigen::Index>(phis_.size());
        steer_.resize(array.size(), n_theta * n_phi);
        for (Eigen::Index i = 0; i < n_theta; ++i)
            for (Eigen::Index j = 0; j < n_phi; ++j)
            {
                const CVector a = steering(deg2rad(thetas_[static_cast<std::size_t>(i)]),
                                           deg2rad(phis_[static_cast<std::size_t>(j)]), array);
                steer_.col(i * n_phi + j) = a / a.norm();
            }
    }

    MusicSpectrum MusicScanner::spectrum(const CMatrix &r, int m) const
    {
        if (r.rows() != array_.size())
            throw DimensionError("MUSIC: covariance size " + std::to_string(r.rows()) + " does not match array size " +
                                 std::to_string(array_.size()));
        const CMatrix es = signal_subspace(r, m);

        // ||E_n^H a||^2 = 1 - ||E_s^H a||^2 for unit-norm a
        const Eigen::RowVectorXd captured = (es.adjoint() * steer_).cwiseAbs2().colwise().sum();

        MusicSpectrum s;
        s.theta_deg = thetas_;
        s.phi_deg = phis_;
        const auto n_theta = static_cast<Eigen::Index>(thetas_.size());
        const auto n_phi = static_cast<Eigen::Index>(phis_.size());
        s.denominator.resize(n_theta, n_phi);
        constexpr double floor = 1e-300;
        for (Eigen::Index i = 0; i < n_theta; ++i)
            for (Eigen::Index j = 0; j < n_phi; ++j)
                s.denominator(i, j) = std::max(1.0 - captured(i * n_phi + j), floor);
        return s;
    }

    AngleEstimate MusicScanner::estimate(const EchoBlock &echo, int m) const
    {
        AngleEstimate est = pick_peaks(spectrum(sample_covariance(echo), m), m);
        est.underdetermined = echo.samples.cols() < m;
        return est;
    }

    MusicSpectrum music_spectrum_2d(const CMatrix &r, int m, const AngleGrid &grid, const ArrayConfig &array)
    {
        return MusicScanner(array, grid).spectrum(r, m);
    }

    AngleEstimate pick_peaks(const MusicSpectrum &spectrum, int m)
    {
        const Eigen::MatrixXd &d = spectrum.denominator;
        const Eigen::Index rows = d.rows();
        const Eigen::Index cols = d.cols();

        struct Cell
        {
            Eigen::Index i, j;
        };
        std::vector<Cell> peaks;
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
            {
                bool strict = true;
                for (Eigen::Index di = -1; di <= 1 && strict; ++di)
                    for (Eigen::Index dj = -1; dj <= 1; ++dj)
                    {
                        if (di == 0 && dj == 0)
                            continue;
                        const Eigen::Index ni = i + di, nj = j + dj;
                        if (ni < 0 || nj < 0 || ni >= rows || nj >= cols)
                            continue;
                        if (!(d(i, j) < d(ni, nj)))
                        {
                            strict = false;
                            break;
                        }
                    }
                if (strict)
                    peaks.push_back({i, j});
            }

        // strongest first (smallest denominator); index order breaks ties
        auto stronger = [&](const Cell &a, const Cell &b)
        {
            if (d(a.i, a.j) != d(b.i, b.j))
                return d(a.i, a.j) < d(b.i, b.j);
            return a.i * cols + a.j < b.i * cols + b.j;
        };
        std::stable_sort(peaks.begin(), peaks.end(), stronger);

        AngleEstimate est;
        est.method = AngleMethod::music;
        const auto want = static_cast<std::size_t>(std::max(m, 0));
        if (peaks.size() > want)
            peaks.resize(want);

        if (peaks.size() < want)
        {
            est.padded = true;
            std::vector<Cell> rest;
            for (Eigen::Index i = 0; i < rows; ++i)
                for (Eigen::Index j = 0; j < cols; ++j)
                {
                    const bool taken = std::any_of(peaks.begin(), peaks.end(), [&](const Cell &c)
                                                   { return c.i == i && c.j == j; });
                    if (!taken)
                        rest.push_back({i, j});
                }
            std::stable_sort(rest.begin(), rest.end(), stronger);
            for (std::size_t k = 0; peaks.size() < want && k < rest.size(); ++k)
                peaks.push_back(rest[k]);
        }

        const double theta_step = spectrum.theta_deg.size() > 1 ? spectrum.theta_deg[1] - spectrum.theta_deg[0] : 0.0;
        const double phi_step = spectrum.phi_deg.size() > 1 ? spectrum.phi_deg[1] - spectrum.phi_deg[0] : 0.0;
        for (const auto &c : peaks)
        {
            double theta = spectrum.theta_deg[static_cast<std::size_t>(c.i)];
            double phi = spectrum.phi_deg[static_cast<std::size_t>(c.j)];
            if (c.i > 0 && c.i + 1 < rows)
                theta += theta_step * parabola_offset(d(c.i - 1, c.j), d(c.i, c.j), d(c.i + 1, c.j));
            if (c.j > 0 && c.j + 1 < cols)
                phi += phi_step * parabola_offset(d(c.i, c.j - 1), d(c.i, c.j), d(c.i, c.j + 1));
            est.pairs.push_back({deg2rad(theta), deg2rad(phi)});
        }
        return est;
    }

    AngleEstimate estimate_angles(const EchoBlock &echo, int m, const AngleGrid &grid, const ArrayConfig &array)
    {
        return MusicScanner(array, grid).estimate(echo, m);
    }

    AngleEstimate oracle_angles(const Scene &scene, double sigma_angle, Rng &rng)
    {
        if (sigma_angle < 0.0)
            throw std::invalid_argument("oracle_angles: sigma_angle must be >= 0");
        AngleEstimate est;
        est.method = AngleMethod::oracle;
        for (const auto &s : scene.scatterers)
        {
            AnglePair p = s.direction();
            if (sigma_angle > 0.0)
            {
                p.theta += sigma_angle * rng.normal();
                p.phi += sigma_angle * rng.normal();
            }
            est.pairs.push_back(p);
        }
        return est;
    }

    void write_spectrum_csv(const MusicSpectrum &spectrum, std::ostream &os)
    {
        os << "theta_deg,phi_deg,value\n";
        for (std::size_t i = 0; i < spectrum.theta_deg.size(); ++i)
            for (std::size_t j = 0; j < spectrum.phi_deg.size(); ++j)
                os << fmt::format("{:.6f},{:.6f},{:.17g}\n", spectrum.theta_deg[i], spectrum.phi_deg[j],
                                  spectrum.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
}
