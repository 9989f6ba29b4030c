// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sacr
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using Vec3 = Eigen::Vector3d;

    // Departure direction in radians: elevation theta, azimuth phi
    struct AnglePair
    {
        double theta = 0.0;
        double phi = 0.0;
    };

    struct Interval
    {
        double lo = 0.0;
        double hi = 0.0;
        double width() const { return hi - lo; }
        bool contains(double x) const { return x >= lo && x <= hi; }
    };

    constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
    constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }
    inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }

    // Invalid or inconsistent configuration (CLI exit code 1)
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Numerical failure inside a solver or decomposition (CLI exit code 2)
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Operand shapes do not agree
    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Requested allocation exceeds a configured cap
    class CapacityError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
