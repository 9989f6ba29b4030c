// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include "oracles.hpp"
#include "sacr/scene.hpp"

using namespace sacr;

namespace
{
    Scene draw(std::uint64_t seed, const SceneConfig &cfg = {}, const ArrayConfig &arr = {})
    {
        Rng rng(seed);
        return draw_scene(cfg, arr, rng);
    }
}

TEST_CASE("direction vector convention")
{
    const Vec3 boresight = direction_vector(0.0, 0.0);
    CHECK((boresight - Vec3(0, 1, 0)).norm() < 1e-15);
    CHECK((direction_vector(0.0, oracle::pi / 2) - Vec3(1, 0, 0)).norm() < 1e-15);
    CHECK((direction_vector(oracle::pi / 2, 0.0) - Vec3(0, 0, -1)).norm() < 1e-15);
    CHECK(direction_vector(0.3, -1.1).norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sensing gain magnitude")
{
    CHECK(std::abs(sense_gain(100.0, 1e-4, 1.0, 0.4)) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(std::arg(sense_gain(100.0, 1e-4, 1.0, 0.4)) == doctest::Approx(0.4));
    // two hops of d^-2: doubling the distance quarters the amplitude
    const double near = std::abs(sense_gain(50.0, 1e-4, 0.7, 0.0));
    const double far = std::abs(sense_gain(100.0, 1e-4, 0.7, 0.0));
    CHECK(near / far == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(sense_gain(100.0, 1e-4, 0.0, 0.0)) == 0.0);
}

TEST_CASE("communication gain magnitude")
{
    // sqrt(rho0 d^-2 delta r^-2)
    CHECK(std::abs(comm_gain(100.0, 20.0, 1e-4, 1.0, 0.0)) == doctest::Approx(std::sqrt(1e-4 / 1e4 / 400.0)));
    const double a = std::abs(comm_gain(90.0, 15.0, 1e-4, 0.3, 1.0));
    const double b = std::abs(comm_gain(90.0, 15.0, 1e-4, 1.2, 1.0));
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("the user's own path is a single hop")
{
    std::vector<Scatterer> s(2);
    s[0].dist_bs = 100.0;
    s[0].position = Vec3(0, 100, 10);
    s[1].dist_bs = 100.0;
    s[1].position = Vec3(0, 100, 10); // coincides with the user
    Rng rng(1);
    // sqrt(1e-4 * 100^-2) = 1e-4
    CHECK(std::abs(comm_gain(1, s, 1, 1e-4, rng)) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK_THROWS_AS(comm_gain(2, s, 1, 1e-4, rng), NumericalError);
}

TEST_CASE("default scene layout")
{
    const Scene scene = draw(9);
    REQUIRE(scene.scatterers.size() == 6);
    int zero_alpha = 0;
    for (std::size_t m = 0; m < 6; ++m)
    {
        const auto &s = scene.scatterers[m];
        if (s.alpha == cplx(0.0, 0.0))
        {
            ++zero_alpha;
            CHECK(m >= 4);
        }
        CHECK(std::abs(s.beta) > 0.0);
        CHECK(rad2deg(s.theta) >= -5.0);
        CHECK(rad2deg(s.theta) < 5.0);
        CHECK(rad2deg(s.phi) >= -60.0);
        CHECK(rad2deg(s.phi) < 60.0);
        CHECK(s.dist_bs >= 80.0);
        CHECK(s.dist_bs < 120.0);
        const Vec3 expect = Vec3(0, 0, 10) + s.dist_bs * direction_vector(s.theta, s.phi);
        CHECK((s.position - expect).norm() < 1e-12);
    }
    CHECK(zero_alpha == 2);
    CHECK(scene.cu_index == 1);
    CHECK(std::abs(scene.user().alpha) == doctest::Approx(std::sqrt(1e-4) / scene.user().dist_bs));
}

TEST_CASE("channel is the coefficient-weighted steering sum")
{
    const ArrayConfig arr;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const Scene scene = draw(seed);
        CVector h = CVector::Zero(64);
        for (const auto &s : scene.scatterers)
            h += s.alpha * oracle::steering(s.theta, s.phi, 8, 8);
        CHECK((scene.channel - h).norm() <= 1e-12 * h.norm());

        // sparsity: nothing outside the span of the first m_comm directions
        CMatrix a(64, 4);
        for (int m = 0; m < 4; ++m)
            a.col(m) = oracle::steering(scene.scatterers[m].theta, scene.scatterers[m].phi, 8, 8);
        const CMatrix q = oracle::orthonormal_span(a);
        CHECK((h - q * (q.adjoint() * h)).norm() < 1e-10 * h.norm());
    }
}

TEST_CASE("single path scene")
{
    SceneConfig cfg;
    cfg.m_total = 1;
    cfg.m_comm = 1;
    const Scene scene = draw(4, cfg);
    const auto &s = scene.scatterers[0];
    CHECK((scene.channel - s.alpha * steering(s.theta, s.phi, ArrayConfig{})).norm() == 0.0);
}

TEST_CASE("scenes are reproducible")
{
    const Scene a = draw(123), b = draw(123), c = draw(124);
    CHECK(scene_record(a) == scene_record(b));
    CHECK(a.channel == b.channel);
    CHECK(scene_record(a) != scene_record(c));
}

TEST_CASE("invalid scene configurations")
{
    SceneConfig cfg;
    cfg.m_comm = 7;
    Rng rng(1);
    CHECK_THROWS_AS(draw_scene(cfg, ArrayConfig{}, rng), ConfigError);
    cfg = {};
    cfg.dist_range_m = {0.0, 10.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.cu_index = 5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("scene record lists every scatterer in degrees")
{
    const Scene scene = draw(2);
    const auto rec = nlohmann::json::parse(scene_record(scene));
    REQUIRE(rec["scatterers"].size() == 6);
    const auto &first = rec["scatterers"][0];
    CHECK(first["theta_deg"].get<double>() == doctest::Approx(rad2deg(scene.scatterers[0].theta)));
    CHECK(first["alpha"][0].get<double>() == doctest::Approx(scene.scatterers[0].alpha.real()));
    CHECK(rec["scatterers"][5]["alpha"][0].get<double>() == 0.0);
}
