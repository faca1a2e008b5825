#include "doctest.h"
#include "helpers.hpp"

#include "uavqoe/scenario.hpp"

#include <random>

using namespace uavqoe;
using namespace uavqoe::testing;

TEST_SUITE("scenario")
{
    TEST_CASE("omega and nadir gain match the free-space constants")
    {
        WorldConfig cfg;
        CHECK(close_rel(omega(cfg), 2.3737261890385256e-05, 1e-12));
        CHECK(close_rel(channel_gain(Vec2(10, 20), Vec2(10, 20), cfg), 9.494904756154102e-11, 1e-12));
    }

    TEST_CASE("gain ratio at 115.43 m horizontal distance")
    {
        WorldConfig cfg;
        const double g0 = channel_gain(Vec2(0, 0), Vec2(0, 0), cfg);
        const double g1 = channel_gain(Vec2(0, 0), Vec2(115.43, 0), cfg);
        CHECK(close_rel(g1 / g0, 0.9494004321516584, 1e-12));
    }

    TEST_CASE("doubling H^2 + d^2 halves the gain")
    {
        WorldConfig cfg;
        const double H2 = cfg.altitude_H * cfg.altitude_H;
        const double g0 = channel_gain(Vec2(0, 0), Vec2(0, 0), cfg);
        const double g1 = channel_gain(Vec2(0, 0), Vec2(std::sqrt(H2), 0), cfg);
        CHECK(close_rel(g1, g0 / 2.0, 1e-14));
    }

    TEST_CASE("line of sight disc")
    {
        WorldConfig cfg;
        CHECK(close_rel(los_radius(cfg), 115.43409556278151, 1e-12));
        CHECK(los_feasible(Vec2(0, 0), Vec2(100, 0), cfg));
        CHECK(los_feasible(Vec2(3, 4), Vec2(3, 4), cfg));
        CHECK_FALSE(los_feasible(Vec2(0, 0), Vec2(115.44, 0), cfg));
    }

    TEST_CASE("single UAV SINR and rate")
    {
        WorldConfig cfg;
        std::vector<UavState> u = {uav(0, 100, 100, 500)};
        std::vector<SubscriberState> s = {sub(0, 100, 100)};
        CHECK(close_rel(sinr(0, 0, u, s, cfg), 11925061212.729597, 1e-9));
        Association a(1);
        a.uav_of[0] = 0;
        CHECK(close_rel(achievable_rate(0, a, u, s, cfg), 33.473277620766254, 1e-12));
        u[0].p = 0.0;
        CHECK(sinr(0, 0, u, s, cfg) == 0.0);
        CHECK(achievable_rate(0, Association(1), u, s, cfg) == 0.0);
    }

    TEST_CASE("SINR of one equals one bit per hertz")
    {
        WorldConfig cfg;
        cfg.noise_power_sigma2 = 1e-30;
        std::vector<UavState> u = {uav(0, 100, 100, 50), uav(1, 100, 100, 50)};
        std::vector<SubscriberState> s = {sub(0, 120, 90)};
        CHECK(sinr(0, 0, u, s, cfg) == doctest::Approx(1.0).epsilon(1e-12));
        Association a(1);
        a.uav_of[0] = 0;
        CHECK(achievable_rate(0, a, u, s, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("mobility: zero step, determinism, reflection")
    {
        WorldConfig cfg;
        Rng r0 = make_stream(5, 1);
        auto subs = random_subscribers(cfg, r0);
        WorldConfig still = cfg;
        still.subscriber_step_m = 0.0;
        auto a = subs;
        Rng r1 = make_stream(5, 2);
        step_subscriber_mobility(a, still, r1);
        for (std::size_t i = 0; i < subs.size(); ++i)
            CHECK((a[i].s - subs[i].s).norm() == 0.0);

        auto b = subs, c = subs;
        Rng rb = make_stream(9, 2), rc = make_stream(9, 2);
        for (int t = 0; t < 50; ++t)
        {
            step_subscriber_mobility(b, cfg, rb);
            step_subscriber_mobility(c, cfg, rc);
        }
        for (std::size_t i = 0; i < b.size(); ++i)
            CHECK(b[i].s == c[i].s);

        CHECK(reflect_into(-0.3, 500.0) == doctest::Approx(0.3));
        CHECK(reflect_into(500.4, 500.0) == doctest::Approx(499.6));
        CHECK(reflect_into(250.0, 500.0) == 250.0);

        WorldConfig big = cfg;
        big.subscriber_step_m = 7.0;
        std::vector<SubscriberState> edge = {sub(0, 0.5, 499.5)};
        Rng re = make_stream(1, 2);
        for (int t = 0; t < 1000; ++t)
        {
            step_subscriber_mobility(edge, big, re);
            REQUIRE(edge[0].s.x() >= 0.0);
            REQUIRE(edge[0].s.x() <= 500.0);
            REQUIRE(edge[0].s.y() >= 0.0);
            REQUIRE(edge[0].s.y() <= 500.0);
        }
    }

    TEST_CASE("kinematic validation")
    {
        WorldConfig cfg;
        std::vector<UavState> prev = {uav(0, 100, 100, 1), uav(1, 200, 100, 1)};
        CHECK(validate_kinematics(prev, prev, cfg).empty());
        std::vector<UavState> close = {uav(0, 100, 100, 1), uav(1, 149.9, 100, 1)};
        auto v = validate_kinematics(close, close, cfg);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == KinematicViolation::Kind::Collision);
        std::vector<UavState> far = {uav(0, 350.1, 100, 1), uav(1, 450, 400, 1)};
        std::vector<UavState> start = {uav(0, 100, 100, 1), uav(1, 450, 400, 1)};
        v = validate_kinematics(start, far, cfg);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == KinematicViolation::Kind::Speed);
        std::vector<UavState> exact = {uav(0, 350.0, 100, 1), uav(1, 450, 400, 1)};
        CHECK(validate_kinematics(start, exact, cfg).empty());
    }

    TEST_CASE("gain is symmetric and decreasing in distance")
    {
        WorldConfig cfg;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(0.0, 500.0);
        for (int n = 0; n < 1000; ++n)
        {
            const Vec2 a(U(rng), U(rng)), b(U(rng), U(rng));
            CHECK(channel_gain(a, b, cfg) == channel_gain(b, a, cfg));
            const Vec2 farther = b + (b - a).normalized() * (1.0 + U(rng) / 10.0);
            CHECK(channel_gain(a, farther, cfg) < channel_gain(a, b, cfg));
        }
    }

    TEST_CASE("single UAV SINR equals p h / sigma2")
    {
        WorldConfig cfg;
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> U(0.0, 500.0), P(0.01, 480.0);
        for (int n = 0; n < 200; ++n)
        {
            std::vector<UavState> u = {uav(0, U(rng), U(rng), P(rng))};
            std::vector<SubscriberState> s = {sub(0, U(rng), U(rng))};
            const double expect = u[0].p * channel_gain(u[0].q, s[0].s, cfg) / cfg.sigma2();
            CHECK(close_rel(sinr(0, 0, u, s, cfg), expect, 1e-12));
        }
    }

    TEST_CASE("served subscriber with positive power has positive rate")
    {
        WorldConfig cfg;
        std::mt19937_64 rng(13);
        Rng r = make_stream(13, 1);
        for (int n = 0; n < 50; ++n)
        {
            auto u = random_uavs(cfg, r);
            auto s = random_subscribers(cfg, r);
            for (std::size_t k = 0; k < u.size(); ++k)
            {
                Association a(static_cast<int>(s.size()));
                a.uav_of[0] = static_cast<int>(k);
                if (u[k].p > 0.0)
                    CHECK(achievable_rate(0, a, u, s, cfg) > 0.0);
            }
        }
    }

    TEST_CASE("line of sight is monotone in distance")
    {
        WorldConfig cfg;
        bool seen_infeasible = false;
        for (double d = 0.0; d <= 200.0; d += 0.01)
        {
            const bool f = los_feasible(Vec2(0, 0), Vec2(d, 0), cfg);
            if (!f)
                seen_infeasible = true;
            CHECK_FALSE((f && seen_infeasible));
        }
        CHECK(seen_infeasible);
    }

    TEST_CASE("config invariants")
    {
        WorldConfig ok;
        CHECK_NOTHROW(validate(ok));
        WorldConfig c = ok;
        c.p_tilde = 600;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ok;
        c.elevation_threshold_theta = 90;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ok;
        c.d_min = 0;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ok;
        c.p_min = -1;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ok;
        c.n_uavs = 0;
        CHECK_THROWS_AS(validate(c), ConfigError);
    }

    TEST_CASE("random placement respects d_min and the power box")
    {
        WorldConfig cfg;
        cfg.n_uavs = 8;
        Rng r = make_stream(3, 1);
        for (int n = 0; n < 20; ++n)
        {
            auto u = random_uavs(cfg, r);
            for (std::size_t a = 0; a < u.size(); ++a)
            {
                CHECK(u[a].p >= cfg.p_min);
                CHECK(u[a].p <= cfg.p_hat - cfg.p_circuit);
                for (std::size_t b = a + 1; b < u.size(); ++b)
                    CHECK((u[a].q - u[b].q).norm() >= cfg.d_min);
            }
        }
        WorldConfig crowded = cfg;
        crowded.n_uavs = 200;
        Rng r2 = make_stream(3, 1);
        CHECK_THROWS_AS(random_uavs(crowded, r2), ConfigError);
    }

    TEST_CASE("dBm conversion")
    {
        CHECK(close_rel(dbm_to_mw(-174.0), 3.981071705534985e-18, 1e-12));
        CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
        CHECK(mw_to_dbm(dbm_to_mw(-37.5)) == doctest::Approx(-37.5));
        WorldConfig d;
        d.noise_reference = NoiseReference::Density;
        CHECK(close_rel(d.sigma2(), 3.981071705534985e-18 * 1e8, 1e-12));
    }

    TEST_CASE("association validity")
    {
        WorldConfig cfg;
        std::vector<UavState> u = {uav(0, 100, 100, 1), uav(1, 300, 300, 1)};
        std::vector<SubscriberState> s = {sub(0, 100, 110), sub(1, 300, 310), sub(2, 100, 120)};
        Association a(3);
        a.uav_of = {0, 1, -1};
        CHECK(is_valid(a, u, s, cfg));
        a.uav_of = {0, 1, 0};
        CHECK_FALSE(is_valid(a, u, s, cfg));
        a.uav_of = {1, -1, -1};
        CHECK_FALSE(is_valid(a, u, s, cfg));
        CHECK(a.served_count() == 1);
        CHECK(a.subscriber_of(1) == 0);
        CHECK(a.subscriber_of(0) == -1);
    }
}
