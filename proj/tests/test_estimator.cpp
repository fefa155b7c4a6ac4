#include "doctest.h"

#include "bbcpl/errors.hpp"
#include "bbcpl/estimator.hpp"
#include "bbcpl/sim.hpp"

#include <cmath>
#include <random>

using namespace bbcpl;

TEST_CASE("estimate and filter state round trip")
{
    const EstimatorState s{d_i_for_estimate(0.7, 3.0, 2.0), 2.0};
    CHECK(d_hat(3.0, s) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d_hat(0.0, {0.25, 5.0}) == 0.25);
    CHECK(predicted_error(2.0, 3.0, 0.0) == 2.0);
    CHECK(predicted_error(1.0, 2.0, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("gain validation")
{
    CHECK_THROWS_AS((EstimatorState{0.0, 0.0}.validate()), PreconditionError);
    CHECK_THROWS_AS((EstimatorState{0.0, -1.0}.validate()), PreconditionError);
    CHECK_NOTHROW((EstimatorState{0.0, 0.1}.validate()));
}

TEST_CASE("estimation error obeys e' = -gamma e for any input")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.05, 10.0);
    std::uniform_real_distribution<double> duty(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const State x{pos(rng), pos(rng)};
        const double u = duty(rng);
        const double D = pos(rng);
        const EstimatorState s{pos(rng) - 5.0, pos(rng)};
        const Vec2 xdot = vector_field(x, u, D);
        const double dhat_dot = -s.gamma * x.x2 * xdot.v2 + d_i_dot(x, u, s);
        const double e = d_hat(x.x2, s) - D;
        CHECK(dhat_dot == doctest::Approx(-s.gamma * e).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("integrated error decays exponentially")
{
    const double D = 0.6;
    const double gamma = 3.0;
    const double u = 0.8;
    std::array<double, 3> y{0.5, 4.0, d_i_for_estimate(0.1, 4.0, gamma)};
    const std::function<std::array<double, 3>(const std::array<double, 3>&)> field =
        [&](const std::array<double, 3>& z) {
            const State x{z[0], z[1]};
            const Vec2 f = vector_field(x, u, D);
            return std::array<double, 3>{f.v1, f.v2, d_i_dot(x, u, {z[2], gamma})};
        };
    const double e0 = 0.1 - D;
    const double h = 1e-3;
    for (int k = 1; k <= 2000; ++k) {
        y = rk4_step<3>(field, y, h);
        if (k % 500 == 0) {
            const double e = d_hat(y[1], {y[2], gamma}) - D;
            CHECK(e == doctest::Approx(predicted_error(e0, gamma, k * h)).epsilon(1e-9));
        }
    }
}
