#include "doctest.h"

#include "oracle_constants.hpp"
#include "test_support.hpp"

#include "bbcpl/energy.hpp"
#include "bbcpl/errors.hpp"
#include "bbcpl/roots.hpp"

#include <cmath>

using namespace bbcpl;
using testing_support::halton_points;
using testing_support::rel_err;
using testing_support::richardson_derivative;
using testing_support::step_for;

namespace {

const double kD = oracle::kDReference;

Equilibrium reference_eq() { return equilibrium_for(4.0, kD); }

} // namespace

TEST_CASE("f_d entries and dissipation")
{
    const Matrix2 m = f_d({0.7423, 4.0});
    CHECK(m.a11 == doctest::Approx(oracle::kFd11).epsilon(1e-14));
    CHECK(m.a12 == doctest::Approx(oracle::kFd12).epsilon(1e-14));
    CHECK(m.a21 == doctest::Approx(-oracle::kFd12).epsilon(1e-14));
    CHECK(m.a22 == doctest::Approx(oracle::kFd22).epsilon(1e-14));

    for (const State& x : halton_points(500)) {
        const Matrix2 sym = f_d(x).symmetric_part();
        CHECK(sym.a11 < 0.0);
        CHECK(sym.det() > 0.0);
    }
    CHECK_THROWS_AS((void)f_d({0.0, 1.0}), DomainError);
}

TEST_CASE("hamiltonian reference value")
{
    CHECK(hamiltonian({1.0, 1.0}, 1.0, 1.0, 0.0) == doctest::Approx(oracle::kHamiltonian11).epsilon(1e-14));
    CHECK_THROWS_AS((void)hamiltonian({1.0, -1.0}, 1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)grad({-1.0, 1.0}, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("gradient satisfies the matching PDE for any k1, k2")
{
    for (double k1 : {-0.5, 0.0, 0.01, 2.0}) {
        for (double k2 : {-3.0, 0.0, 2.98943}) {
            for (const State& x : halton_points(300)) {
                CHECK(std::abs(pde_residual(x, kD, k1, k2)) <= 1e-9 * std::max(1.0, std::abs(k1) * 1e3));
            }
        }
    }
    // A wrong gradient is detected.
    CHECK(std::abs(pde_residual({1.0, 1.0}, 1.0, Vec2{0.0, 0.0}) + 1.0) < 1e-15);
}

TEST_CASE("gradient and Hessian against finite differences")
{
    const double k2 = compute_k2(reference_eq(), kD, 0.01);
    for (const State& x : halton_points(300)) {
        const Vec2 g = grad(x, kD, 0.01, k2);
        const Matrix2 h = hessian(x, kD, 0.01, k2);
        auto h_of = [&](double a, double b) { return hamiltonian({a, b}, kD, 0.01, k2); };
        const double g1 = richardson_derivative([&](double s) { return h_of(s, x.x2); }, x.x1, step_for(x.x1));
        const double g2 = richardson_derivative([&](double s) { return h_of(x.x1, s); }, x.x2, step_for(x.x2));
        CHECK(rel_err(g.v1, g1) <= 1e-6);
        CHECK(rel_err(g.v2, g2) <= 1e-6);
        const double h11 =
            richardson_derivative([&](double s) { return grad({s, x.x2}, kD, 0.01, k2).v1; }, x.x1, step_for(x.x1));
        const double h22 =
            richardson_derivative([&](double s) { return grad({x.x1, s}, kD, 0.01, k2).v2; }, x.x2, step_for(x.x2));
        const double h12 =
            richardson_derivative([&](double s) { return grad({x.x1, s}, kD, 0.01, k2).v1; }, x.x2, step_for(x.x2));
        CHECK(rel_err(h.a11, h11) <= 1e-5);
        CHECK(rel_err(h.a22, h22) <= 1e-5);
        CHECK(rel_err(h.a12, h12) <= 1e-5);
        CHECK(h.a12 == h.a21);
    }
}

TEST_CASE("k2 makes the equilibrium critical")
{
    const Equilibrium eq = reference_eq();
    CHECK(compute_k2(eq, kD, 0.01) == doctest::Approx(oracle::kK2Reference).epsilon(1e-12));
    for (double k1 : {-0.1, 0.01, 0.3, 5.0}) {
        const Vec2 g = grad(eq.state(), kD, k1, compute_k2(eq, kD, k1));
        CHECK(g.norm() <= 1e-12);
    }
    for (double x2s : {0.5, 1.0, 2.0, 7.0}) {
        for (double D : {0.1, 1.0, 3.0}) {
            const Equilibrium e = equilibrium_for(x2s, D);
            CHECK(grad(e.state(), D, 0.2, compute_k2(e, D, 0.2)).norm() <= 1e-11);
        }
    }
    CHECK_THROWS_AS((void)compute_k2(eq, kD, 0.0), PreconditionError);
}

TEST_CASE("k1 prime by closed form and by bracketing")
{
    const Equilibrium eq = reference_eq();
    CHECK(k1_prime_closed_form(eq, kD) == doctest::Approx(oracle::kK1PrimeReference).epsilon(1e-12));
    CHECK(k1_prime_bracketed(eq, kD) == doctest::Approx(oracle::kK1PrimeReference).epsilon(1e-9));
    CHECK(k1_prime(eq, kD) == doctest::Approx(oracle::kK1PrimeReference).epsilon(1e-12));
    CHECK(k1_prime(equilibrium_for(1.0, 1.0), 1.0) == doctest::Approx(oracle::kK1Prime21).epsilon(1e-12));

    // H11 at x* changes sign exactly at k1'.
    const double kp = k1_prime(eq, kD);
    auto h11 = [&](double k1) { return hessian(eq.state(), kD, k1, compute_k2(eq, kD, k1)).a11; };
    CHECK(h11(kp + 1e-4) > 0.0);
    CHECK(h11(kp - 1e-4) < 0.0);
}

TEST_CASE("determinant bound")
{
    const Equilibrium eq = reference_eq();
    CHECK(det_gain_slope(eq, kD) == doctest::Approx(oracle::kDetSlopeReference).epsilon(1e-12));
    CHECK(k1_double_prime_closed_form(eq, kD) == doctest::Approx(oracle::kK1DoublePrimeReference).epsilon(1e-12));
    CHECK(k1_double_prime_bracketed(eq, kD) == doctest::Approx(oracle::kK1DoublePrimeReference).epsilon(1e-9));
    CHECK(k1_double_prime(eq, kD) == doctest::Approx(oracle::kK1DoublePrimeReference).epsilon(1e-12));

    // The determinant is affine in k1 with the reported slope.
    auto det_at = [&](double k1) { return hessian(eq.state(), kD, k1, compute_k2(eq, kD, k1)).det(); };
    CHECK((det_at(0.5) - det_at(0.1)) / 0.4 == doctest::Approx(oracle::kDetSlopeReference).epsilon(1e-9));

    // At (2, 1) the slope is negative: the root exists but is an upper bound.
    const Equilibrium e21 = equilibrium_for(1.0, 1.0);
    CHECK(det_gain_slope(e21, 1.0) == doctest::Approx(oracle::kDetSlope21).epsilon(1e-12));
    CHECK(det_gain_root(e21, 1.0) == doctest::Approx(oracle::kDetRoot21).epsilon(1e-12));
    CHECK(h_factor(e21) == oracle::kHFactor21);
    CHECK_THROWS_AS((void)k1_double_prime_closed_form(e21, 1.0), PreconditionError);
}

TEST_CASE("gain sets")
{
    const Equilibrium eq = reference_eq();
    const GainSet g = make_gain_set(eq, kD, 0.01);
    CHECK(g.satisfies_bound());
    CHECK(g.lower_bound() == doctest::Approx(oracle::kK1DoublePrimeReference).epsilon(1e-12));
    CHECK(g.k2 == doctest::Approx(oracle::kK2Reference).epsilon(1e-12));
    CHECK(hessian(eq.state(), kD, g.k1, g.k2).positive_definite());
    CHECK_THROWS_AS((void)make_gain_set(eq, kD, -0.01), PreconditionError);
}

TEST_CASE("root finding")
{
    CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS((void)bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), NotFoundError);
    CHECK(bracket_and_bisect([](double x) { return x - 37.0; }, -1.0, 0.75) == doctest::Approx(37.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)bracket_and_bisect([](double) { return 1.0; }, -1.0, 0.75, 5), NotFoundError);
}
