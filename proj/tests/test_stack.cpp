#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "spinflip/stack.hpp"

using namespace spinflip::stack;
using C = std::complex<double>;

TEST_CASE("constants are self-consistent") {
    PhysicalConstants k{};
    CHECK_NOTHROW(k.validate());
    CHECK(std::abs(k.c * k.c * k.eps0 * k.mu0 - 1.0) < 1e-9);
    CHECK(k.gS == 2.0);
    PhysicalConstants bad = k;
    bad.mu0 = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("skin depths of the reference materials") {
    CHECK(skin_depth(1.6e-8, 560e3) == doctest::Approx(85e-6).epsilon(0.01));
    CHECK(skin_depth(2.7e-8, 560e3) == doctest::Approx(110e-6).epsilon(0.01));
    // delta ~ 1/sqrt(omega)
    CHECK(skin_depth(1.6e-8, 4 * 560e3) ==
          doctest::Approx(0.5 * skin_depth(1.6e-8, 560e3)).epsilon(1e-12));
    CHECK_THROWS_AS(skin_depth(-1.0, 560e3), std::invalid_argument);
    CHECK_THROWS_AS(skin_depth(1.6e-8, 0.0), std::invalid_argument);
}

TEST_CASE("quasi-static permittivity from the skin depth") {
    C eps = rel_permittivity(110e-6, 1.173e-2);
    CHECK(eps.real() == 0.0);
    CHECK(eps.imag() == doctest::Approx(1.2013e12).epsilon(0.002));

    // free-space limit: huge skin depth, negligible permittivity
    CHECK(std::abs(rel_permittivity(1e6, 1.173e-2)) < 1e-2);

    // eps ~ 1/delta^2
    C e1 = rel_permittivity(60e-6, 1.173e-2);
    C e2 = rel_permittivity(120e-6, 1.173e-2);
    CHECK(std::abs(e1) / std::abs(e2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(rel_permittivity(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("the two permittivity forms agree") {
    PhysicalConstants k{};
    for (double rho : {1.6e-8, 2.7e-8, 5e-7}) {
        for (double f : {56e3, 560e3, 5.6e6}) {
            double omega = 2 * M_PI * f;
            double delta = skin_depth(rho, f, k);
            C via_delta = rel_permittivity(delta, omega / k.c);
            C direct{0.0, 1.0 / (k.eps0 * rho * omega)};
            CHECK(std::abs(via_delta - direct) / std::abs(direct) < 1e-9);
        }
    }
}

TEST_CASE("eta_tilde branch and examples") {
    C prop = eta_tilde({1.0, 0.0}, 0.5);
    CHECK(prop.real() == doctest::Approx(std::sqrt(0.75)));
    CHECK(prop.imag() == 0.0);
    C ev = eta_tilde({1.0, 0.0}, 2.0);
    CHECK(ev.real() == doctest::Approx(0.0));
    CHECK(ev.imag() == doctest::Approx(std::sqrt(3.0)));

    C big = eta_tilde({0.0, 1.19e12}, 10.0);
    double want = std::sqrt(1.19e12 / 2.0);
    CHECK(big.real() == doctest::Approx(want).epsilon(1e-3));
    CHECK(big.imag() == doctest::Approx(want).epsilon(1e-3));

    // branch and square-back invariants
    for (double qr : {0.0, 0.3, 1.5, 40.0, 2e5})
        for (C eps : {C{1, 0}, C{4, 0.2}, C{-3, 0.7}, C{0, 2e12}, C{0.5, 0}}) {
            C eta = eta_tilde(eps, qr);
            CHECK(eta.imag() >= 0.0);
            if (eta.imag() == 0.0) CHECK(eta.real() >= 0.0);
            C back = eta * eta;
            C want2 = eps - qr * qr;
            CHECK(std::abs(back - want2) <= 1e-12 * std::abs(want2));
        }
}

TEST_CASE("layer and stack validation") {
    CHECK_THROWS_AS(Layer::conductor(0.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(Layer::conductor(1e-4, -1e-8), std::invalid_argument);
    CHECK_THROWS_AS(Layer::dielectric(1e-4, {1.0, -0.5}), std::invalid_argument);

    Layer inner = Layer::conductor(185e-6, 1.6e-8);
    Layer outer = Layer::conductor(240e-6, 2.7e-8);
    CHECK_NOTHROW(WireStack(inner, outer));
    CHECK_THROWS_AS(WireStack(outer, inner), std::invalid_argument);
    CHECK_THROWS_AS(WireStack(inner, inner), std::invalid_argument);

    // a layer given both ways is rejected
    Layer both;
    both.outer_radius = 1e-4;
    both.resistivity = 1e-8;
    both.rel_permittivity = C{1.0, 0.0};
    CHECK_THROWS_AS(both.validate(), std::invalid_argument);
}

TEST_CASE("transition and field point") {
    Transition t(560e3, 0.125, 300.0);
    PhysicalConstants k{};
    CHECK(t.k3(k) == doctest::Approx(2 * M_PI * 560e3 / k.c));
    CHECK_THROWS_AS(Transition(0.0, 0.125, 300.0), std::invalid_argument);
    CHECK_THROWS_AS(Transition(560e3, 0.0, 300.0), std::invalid_argument);
    CHECK_THROWS_AS(Transition(560e3, 0.125, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(FieldPoint(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FieldPoint(-1e-6), std::invalid_argument);
}

TEST_CASE("resistivity resolves to a purely imaginary permittivity") {
    PhysicalConstants k{};
    Layer l = Layer::conductor(240e-6, 2.7e-8);
    double omega = 2 * M_PI * 560e3;
    C eps = l.rel_permittivity_at(omega, k);
    CHECK(eps.real() == 0.0);
    CHECK(eps.imag() > 0.0);
    // matches the skin-depth route
    C via = rel_permittivity(skin_depth(2.7e-8, 560e3, k), omega / k.c);
    CHECK(std::abs(eps - via) / std::abs(via) < 1e-9);
}
