#include "mirrornm/core.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace mirrornm;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

QubitState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ee = u(rng);
    // |rho_ge| up to the pure-state bound
    const double r = std::sqrt(ee * (1.0 - ee)) * u(rng);
    return {ee, std::polar(r, two_pi * u(rng))};
}

cplx random_amplitude(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(u(rng), two_pi * u(rng));
}

}  // namespace

TEST_CASE("canonicalize_phase examples") {
    CHECK(canonicalize_phase(0.0) == 0.0);
    CHECK(canonicalize_phase(two_pi) == 0.0);
    CHECK(canonicalize_phase(-pi / 2) == Approx(3 * pi / 2).epsilon(1e-15));
    CHECK(canonicalize_phase(-1e-300) == 0.0);
    CHECK_THROWS_AS(canonicalize_phase(NAN), std::invalid_argument);
    CHECK_THROWS_AS(canonicalize_phase(INFINITY), std::invalid_argument);
}

TEST_CASE("canonicalize_phase lands in [0, 2pi)") {
    for (double phi = -40.0; phi <= 40.0; phi += 0.0137) {
        const double c = canonicalize_phase(phi);
        CHECK(c >= 0.0);
        CHECK(c < two_pi);
        CHECK(std::cos(c) == Approx(std::cos(phi)).margin(1e-12));
        CHECK(std::sin(c) == Approx(std::sin(phi)).margin(1e-12));
    }
}

TEST_CASE("phi and phi + 2pi give bit-identical parameters") {
    // dyadic phases keep phi + 2pi - 2pi exact
    for (int k = 0; k < 6 * (1 << 10); k += 97) {
        const double phi = k * std::ldexp(1.0, -10);
        const ModelParams a(1.0, 1.0, phi);
        const ModelParams b(1.0, 1.0, phi + two_pi);
        if (phi < two_pi) {
            CHECK(a.phi_canonical() == b.phi_canonical());
            CHECK(a.feedback_phase() == b.feedback_phase());
        }
    }
}

TEST_CASE("ModelParams validation") {
    CHECK_THROWS_AS(ModelParams(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(-1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, -1e-3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, NAN, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 1.0, INFINITY), std::invalid_argument);
    CHECK_NOTHROW(ModelParams(1.0, 0.0, 0.0));

    const ModelParams p(2.0, 0.75, 5 * pi);
    CHECK(p.dimensionless_delay() == 1.5);
    CHECK(p.phi() == 5 * pi);
    CHECK(p.phi_canonical() == Approx(pi).epsilon(1e-14));
    CHECK_FALSE(p.bound_state());
    CHECK(ModelParams(1.0, 1.0, 4 * pi).bound_state());
    CHECK(ModelParams::rescaled(3.0, 1.0).t_d() == 3.0);
    CHECK(ModelParams::rescaled(3.0, 1.0).gamma() == 1.0);
}

TEST_CASE("QubitState rejects invalid density matrices") {
    CHECK_THROWS_AS(QubitState(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QubitState(1.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QubitState(0.5, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(QubitState(NAN, 0.0), std::invalid_argument);
    CHECK_NOTHROW(QubitState(0.5, 0.5));
    CHECK_NOTHROW(QubitState(0.5, std::polar(0.5, 1.0)));
    CHECK_THROWS_AS(Amplitude(cplx(1.0, 0.1)), std::invalid_argument);
}

TEST_CASE("evolve_state examples") {
    SECTION("ground state is a fixed point") {
        for (cplx e : {cplx(0.0), cplx(0.3, -0.4), cplx(1.0)}) {
            CHECK(evolve_state(QubitState::ground(), Amplitude(e)) == QubitState::ground());
        }
    }
    SECTION("eps = 1 is the identity") {
        const QubitState rho(0.3, cplx(0.2, -0.1));
        CHECK(evolve_state(rho, Amplitude(1.0)) == rho);
    }
    SECTION("excited state with |eps|^2 = 0.25") {
        const QubitState out = evolve_state(QubitState::excited(), Amplitude(cplx(0.0, 0.5)));
        CHECK(out.rho_ee() == 0.25);
        CHECK(out.rho_gg() == 0.75);
        CHECK(out.rho_ge() == cplx(0.0));
    }
    SECTION("coherence picks up conj(eps)") {
        const QubitState out = evolve_state(QubitState(0.5, 0.5), Amplitude(cplx(0.0, 0.5)));
        CHECK(out.rho_ge() == cplx(0.0, -0.25));
        CHECK(out.rho_eg() == cplx(0.0, 0.25));
    }
}

TEST_CASE("evolve_state keeps trace, hermiticity and positivity") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 2000; ++trial) {
        const QubitState rho = random_state(rng);
        const cplx e = random_amplitude(rng);
        QubitState out = QubitState::ground();
        REQUIRE_NOTHROW(out = evolve_state(rho, Amplitude(e)));
        CHECK(out.rho_ee() + out.rho_gg() == Approx(1.0).margin(1e-15));
        CHECK(out.rho_ee() >= 0.0);
        CHECK(std::norm(out.rho_ge()) <=
              out.rho_ee() * out.rho_gg() + positivity_slack);
    }
}

TEST_CASE("evolve_state composes multiplicatively") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const QubitState rho = random_state(rng);
        const cplx e1 = random_amplitude(rng);
        const cplx e2 = random_amplitude(rng);
        const QubitState two_step = evolve_state(evolve_state(rho, Amplitude(e1)), Amplitude(e2));
        const QubitState one_step = evolve_state(rho, Amplitude(e1 * e2));
        CHECK(two_step.rho_ee() == Approx(one_step.rho_ee()).margin(1e-15));
        CHECK(std::abs(two_step.rho_ge() - one_step.rho_ge()) <= 1e-15);
    }
}
