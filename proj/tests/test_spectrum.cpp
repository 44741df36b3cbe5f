#include "mirrornm/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mirrornm;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("spectral_density examples") {
    CHECK(spectral_density(ModelParams::rescaled(1.0, 0.0), 0.0) == 0.0);
    CHECK(spectral_density(ModelParams(2.0, 1.0, pi), 0.0) == Approx(2.0 / pi).epsilon(1e-15));
    const ModelParams p(1.0, 3.0, pi / 2);
    // sin^2(pi/4 + pi/4) = 1 and sin^2(pi/2 + pi/4) = 1/2
    CHECK(spectral_density(p, pi / (2 * 3.0)) == Approx(1.0 / pi).epsilon(1e-14));
    CHECK(spectral_density(p, pi / 3.0) == Approx(1.0 / (2 * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(spectral_density(p, NAN), std::invalid_argument);
}

TEST_CASE("spectral_density flattens as t_d -> 0") {
    const double phi = 2.0;
    const double flat = std::pow(std::sin(phi / 2), 2) / pi;
    const ModelParams p(1.0, 1e-6, phi);
    for (double d = -50.0; d <= 50.0; d += 0.5) {
        CHECK(spectral_density(p, d) == Approx(flat).margin(1e-4));
    }
}

TEST_CASE("spectral_density identities") {
    const double gamma = 1.7;
    const double t_d = 0.9;
    for (double phi : {0.0, 0.4, pi, 5.1}) {
        const ModelParams p(gamma, t_d, phi);
        double mean = 0.0;
        const int n = 4096;
        const double period = two_pi / t_d;
        for (int i = 0; i < n; ++i) {
            const double d = -3.0 + period * i / n;
            const double j = spectral_density(p, d);
            CHECK(j >= 0.0);
            CHECK(j <= gamma / pi + 1e-15);
            CHECK(spectral_density(p, d + period) == Approx(j).margin(1e-12));
            // a phase shift is a detuning shift by phi / t_d
            CHECK(spectral_density(ModelParams(gamma, t_d, 0.0), d + phi / t_d) ==
                  Approx(j).margin(1e-12));
            mean += j / n;
        }
        CHECK(mean == Approx(gamma / (2 * pi)).epsilon(1e-12));
    }
}

TEST_CASE("spectrum_scan examples") {
    const ModelParams p = ModelParams::rescaled(2.0, 0.0);
    const auto two = spectrum_scan(p, 0.0, two_pi / 2.0, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].detuning == 0.0);
    CHECK(two[1].detuning == pi);
    CHECK(two[0].density == 0.0);
    CHECK(two[1].density == Approx(0.0).margin(1e-15));

    const auto fine = spectrum_scan(p, 0.0, pi, 1001);
    const auto best = std::max_element(fine.begin(), fine.end(), [](auto& a, auto& b) {
        return a.density < b.density;
    });
    CHECK(best->density == Approx(1.0 / pi).epsilon(1e-6));
    CHECK(fine.back().detuning == pi);
}

TEST_CASE("spectrum_scan rejects invalid ranges") {
    const ModelParams p = ModelParams::rescaled(1.0, 0.0);
    CHECK_THROWS_AS(spectrum_scan(p, 1.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(spectrum_scan(p, 2.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(spectrum_scan(p, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(spectrum_scan(p, 0.0, INFINITY, 3), std::invalid_argument);
}
