#include "ddbs/array_model.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace ddbs;

TEST_CASE("subcarrier grid is centred on the carrier") {
    SystemConfig c = oracle::half_wave(16, 10e9, 1e9, 4);
    const auto f = subcarrier_freqs(c);
    REQUIRE(f.size() == 4);
    CHECK(f[0] == doctest::Approx(10e9 - 0.375e9));
    CHECK(f[3] == doctest::Approx(10e9 + 0.375e9));
    CHECK(0.5 * (f[1] + f[2]) == doctest::Approx(10e9));
    CHECK(subcarrier_freq(c, 2) == f[1]);
}

TEST_CASE("default spacing is half a carrier wavelength") {
    SystemConfig c = oracle::half_wave(16, 30e9, 5e9, 8);
    CHECK(c.spacing() == doctest::Approx(kSpeedOfLight / 30e9 / 2.0));
    c.antenna_spacing = 0.004;
    CHECK(c.spacing() == 0.004);
}

TEST_CASE("config validation rejects bad domains") {
    SystemConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.n_antennas = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.bandwidth = 2.0 * c.carrier_freq;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.distance_range = {10.0, 5.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.angle_range = {-1.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("polar location conversions") {
    const auto loc = PolarLocation::from_distance(0.6, 20.0);
    CHECK(loc.alpha == doctest::Approx((1 - 0.36) / 40.0));
    CHECK(loc.distance() == doctest::Approx(20.0));
    CHECK(std::isinf(PolarLocation{0.1, 0.0}.distance()));
}

TEST_CASE("steering vectors are unit norm and agree in the Fresnel region") {
    const SystemConfig c = oracle::half_wave(64, 30e9, 5e9, 16);
    const double f = 30e9;
    const double theta = 0.3, r = 40.0;
    const SteeringVector a = exact_steering(c, theta, r, f);
    const SteeringVector b = approx_steering(c, PolarLocation::from_distance(theta, r), f);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(a.dot(b)) > 0.999);

    // Element-level oracle for the exact form.
    const double d = c.spacing(), k = 2 * kPi * f / kSpeedOfLight;
    for (int i : {0, 17, 63}) {
        const double nd = oracle::pos(64, i) * d;
        const double rn = std::sqrt(r * r + nd * nd - 2 * r * nd * theta);
        const cdouble ref = std::polar(1.0 / 8.0, -k * (rn - r));
        CHECK(std::abs(a[i] - ref) < 1e-12);
    }
}

TEST_CASE("LoS channel gain follows free-space spreading") {
    const SystemConfig c = oracle::half_wave(32, 30e9, 5e9, 8);
    const Channel ch = los_channel(c, 0.1, 25.0);
    REQUIRE(ch.n_subcarriers() == 8);
    for (int m = 1; m <= 8; ++m) {
        const double lam = kSpeedOfLight / subcarrier_freq(c, m);
        CHECK(ch.path_gains[m - 1] == doctest::Approx(lam / (4 * kPi * 25.0)));
        CHECK(ch.per_subcarrier[m - 1].norm() == doctest::Approx(std::sqrt(32.0) * ch.path_gains[m - 1]));
    }
    CHECK(ch.beta_c == doctest::Approx(kSpeedOfLight / 30e9 / (4 * kPi * 25.0)));
}

TEST_CASE("polar codebook layout") {
    SystemConfig c = oracle::half_wave(32, 30e9, 5e9, 8);
    const PolarCodebook cb(c, 8, 3);
    REQUIRE(cb.size() == 24);
    const auto [lo, hi] = c.angle_range;
    for (int l = 0; l < 8; ++l)
        for (int s = 0; s < 3; ++s) {
            const auto& p = cb.location(static_cast<std::size_t>(l * 3 + s));
            CHECK(p.theta == doctest::Approx(cell_center(lo, hi, l, 8)));
            CHECK(p.alpha == doctest::Approx(cell_center(c.alpha_min(), c.alpha_max(), s, 3)));
        }
    const SteeringVector w = cb.codeword(5, 30e9);
    CHECK(std::abs(w.dot(approx_steering(c, cb.location(5), 30e9))) == doctest::Approx(1.0));
}
