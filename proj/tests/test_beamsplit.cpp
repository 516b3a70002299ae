#include "ddbs/beamsplit.hpp"
#include "ddbs/harness.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ddbs;

TEST_CASE("gain kernel matches plain summation") {
    const SystemConfig c = oracle::half_wave(64, 30e9, 5e9, 16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-200.0, 200.0), uy(-5000.0, 5000.0);
    for (int i = 0; i < 50; ++i) {
        const double x = ux(rng), y = uy(rng);
        CHECK(gain_kernel(c, x, y) == doctest::Approx(oracle::kernel(64, c.spacing(), x, y)).epsilon(1e-10));
    }
    CHECK(gain_kernel(c, 0.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("kernel periodicity in both arguments") {
    for (int n_t : {63, 64}) {
        const SystemConfig c = oracle::half_wave(n_t, 30e9, 5e9, 16);
        const double d = c.spacing();
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-300.0, 300.0), uy(-2e4, 2e4);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = ux(rng), y = uy(rng);
            const double g = gain_kernel(c, x, y);
            for (int p = -2; p <= 2; ++p)
                for (int q = -2; q <= 2; ++q)
                    worst = std::max(worst, std::abs(gain_kernel(c, x - 2 * kPi * p / d, y - 2 * kPi * q / (d * d)) - g));
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("Dirichlet sinc equals the zero-curvature kernel") {
    const SystemConfig c = oracle::half_wave(64, 30e9, 5e9, 16);
    for (double x : {0.0, 0.01, 0.1, 0.37, 2.0, 1.999999999999}) {
        const double kx = kPi * x / c.spacing();
        CHECK(std::abs(dirichlet_sinc(c, x)) == doctest::Approx(gain_kernel(c, kx, 0.0)).epsilon(1e-9));
    }
    CHECK(dirichlet_sinc(c, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("Fresnel integrals against the power series") {
    for (double b : {0.0, 0.05, 0.5, 1.0, 1.318, 2.0, 3.5}) {
        const auto [cc, ss] = fresnel(b);
        const auto ref = oracle::fresnel_series(b);
        CHECK(std::abs(cc - ref.real()) < 1e-9);
        CHECK(std::abs(ss - ref.imag()) < 1e-9);
    }
    CHECK(fresnel_amplitude(0.0) == 1.0);
    CHECK(fresnel_amplitude(1e-4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Fresnel 3 dB root") {
    const double beta = oracle::bisect([](double b) { return fresnel_amplitude(b) - 1.0 / std::sqrt(2.0); }, 0.5, 2.0);
    CHECK(std::abs(beta - kFresnelBeta) < 1e-3);
    const double series_beta = oracle::bisect(
        [](double b) { return std::abs(oracle::fresnel_series(b)) / b - 1.0 / std::sqrt(2.0); }, 0.5, 2.0);
    CHECK(std::abs(series_beta - beta) < 1e-8);
}

TEST_CASE("distance gain follows the Fresnel amplitude of the kernel") {
    const SystemConfig c = oracle::half_wave(256, 30e9, 5e9, 16);
    const double f = c.carrier_freq;
    for (double da : {1e-4, 1e-3, 3e-3}) {
        const double measured = gain_kernel(c, 0.0, wavenumber(f) * da);
        CHECK(distance_gain(c, da, f) == doctest::Approx(measured).epsilon(0.02));
    }
}

TEST_CASE("beamwidths match bisection on the kernel") {
    for (int n_t : {64, 128, 256}) {
        const SystemConfig c = oracle::half_wave(n_t, 30e9, 5e9, 64);
        const double d = c.spacing();
        for (double f : {c.lowest_freq(), c.carrier_freq, c.highest_freq()}) {
            const double k = wavenumber(f);
            const double level = 1.0 / std::sqrt(2.0);
            const double pred_t = angle_beamwidth(c, f);
            const double meas_t = oracle::first_crossing(
                [&](double t) { return oracle::kernel(n_t, d, k * t, 0.0); }, level, pred_t / 20, 4 * pred_t);
            CHECK(std::abs(meas_t / pred_t - 1.0) < 0.02);
            const double pred_a = distance_beamwidth(c, f);
            const double meas_a = oracle::first_crossing(
                [&](double a) { return oracle::kernel(n_t, d, 0.0, k * a); }, level, pred_a / 20, 4 * pred_a);
            CHECK(std::abs(meas_a / pred_a - 1.0) < 0.05);
        }
    }
}

TEST_CASE("ellipse model is the second-order expansion of the gain") {
    const SystemConfig c = oracle::half_wave(128, 30e9, 5e9, 16);
    const double f = c.carrier_freq;
    const auto co = ellipse_coeffs(c, f);
    const double d = c.spacing();
    // G(x, 0) ~ 1 - (N d x)^2 / 24 for x = k dtheta.
    const double dt = 1e-3;
    const double g = oracle::kernel(128, d, wavenumber(f) * dt, 0.0);
    CHECK((1 - g) == doctest::Approx(co.sigma1 * dt * dt).epsilon(0.01));
    const double da = 1e-5;
    const double ga = oracle::kernel(128, d, 0.0, wavenumber(f) * da);
    CHECK((1 - ga) == doctest::Approx(co.sigma2 * da * da).epsilon(0.02));
    const PolarLocation fo{0.2, 0.01};
    CHECK(ellipse_gain(c, fo, fo, f) == 1.0);
}

TEST_CASE("combined beamformer peaks at the predicted focus") {
    const SystemConfig c = main_config();
    TdPsParams prm;
    prm.theta_t = -3.0;
    prm.theta_p = 0.784;
    prm.alpha_t = -0.5;
    prm.alpha_p = 0.58;
    for (int m : {1, 300, 700, 1024}) {
        const BeamFocus bf = focus_at_subcarrier(prm, c, m);
        CHECK(bf.subcarrier == m);
        CHECK(bf.theta >= -1.0);
        CHECK(bf.theta <= 1.0);
        const double f = subcarrier_freq(c, m);
        const SteeringVector w = combined_beamformer(prm, c, f);
        CHECK(w.norm() == doctest::Approx(1.0));
        const double g0 = array_gain(w, c, {bf.theta, bf.alpha}, f);
        CHECK(g0 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(tdps_gain(prm, c, {bf.theta, bf.alpha}, f) == doctest::Approx(g0).epsilon(1e-9));
        const double eta = angle_beamwidth(c, f);
        CHECK(array_gain(w, c, {bf.theta + eta, bf.alpha}, f) < 0.75);
    }
}

TEST_CASE("infeasible focus throws, nearest focus clamps") {
    SystemConfig c = oracle::half_wave(64, 30e9, 5e9, 16);
    TdPsParams prm;
    prm.theta_p = 0.5;
    FocusOptions opt;
    opt.forced_p = 5;
    CHECK_THROWS_AS((void)predicted_focus(prm, c, c.carrier_freq, opt), InfeasibleFocus);
    const BeamFocus bf = nearest_focus(prm, c, 8, opt);
    CHECK(bf.clamped);
    CHECK(std::abs(bf.theta) <= 1.0);
}

TEST_CASE("phase matrices reproduce the kernel") {
    const SystemConfig c = oracle::half_wave(100, 30e9, 5e9, 16);
    Eigen::VectorXd x(3), y(2);
    x << -40.0, 3.0, 170.0;
    y << 0.0, 900.0;
    const Eigen::MatrixXd g = (linear_phase_matrix(c, x) * quadratic_phase_matrix(c, y)).cwiseAbs();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) CHECK(g(i, j) == doctest::Approx(oracle::kernel(100, c.spacing(), x[i], y[j])).epsilon(1e-12));
}
