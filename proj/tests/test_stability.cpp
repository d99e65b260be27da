#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loopkit/stability.hpp"

using namespace loopkit;
using Catch::Approx;

namespace {

TransferFunction cubed_lag(double gain) {
    // gain/(s+1)^3 in rad/s: corner at 1/(2*pi) Hz
    return TransferFunction(Polynomial{gain}, Polynomial{1.0, 3.0, 3.0, 1.0});
}

}  // namespace

TEST_CASE("sweep: first-order corner point") {
    const double fc = 1200.0;
    const double w = 2.0 * M_PI * fc;
    const TransferFunction tf(Polynomial{1.0}, Polynomial{1.0, 1.0 / w});
    const BodeData b = sweep(tf, fc / 100.0, fc * 100.0, 200);
    // sample nearest the corner
    std::size_t at = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (std::abs(std::log10(b.freqs_hz[i] / fc)) <
            std::abs(std::log10(b.freqs_hz[at] / fc)))
            at = i;
    CHECK(b.mag_db[at] == Approx(-3.0103).margin(0.02));
    CHECK(b.phase_deg[at] == Approx(-45.0).margin(0.4));
}

TEST_CASE("sweep: double integrator has flat -180 phase, -40 dB/decade") {
    const TransferFunction tf(Polynomial{1.0}, Polynomial{0.0, 0.0, 1.0});
    const BodeData b = sweep(tf, 0.1, 1000.0, 100);
    for (double p : b.phase_deg) CHECK(p == Approx(-180.0).margin(1e-9));
    const double slope = (b.mag_db.back() - b.mag_db.front()) /
                         std::log10(b.freqs_hz.back() / b.freqs_hz.front());
    CHECK(slope == Approx(-40.0).margin(1e-9));
}

TEST_CASE("sweep: unwrapped phase of a triple pole crosses -180 at the analytic point") {
    const BodeData b = sweep(cubed_lag(8.0), 1e-3, 100.0, 400);
    const StabilityReport r = margins(b);
    REQUIRE(r.has_phase_crossover());
    CHECK(r.phase_crossover_hz.front() == Approx(std::sqrt(3.0) / (2.0 * M_PI)).epsilon(0.005));
}

TEST_CASE("sweep input validation") {
    const TransferFunction tf = TransferFunction::constant(1.0);
    CHECK_THROWS_AS(sweep(tf, -1.0, 10.0, 100), Error);
    CHECK_THROWS_AS(sweep(tf, 10.0, 10.0, 100), Error);
    CHECK_THROWS_AS(sweep(tf, 1.0, 10.0, 5), Error);
}

TEST_CASE("margins: integrator loop has PM 90 and infinite GM") {
    const TransferFunction t(Polynomial{2.0 * M_PI * 100.0}, Polynomial{0.0, 1.0});
    const StabilityReport r = margins(sweep(t, 1.0, 1e4, 200));
    REQUIRE(r.has_gain_crossover());
    CHECK(r.phase_margin_deg == Approx(90.0).margin(0.05));
    CHECK(std::isinf(r.gain_margin_db));
    CHECK(!r.has_phase_crossover());
    CHECK(r.gain_crossover_hz.front() == Approx(100.0).epsilon(0.002));
}

TEST_CASE("margins: marginal triple-pole loop reads zero at the analytic frequency") {
    const StabilityReport r = margins(sweep(cubed_lag(8.0), 1e-3, 100.0, 400));
    REQUIRE(r.has_phase_crossover());
    CHECK(r.gain_margin_db == Approx(0.0).margin(0.05));
    CHECK(r.phase_crossover_hz.front() == Approx(0.27566).epsilon(0.005));
    CHECK(r.phase_margin_deg == Approx(0.0).margin(0.5));
    CHECK(r.marginal);
}

TEST_CASE("margins: 1/(s(s+1)) phase margin is 51.83 degrees") {
    // rad/s plant; gain crossover at w = 0.7862 rad/s
    const TransferFunction t(Polynomial{1.0}, Polynomial{0.0, 1.0, 1.0});
    const StabilityReport r = margins(sweep(t, 1e-3, 10.0, 400));
    REQUIRE(r.has_gain_crossover());
    CHECK(r.phase_margin_deg == Approx(51.83).margin(0.2));
    CHECK(r.pm_at_hz == Approx(0.7862 / (2.0 * M_PI)).epsilon(0.005));
}

TEST_CASE("margins: no crossings reports +inf margins") {
    const TransferFunction t = TransferFunction::constant(0.1);
    const StabilityReport r = margins(sweep(t, 10.0, 1e5, 100));
    CHECK(std::isinf(r.gain_margin_db));
    CHECK(std::isinf(r.phase_margin_deg));
    CHECK(r.gain_crossover_hz.empty());
    CHECK(r.phase_crossover_hz.empty());
    CHECK(r.margins_positive());
}

TEST_CASE("pole_stable: integrator closes stably, hot triple pole does not") {
    const TransferFunction one = TransferFunction::constant(1.0);
    const TransferFunction integ(Polynomial{1.0}, Polynomial{0.0, 1.0});
    CHECK(pole_stable(integ, one));

    // GM was 0 dB at gain 8; 25% hotter must be unstable, half gain stable
    CHECK_FALSE(pole_stable(cubed_lag(10.0), one));
    CHECK(pole_stable(cubed_lag(4.0), one));
}

TEST_CASE("property: unwrap of (s+1)^-n settles at -90 n degrees") {
    for (int n = 1; n <= 6; ++n) {
        Polynomial den{1.0};
        for (int i = 0; i < n; ++i) den = den * Polynomial{1.0, 1.0};
        const TransferFunction tf(Polynomial{1.0}, den);
        const double corner_hz = 1.0 / (2.0 * M_PI);
        const BodeData b = sweep(tf, corner_hz * 1e-2, corner_hz * 1e4, 200);
        CHECK(b.phase_deg.back() == Approx(-90.0 * n).margin(1.0));
    }
}

TEST_CASE("property: margins invariant under grid doubling") {
    const TransferFunction t(Polynomial{50.0},
                             Polynomial{1.0, 3.0, 3.0, 1.0});  // 50/(s+1)^3 rad/s
    const StabilityReport a = margins(sweep(t, 1e-3, 100.0, 200));
    const StabilityReport b = margins(sweep(t, 1e-3, 100.0, 400));
    CHECK(a.gain_margin_db == Approx(b.gain_margin_db).margin(0.05));
    CHECK(a.phase_margin_deg == Approx(b.phase_margin_deg).margin(0.2));
}

TEST_CASE("property: margin sign matches pole stability over random plants") {
    std::mt19937 rng(618033);
    std::uniform_real_distribution<double> gain(0.2, 300.0);
    std::uniform_real_distribution<double> corner(50.0, 2e5);
    std::uniform_real_distribution<double> quality(0.4, 4.0);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        // all-pole minimum-phase forward path: 1-2 first-order + one LC pair
        Polynomial den{1.0};
        const int singles = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < singles; ++i)
            den = den * Polynomial{1.0, 1.0 / (2.0 * M_PI * corner(rng))};
        const double w0 = 2.0 * M_PI * corner(rng);
        const double q = quality(rng);
        den = den * Polynomial{1.0, 1.0 / (q * w0), 1.0 / (w0 * w0)};
        const TransferFunction t(Polynomial::constant(gain(rng)), den);

        const StabilityReport r = margins(sweep(t, 1.0, 1e7, 200));
        if (r.marginal) continue;  // declared exclusion band
        const bool margin_says_stable = r.margins_positive();
        const bool truth = pole_stable(t, TransferFunction::constant(1.0));
        INFO("trial " << trial);
        CHECK(margin_says_stable == truth);
        ++checked;
    }
    CHECK(checked >= 450);
}

TEST_CASE("interpolated crossover error stays below 0.5% at 100 ppd") {
    const StabilityReport r = margins(sweep(cubed_lag(8.0), 1e-3, 100.0, 100));
    REQUIRE(r.has_phase_crossover());
    const double truth = std::sqrt(3.0) / (2.0 * M_PI);
    CHECK(std::abs(r.phase_crossover_hz.front() - truth) / truth < 0.005);
}
