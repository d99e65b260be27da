#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loopkit/pdn.hpp"

using namespace loopkit;
using Catch::Approx;

TEST_CASE("ideal 470 uF branch at 1 kHz") {
    const CapBranch b{470e-6, 0.0, 0.0};
    const TransferFunction z = branch_impedance(b);
    const Complex v = evaluate(z, 1000.0);
    CHECK(std::abs(v) == Approx(0.33863).margin(5e-5));
    CHECK(std::arg(v) * 180.0 / M_PI == Approx(-90.0).margin(1e-9));
}

TEST_CASE("self-resonance: |Z| equals the ESR") {
    const CapBranch b{470e-6, 0.025, 1e-9};
    const double f_sr = b.self_resonance_hz();
    CHECK(f_sr == Approx(232.1e3).epsilon(1e-3));  // 1/(2*pi*6.856e-7 s)
    const TransferFunction z = branch_impedance(b);
    CHECK(std::abs(evaluate(z, f_sr)) == Approx(0.025).epsilon(1e-9));
}

TEST_CASE("high-frequency asymptote is the ESR when ESL is zero") {
    const CapBranch b{1.0, 1.0, 0.0};
    const TransferFunction z = branch_impedance(b);
    CHECK(std::abs(evaluate(z, 1e9)) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bank of ten ideal 470 uF capacitors scales by 1/10") {
    const CapBank bank{{{CapBranch{470e-6, 0.0, 0.0}, 10}}};
    const Complex v = evaluate(bank_impedance(bank), 1000.0);
    CHECK(std::abs(v) == Approx(0.033863).margin(5e-6));
}

TEST_CASE("bank with a single entry equals the branch") {
    const CapBranch b{330e-6, 0.015, 1.5e-9};
    const CapBank bank{{{b, 1}}};
    CHECK(bank_impedance(bank) == branch_impedance(b));
}

TEST_CASE("low-frequency asymptote of a paired electrolytic bank") {
    // two (1 F, 1 ohm) branches: at 1e-6 Hz the pair is capacitive, |Z| = 1/(2*pi*f*2)
    const CapBank bank{{{CapBranch{1.0, 1.0, 0.0}, 2}}};
    const double f = 1e-6;
    const Complex v = evaluate(bank_impedance(bank), f);
    const Complex direct =
        (Complex(1.0, 0.0) + Complex(0.0, -1.0 / (2.0 * M_PI * f * 1.0))) / 2.0;
    CHECK(std::abs(v - direct) < 1e-9 * std::abs(direct));
    CHECK(std::arg(v) * 180.0 / M_PI == Approx(-90.0).margin(0.001));
    CHECK(std::abs(v) == Approx(1.0 / (2.0 * M_PI * f * 2.0)).epsilon(1e-6));
}

TEST_CASE("parallel of the Eq-3 resistor pair") {
    const TransferFunction r100 = TransferFunction::constant(100.0);
    const TransferFunction rcomp = TransferFunction::constant(20.3824);
    CHECK(parallel(r100, rcomp).dc_gain() == Approx(16.9314).margin(5e-5));
}

TEST_CASE("series with zero and parallel with self") {
    const TransferFunction z = branch_impedance(CapBranch{10e-6, 0.05, 1e-9});
    CHECK(series(z, TransferFunction()) == z);
    const TransferFunction half = parallel(z, z);
    for (double f : {100.0, 1e4, 1e6}) {
        const Complex expect = evaluate(z, f) / 2.0;
        CHECK(std::abs(evaluate(half, f) - expect) < 1e-10 * std::abs(expect));
    }
}

TEST_CASE("degenerate parallel combination throws") {
    const TransferFunction plus = TransferFunction::constant(1.0);
    const TransferFunction minus = TransferFunction::constant(-1.0);
    CHECK_THROWS_AS(parallel(plus, minus), DegenerateParallel);
}

TEST_CASE("property: N-scaling of identical branches") {
    std::mt19937 rng(55101);
    std::uniform_real_distribution<double> cap(1e-6, 1e-2);
    std::uniform_real_distribution<double> esr(0.0, 0.5);
    std::uniform_real_distribution<double> esl(0.0, 5e-9);
    for (int trial = 0; trial < 20; ++trial) {
        const CapBranch b{cap(rng), esr(rng), esl(rng)};
        const int n = 1 + static_cast<int>(rng() % 12);
        const CapBank bank{{{b, n}}};
        const TransferFunction zb = branch_impedance(b);
        const TransferFunction zn = bank_impedance(bank);
        for (int i = 0; i < 100; ++i) {
            const double f = std::pow(10.0, 5.0 * i / 99.0);
            const Complex expect = evaluate(zb, f) / static_cast<double>(n);
            CHECK(std::abs(evaluate(zn, f) - expect) <= 1e-10 * std::abs(expect));
        }
    }
}

TEST_CASE("property: passivity of branches and banks") {
    std::mt19937 rng(88332);
    std::uniform_real_distribution<double> cap(1e-7, 1e-2);
    std::uniform_real_distribution<double> esr(0.0, 1.0);
    std::uniform_real_distribution<double> esl(0.0, 1e-8);
    for (int trial = 0; trial < 15; ++trial) {
        CapBank bank;
        const int entries = 1 + static_cast<int>(rng() % 3);
        for (int e = 0; e < entries; ++e)
            bank.entries.push_back({CapBranch{cap(rng), esr(rng), esl(rng)},
                                    1 + static_cast<int>(rng() % 8)});
        const TransferFunction z = bank_impedance(bank);
        for (int i = 0; i < 120; ++i) {
            const double f = std::pow(10.0, -1.0 + 8.0 * i / 119.0);
            CHECK(evaluate(z, f).real() >= -1e-12);
        }
    }
}

TEST_CASE("property: adding an ideal branch never raises the magnitude") {
    std::mt19937 rng(13717);
    std::uniform_real_distribution<double> cap(1e-6, 1e-3);
    for (int trial = 0; trial < 15; ++trial) {
        CapBank bank{{{CapBranch{cap(rng), 0.0, 0.0}, 1 + static_cast<int>(rng() % 5)}}};
        CapBank bigger = bank;
        bigger.entries.push_back({CapBranch{cap(rng), 0.0, 0.0}, 1});
        const TransferFunction z0 = bank_impedance(bank);
        const TransferFunction z1 = bank_impedance(bigger);
        for (int i = 0; i < 80; ++i) {
            const double f = std::pow(10.0, 8.0 * i / 79.0);
            CHECK(std::abs(evaluate(z1, f)) <= std::abs(evaluate(z0, f)) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("validation rejects non-physical branches") {
    CHECK_THROWS_AS(branch_impedance(CapBranch{0.0, 0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(branch_impedance(CapBranch{1e-6, -0.1, 0.0}), ValidationError);
    CHECK_THROWS_AS(bank_impedance(CapBank{}), ValidationError);
    CHECK_THROWS_AS(bank_impedance(CapBank{{{CapBranch{1e-6, 0.0, 0.0}, 0}}}),
                    ValidationError);
}
