#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "loopkit/polynomial.hpp"

using namespace loopkit;
using Catch::Approx;

TEST_CASE("canonicalization trims trailing near-zeros") {
    Polynomial p{1.0, 2.0, 1e-15};
    CHECK(p.degree() == 1);
    CHECK(p.coeffs() == std::vector<double>{1.0, 2.0});

    Polynomial kept{1.0, 2.0, 1e-10};  // above the 1e-12 relative threshold
    CHECK(kept.degree() == 2);

    Polynomial zero{0.0, 0.0, 0.0};
    CHECK(zero.is_zero());
    CHECK(zero.degree() == 0);
}

TEST_CASE("degree cap is a hard error") {
    std::vector<double> c(34, 1.0);
    CHECK_THROWS_AS(Polynomial(c), DegreeCapExceeded);
    Polynomial a = Polynomial::monomial(20);
    Polynomial b = Polynomial::monomial(20);
    CHECK_THROWS_AS(a * b, DegreeCapExceeded);
}

TEST_CASE("evaluation is Horner on ascending coefficients") {
    Polynomial p{1.0, 0.0, 1.0};  // 1 + s^2
    CHECK(p(2.0) == Approx(5.0));
    const Complex v = p(Complex(0.0, 1.0));
    CHECK(std::abs(v) == Approx(0.0).margin(1e-15));

    Polynomial q{-1.0, 3.0, -3.0, 1.0};  // (s-1)^3
    CHECK(q(Complex(1.0, 0.0)) == Complex(0.0, 0.0));
}

TEST_CASE("arithmetic: sum and convolution product") {
    Polynomial a{1.0, 1.0};
    Polynomial b{2.0, 1.0};
    CHECK((a * b).coeffs() == std::vector<double>{2.0, 3.0, 1.0});
    CHECK((a + b).coeffs() == std::vector<double>{3.0, 2.0});
    CHECK((a - a).is_zero());
    CHECK((a * Polynomial{}).is_zero());
}

TEST_CASE("roots: quadratic with complex pair") {
    const auto r = polynomial_roots(Polynomial{2.0, 2.0, 1.0});  // s^2+2s+2
    REQUIRE(r.size() == 2);
    CHECK(r[0].real() == Approx(-1.0));
    CHECK(r[0].imag() == Approx(-1.0));
    CHECK(r[1].real() == Approx(-1.0));
    CHECK(r[1].imag() == Approx(1.0));
}

TEST_CASE("roots: triple root recovered within 1e-6") {
    const Polynomial p{1.0, 3.0, 3.0, 1.0};  // (s+1)^3 expanded
    const auto r = polynomial_roots(p);
    REQUIRE(r.size() == 3);
    for (const Complex root : r) CHECK(std::abs(root + Complex(1.0, 0.0)) < 1e-6);
}

TEST_CASE("roots: bare integrator") {
    const auto r = polynomial_roots(Polynomial{0.0, 1.0});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == Complex(0.0, 0.0));
}

TEST_CASE("roots: deterministic for a fixed input") {
    const Polynomial p{7.0, -4.0, 2.0, 5.0, 1.0};
    const auto a = polynomial_roots(p);
    const auto b = polynomial_roots(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

// Construction-set oracle: polynomials built from known roots, recovered
// roots matched greedily, error below 1e-6 absolute.
TEST_CASE("roots: random construction sets round-trip") {
    std::mt19937 rng(20260801);
    std::uniform_real_distribution<double> mag(0.5, 1000.0);
    std::uniform_real_distribution<double> angle(0.3, M_PI - 0.3);
    std::uniform_int_distribution<int> pick(0, 2);

    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Complex> truth;
        const int deg = 2 + static_cast<int>(rng() % 7);  // up to 8
        while (static_cast<int>(truth.size()) < deg) {
            const bool want_pair = pick(rng) != 0 && deg - truth.size() >= 2;
            Complex candidate;
            if (want_pair) {
                const double m = mag(rng);
                const double th = angle(rng);
                candidate = Complex(-m * std::cos(th), m * std::sin(th));
            } else {
                candidate = Complex(-mag(rng), 0.0);
            }
            bool separated = true;
            for (Complex t : truth)
                if (std::abs(t - candidate) < 1.0 ||
                    std::abs(t - std::conj(candidate)) < 1.0)
                    separated = false;
            if (!separated) continue;
            truth.push_back(candidate);
            if (candidate.imag() != 0.0) truth.push_back(std::conj(candidate));
        }
        const Polynomial p = polynomial_from_roots(truth);
        auto found = polynomial_roots(p);
        REQUIRE(found.size() == truth.size());

        std::vector<bool> used(found.size(), false);
        for (Complex t : truth) {
            double best = 1e300;
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < found.size(); ++i) {
                if (used[i]) continue;
                const double d = std::abs(found[i] - t);
                if (d < best) {
                    best = d;
                    best_i = i;
                }
            }
            used[best_i] = true;
            INFO("trial " << trial << " root " << t.real() << "+" << t.imag() << "j");
            CHECK(best < 1e-6);
        }
    }
}
