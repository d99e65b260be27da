#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "loopkit/polynomial.hpp"

namespace loopkit {

/// Rational function of the complex frequency s with real coefficients.
/// Canonical form: denominator leading coefficient is 1, and any monomial
/// factor s^k exactly common to numerator and denominator is divided out
/// (no general GCD cancellation; near pole-zero pairs are kept).
class TransferFunction {
public:
    TransferFunction() : num_{0.0}, den_{1.0} {}

    TransferFunction(Polynomial num, Polynomial den)
        : num_(std::move(num)), den_(std::move(den)) {
        canonicalize();
    }

    static TransferFunction constant(double k) {
        return TransferFunction(Polynomial::constant(k), Polynomial::constant(1.0));
    }

    /// 1/(s C) in ohms for C in farads; handy leaf for impedance composition.
    static TransferFunction capacitor(double farads) {
        return TransferFunction(Polynomial{1.0}, Polynomial{0.0, farads});
    }

    /// R + s L in ohms.
    static TransferFunction series_rl(double ohms, double henries) {
        return TransferFunction(Polynomial{ohms, henries}, Polynomial{1.0});
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }

    /// num degree <= den degree; realizable as a state-space model.
    bool is_proper() const { return num_.degree() <= den_.degree(); }

    /// Value at s = 0 (requires den(0) != 0).
    double dc_gain() const {
        const double d0 = den_.coeffs()[0];
        if (d0 == 0.0) throw PoleOnAxis("transfer function has a pole at s = 0");
        return num_.coeffs()[0] / d0;
    }

    /// Evaluation at an arbitrary complex point.
    Complex at(Complex s) const {
        const Complex d = den_(s);
        if (std::abs(d) < 1e-300)
            throw PoleOnAxis("denominator vanishes at the evaluation point");
        return num_(s) / d;
    }

    TransferFunction reciprocal() const {
        if (num_.is_zero()) throw DegenerateLoop("reciprocal of the zero transfer function");
        return TransferFunction(den_, num_);
    }

    bool operator==(const TransferFunction& o) const {
        return num_ == o.num_ && den_ == o.den_;
    }

private:
    void canonicalize() {
        if (den_.is_zero()) throw Error("transfer function denominator is zero");
        if (num_.is_zero()) {
            num_ = Polynomial{0.0};
            den_ = Polynomial{1.0};
            return;
        }
        const int k = std::min(num_.trailing_zero_power(), den_.trailing_zero_power());
        if (k > 0) {
            num_ = num_.shifted_down(k);
            den_ = den_.shifted_down(k);
        }
        const double lead = den_.leading();
        num_ = num_ * (1.0 / lead);
        den_ = den_ * (1.0 / lead);
    }

    Polynomial num_;
    Polynomial den_;
};

/// num(j 2π f) / den(j 2π f) via Horner on both polynomials.
inline Complex evaluate(const TransferFunction& tf, double f_hz) {
    if (!(f_hz > 0.0)) throw Error("evaluation frequency must be positive");
    return tf.at(Complex(0.0, 2.0 * M_PI * f_hz));
}

inline TransferFunction mul(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(a.num() * b.num(), a.den() * b.den());
}

inline TransferFunction add(const TransferFunction& a, const TransferFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den() == b.den())
        return TransferFunction(a.num() + b.num(), a.den());
    return TransferFunction(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
}

inline TransferFunction sub(const TransferFunction& a, const TransferFunction& b) {
    return add(a, TransferFunction(b.num() * -1.0, b.den()));
}

inline TransferFunction scale(const TransferFunction& a, double k) {
    return TransferFunction(a.num() * k, a.den());
}

/// Characteristic polynomial of the closed loop: den(g)·den(h) + num(g)·num(h).
/// Kept uncancelled so stability checks see every pole.
inline Polynomial characteristic_polynomial(const TransferFunction& g,
                                            const TransferFunction& h) {
    return g.den() * h.den() + g.num() * h.num();
}

/// Negative-feedback closure g/(1 + g·h); poles are the characteristic roots.
inline TransferFunction feedback_close(const TransferFunction& g,
                                       const TransferFunction& h) {
    Polynomial chi = characteristic_polynomial(g, h);
    if (chi.is_zero())
        throw DegenerateLoop("1 + g*h is identically zero");
    return TransferFunction(g.num() * h.den(), std::move(chi));
}

/// All denominator roots (system poles), deterministic (real, imag) order.
inline std::vector<Complex> poles(const TransferFunction& tf) {
    if (tf.den().degree() < 1) throw Error("poles requested of a degree-0 denominator");
    return polynomial_roots(tf.den());
}

inline std::vector<Complex> zeros(const TransferFunction& tf) {
    if (tf.num().degree() < 1) return {};
    return polynomial_roots(tf.num());
}

/// Swept complex response samples; frequencies strictly ascending, all > 0.
struct FrequencyResponse {
    std::vector<double> freqs_hz;
    std::vector<Complex> values;

    void validate() const {
        if (freqs_hz.size() != values.size())
            throw Error("frequency response length mismatch");
        if (freqs_hz.size() < 2) throw Error("frequency response needs at least 2 points");
        for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
            if (!(freqs_hz[i] > 0.0)) throw Error("frequencies must be positive");
            if (i > 0 && !(freqs_hz[i] > freqs_hz[i - 1]))
                throw NonMonotonicFrequency("frequencies must be strictly increasing");
        }
    }
};

}  // namespace loopkit
