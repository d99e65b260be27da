#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <vector>

#include "loopkit/errors.hpp"

namespace loopkit {

using Complex = std::complex<double>;

/// Hard cap on polynomial degree; monomial-basis conditioning collapses beyond this.
inline constexpr int kMaxDegree = 32;

/// Trailing coefficients below this fraction of the max-magnitude coefficient
/// are trimmed during canonicalization.
inline constexpr double kCoeffTrimRel = 1e-12;

/// Real-coefficient polynomial in ascending power order: coeffs[k] multiplies s^k.
/// Always canonical: the last coefficient is nonzero unless this is the zero
/// polynomial, which is stored as the single coefficient [0].
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    Polynomial(std::initializer_list<double> c) : coeffs_(c) { canonicalize(); }

    explicit Polynomial(std::vector<double> c) : coeffs_(std::move(c)) { canonicalize(); }

    static Polynomial constant(double v) { return Polynomial{v}; }

    /// Monomial s^k.
    static Polynomial monomial(int k, double scale = 1.0) {
        std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
        c.back() = scale;
        return Polynomial(std::move(c));
    }

    const std::vector<double>& coeffs() const { return coeffs_; }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    double leading() const { return coeffs_.back(); }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Horner evaluation at a complex point.
    Complex operator()(Complex s) const {
        Complex acc(coeffs_.back(), 0.0);
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
            acc = acc * s + *it;
        return acc;
    }

    double operator()(double x) const {
        double acc = coeffs_.back();
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (degree() == 0) return Polynomial{0.0};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

    Polynomial operator+(const Polynomial& o) const {
        std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) c[k] += o.coeffs_[k];
        return Polynomial(std::move(c));
    }

    Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }

    Polynomial operator*(const Polynomial& o) const {
        if (is_zero() || o.is_zero()) return Polynomial{};
        const int deg = degree() + o.degree();
        if (deg > kMaxDegree)
            throw DegreeCapExceeded("polynomial product degree " + std::to_string(deg) +
                                    " exceeds cap " + std::to_string(kMaxDegree));
        std::vector<double> c(static_cast<std::size_t>(deg) + 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
                c[i + j] += coeffs_[i] * o.coeffs_[j];
        return Polynomial(std::move(c));
    }

    Polynomial operator*(double k) const {
        std::vector<double> c(coeffs_);
        for (double& v : c) v *= k;
        return Polynomial(std::move(c));
    }

    bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

    /// Number of exactly-zero low-order coefficients (the monomial factor s^k).
    int trailing_zero_power() const {
        if (is_zero()) return 0;
        int k = 0;
        while (coeffs_[static_cast<std::size_t>(k)] == 0.0) ++k;
        return k;
    }

    /// Divide out s^k; requires the k lowest coefficients to be exactly zero.
    Polynomial shifted_down(int k) const {
        if (k == 0) return *this;
        std::vector<double> c(coeffs_.begin() + k, coeffs_.end());
        return Polynomial(std::move(c));
    }

private:
    void canonicalize() {
        if (coeffs_.empty()) throw Error("polynomial needs at least one coefficient");
        for (double c : coeffs_)
            if (!std::isfinite(c)) throw Error("polynomial coefficient not finite");
        if (static_cast<int>(coeffs_.size()) - 1 > kMaxDegree)
            throw DegreeCapExceeded("polynomial degree " +
                                    std::to_string(coeffs_.size() - 1) + " exceeds cap " +
                                    std::to_string(kMaxDegree));
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        const double tol = m * kCoeffTrimRel;
        while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= tol)
            coeffs_.pop_back();
        if (coeffs_.size() == 1 && std::abs(coeffs_[0]) <= tol) coeffs_[0] = 0.0;
    }

    std::vector<double> coeffs_;
};

inline Polynomial operator*(double k, const Polynomial& p) { return p * k; }

/// Real-coefficient polynomial from a conjugate-closed root set.
/// Real roots become linear factors; conjugate pairs become quadratic factors,
/// so the result has exactly real coefficients.
inline Polynomial polynomial_from_roots(std::vector<Complex> roots, double leading = 1.0) {
    Polynomial p = Polynomial::constant(leading);
    constexpr double imag_tol = 1e-14;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        const Complex r = roots[i];
        if (std::abs(r.imag()) <= imag_tol * (1.0 + std::abs(r.real()))) {
            p = p * Polynomial{-r.real(), 1.0};
            used[i] = true;
            continue;
        }
        // find the conjugate partner
        std::size_t partner = roots.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(r));
            if (d < best) {
                best = d;
                partner = j;
            }
        }
        if (partner == roots.size() || best > 1e-9 * (1.0 + std::abs(r)))
            throw Error("root set is not conjugate-closed");
        used[i] = used[partner] = true;
        p = p * Polynomial{std::norm(r), -2.0 * r.real(), 1.0};
    }
    return p;
}

namespace detail {

using ComplexL = std::complex<long double>;

/// Extended-precision Horner; the extra mantissa bits matter when pinning
/// multiple roots, where p(z) is dominated by cancellation.
inline ComplexL horner_ld(const std::vector<double>& c, ComplexL z) {
    ComplexL acc(c.back(), 0.0L);
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it)
        acc = acc * z + static_cast<long double>(*it);
    return acc;
}

/// Backward-error scale Σ|a_k||z|^k; |p(z)| small against this means z is an
/// exact root of a nearby polynomial.
inline double residual_scale(const std::vector<double>& c, Complex z) {
    const double az = std::abs(z);
    double scale = 0.0;
    double zp = 1.0;
    for (double a : c) {
        scale += std::abs(a) * zp;
        zp *= az;
    }
    return std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace detail

/// All complex roots of p, multiplicities repeated, ordered by (real, imag).
///
/// Aberth-Ehrlich simultaneous iteration with deterministic initial points,
/// followed by a cluster-averaging pass: groups of roots tighter than 1e-5
/// (relative) are collapsed onto their centroid, which recovers most of the
/// accuracy a multiple root loses to cancellation.
///
/// Every returned root satisfies |p(root)| < 1e-8 * Σ|a_k||root|^k, else
/// ConvergenceFailure is thrown.
inline std::vector<Complex> polynomial_roots(const Polynomial& p, int max_iter = 400) {
    if (p.is_zero()) throw Error("roots of the zero polynomial are undefined");
    std::vector<Complex> out;

    // exact roots at the origin first
    const int k0 = p.trailing_zero_power();
    Polynomial q = p.shifted_down(k0);
    for (int i = 0; i < k0; ++i) out.emplace_back(0.0, 0.0);

    const int n = q.degree();
    if (n == 0) {
        std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return out;
    }

    const std::vector<double>& c = q.coeffs();
    if (n == 1) {
        out.emplace_back(-c[0] / c[1], 0.0);
    } else if (n == 2) {
        // stable quadratic formula
        const double a = c[2], b = c[1], c0 = c[0];
        const double disc = b * b - 4.0 * a * c0;
        if (disc >= 0.0) {
            const double r = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            const double x1 = (b != 0.0 || c0 != 0.0) && r != 0.0 ? c0 / r : 0.0;
            const double x0 = r / a;
            out.emplace_back(x0, 0.0);
            out.emplace_back(b == 0.0 && c0 == 0.0 ? 0.0 : x1, 0.0);
        } else {
            const double re = -b / (2.0 * a);
            const double im = std::sqrt(-disc) / (2.0 * a);
            out.emplace_back(re, im);
            out.emplace_back(re, -im);
        }
    } else {
        // Aberth-Ehrlich on the deflated polynomial
        using detail::ComplexL;
        std::vector<ComplexL> z(static_cast<std::size_t>(n));
        const double an = std::abs(c.back());
        double cauchy = 0.0;
        for (int k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(c[k]) / an);
        const double r_hi = 1.0 + cauchy;
        const double r_lo = std::abs(c[0]) > 0.0
                                ? std::pow(std::abs(c[0]) / an, 1.0 / n)
                                : 0.5 * r_hi;
        const double radius = std::clamp(r_lo, 1e-3 * r_hi, r_hi);
        constexpr double kAngleOffset = 0.376894;  // keeps start points off the axes
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * M_PI * i / n + kAngleOffset;
            z[static_cast<std::size_t>(i)] =
                ComplexL(radius * std::cos(th), radius * std::sin(th));
        }

        std::vector<double> dc(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            dc[k - 1] = c[k] * static_cast<double>(k);

        bool converged = false;
        for (int iter = 0; iter < max_iter && !converged; ++iter) {
            long double worst = 0.0L;
            for (int i = 0; i < n; ++i) {
                const ComplexL zi = z[static_cast<std::size_t>(i)];
                const ComplexL pv = detail::horner_ld(c, zi);
                if (pv == ComplexL(0.0L, 0.0L)) continue;
                const ComplexL dv = detail::horner_ld(dc, zi);
                ComplexL ratio = dv == ComplexL(0.0L, 0.0L)
                                     ? ComplexL(0.0L, 0.0L)
                                     : pv / dv;
                ComplexL sum(0.0L, 0.0L);
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const ComplexL d = zi - z[static_cast<std::size_t>(j)];
                    if (d != ComplexL(0.0L, 0.0L)) sum += ComplexL(1.0L, 0.0L) / d;
                }
                ComplexL w;
                if (ratio == ComplexL(0.0L, 0.0L)) {
                    // p'(z)=0 away from a root: nudge off the stationary point
                    w = ComplexL(1e-3L, 1e-3L) * (std::abs(zi) + 1.0L);
                    if (dv != ComplexL(0.0L, 0.0L)) w = pv / dv;
                } else {
                    const ComplexL denom = ComplexL(1.0L, 0.0L) - ratio * sum;
                    w = denom == ComplexL(0.0L, 0.0L) ? ratio : ratio / denom;
                }
                z[static_cast<std::size_t>(i)] = zi - w;
                const long double rel =
                    std::abs(w) / std::max<long double>(1.0L, std::abs(zi));
                worst = std::max(worst, rel);
            }
            converged = worst < 1e-16L;
        }

        for (int i = 0; i < n; ++i)
            out.push_back(Complex(static_cast<double>(z[static_cast<std::size_t>(i)].real()),
                                  static_cast<double>(z[static_cast<std::size_t>(i)].imag())));
    }

    // cluster-average pass: collapse groups tighter than the multiple-root
    // resolution limit onto their centroid (multiplicity preserved)
    const std::size_t m = out.size();
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double tol =
                1e-5 * std::max(1.0, std::max(std::abs(out[i]), std::abs(out[j])));
            if (std::abs(out[i] - out[j]) < tol) parent[find(i)] = find(j);
        }
    std::vector<Complex> polished(m);
    for (std::size_t i = 0; i < m; ++i) {
        Complex sum(0, 0);
        int cnt = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (find(j) == find(i)) {
                sum += out[j];
                ++cnt;
            }
        polished[i] = sum / static_cast<double>(cnt);
    }
    out = std::move(polished);

    const std::vector<double>& full = p.coeffs();
    for (Complex r : out) {
        const double res = std::abs(p(r)) / detail::residual_scale(full, r);
        if (!(res < 1e-8))
            throw ConvergenceFailure("root residual " + std::to_string(res) +
                                     " exceeds 1e-8 after " + std::to_string(max_iter) +
                                     " iterations");
    }

    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

}  // namespace loopkit
