#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "loopkit/transfer_function.hpp"

namespace loopkit {

/// Swept magnitude/phase. Phase is unwrapped: adjacent samples never differ
/// by a wrap, so crossings of -180° (and its 360° aliases) are well defined.
struct BodeData {
    std::vector<double> freqs_hz;
    std::vector<double> mag_db;
    std::vector<double> phase_deg;

    std::size_t size() const { return freqs_hz.size(); }

    void validate() const {
        if (freqs_hz.size() != mag_db.size() || freqs_hz.size() != phase_deg.size())
            throw Error("bode data length mismatch");
        if (freqs_hz.size() < 2) throw Error("bode data needs at least 2 points");
        for (std::size_t i = 1; i < freqs_hz.size(); ++i) {
            if (!(freqs_hz[i] > freqs_hz[i - 1]))
                throw NonMonotonicFrequency("bode frequencies must be strictly increasing");
            if (std::abs(phase_deg[i] - phase_deg[i - 1]) >= 180.0)
                throw GridTooCoarse("unwrapped phase step reaches 180 degrees");
        }
    }
};

/// A single margin reading at a located crossover.
struct MarginPoint {
    double freq_hz = 0.0;
    double margin = 0.0;  // dB for gain margin, degrees for phase margin
};

/// Extracted stability metrics. Margins are +inf when the corresponding
/// crossover never occurs inside the swept band.
struct StabilityReport {
    double gain_margin_db = std::numeric_limits<double>::infinity();
    double phase_margin_deg = std::numeric_limits<double>::infinity();
    double gm_at_hz = 0.0;  // phase-crossover frequency of the worst gain margin
    double pm_at_hz = 0.0;  // gain-crossover frequency of the worst phase margin
    std::vector<double> gain_crossover_hz;   // |T| = 0 dB
    std::vector<double> phase_crossover_hz;  // phase = -180° (mod 360)
    std::vector<MarginPoint> gain_margins;   // one per phase crossover
    std::vector<MarginPoint> phase_margins;  // one per gain crossover
    bool marginal = false;  // worst margin inside the ±0.1 dB / ±0.5° band
    std::optional<bool> pole_stable;

    bool has_gain_crossover() const { return !gain_crossover_hz.empty(); }
    bool has_phase_crossover() const { return !phase_crossover_hz.empty(); }

    /// Positive worst-case margins (never marginal, never +inf ambiguity issues
    /// for the caller): true iff every located crossing leaves positive margin.
    bool margins_positive() const {
        return gain_margin_db > 0.0 && phase_margin_deg > 0.0;
    }
};

/// Margins inside this band of zero are flagged marginal rather than trusted.
inline constexpr double kMarginalGainDb = 0.1;
inline constexpr double kMarginalPhaseDeg = 0.5;

namespace detail {

inline std::vector<double> log_grid(double f_min, double f_max, int points_per_decade) {
    const double decades = std::log10(f_max / f_min);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    std::vector<double> f(static_cast<std::size_t>(n));
    const double l0 = std::log10(f_min);
    const double l1 = std::log10(f_max);
    for (int i = 0; i < n; ++i)
        f[static_cast<std::size_t>(i)] = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
    f.front() = f_min;
    f.back() = f_max;
    return f;
}

inline std::vector<double> unwrap_degrees(const std::vector<double>& raw) {
    std::vector<double> out(raw.size());
    out[0] = raw[0];
    for (std::size_t i = 1; i < raw.size(); ++i) {
        double d = raw[i] - raw[i - 1];
        while (d > 180.0) d -= 360.0;
        while (d < -180.0) d += 360.0;
        out[i] = out[i - 1] + d;
    }
    return out;
}

/// Linear interpolation of the crossing abscissa in (log f, y) coordinates.
inline double interp_crossing_hz(double f0, double f1, double y0, double y1, double level) {
    const double t = (level - y0) / (y1 - y0);
    return std::pow(10.0, std::log10(f0) + t * (std::log10(f1) - std::log10(f0)));
}

inline double interp_at_hz(const std::vector<double>& f, const std::vector<double>& y,
                           double f_q) {
    if (f_q <= f.front()) return y.front();
    if (f_q >= f.back()) return y.back();
    const auto it = std::upper_bound(f.begin(), f.end(), f_q);
    const std::size_t i = static_cast<std::size_t>(it - f.begin());
    const double t =
        (std::log10(f_q) - std::log10(f[i - 1])) / (std::log10(f[i]) - std::log10(f[i - 1]));
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace detail

/// Log-spaced magnitude/phase sweep with phase unwrapping. The grid is
/// refined (density doubled, at most 3 times) until no adjacent unwrapped
/// phase step exceeds 90°; a grid that still fails is reported rather than
/// silently trusted.
inline BodeData sweep(const TransferFunction& tf, double f_min_hz, double f_max_hz,
                      int points_per_decade = 200) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz))
        throw Error("sweep needs 0 < f_min < f_max");
    if (points_per_decade < 10) throw Error("sweep needs at least 10 points per decade");

    int ppd = points_per_decade;
    for (int attempt = 0;; ++attempt) {
        BodeData b;
        b.freqs_hz = detail::log_grid(f_min_hz, f_max_hz, ppd);
        b.mag_db.resize(b.freqs_hz.size());
        std::vector<double> raw(b.freqs_hz.size());
        for (std::size_t i = 0; i < b.freqs_hz.size(); ++i) {
            const Complex v = evaluate(tf, b.freqs_hz[i]);
            b.mag_db[i] = 20.0 * std::log10(std::max(std::abs(v), 1e-300));
            raw[i] = std::atan2(v.imag(), v.real()) * 180.0 / M_PI;
        }
        b.phase_deg = detail::unwrap_degrees(raw);

        double worst_step = 0.0;
        for (std::size_t i = 1; i < b.phase_deg.size(); ++i)
            worst_step = std::max(worst_step, std::abs(b.phase_deg[i] - b.phase_deg[i - 1]));
        if (worst_step <= 90.0) return b;
        if (attempt == 3)
            throw GridTooCoarse("phase step " + std::to_string(worst_step) +
                                " deg after 3 refinements");
        ppd *= 2;
    }
}

/// Crossover extraction per the -180° convention: gain crossovers are sign
/// changes of mag_db, phase crossovers are crossings of -180° or any 360°
/// alias the unwrapped phase reaches. Each margin is reported per crossing;
/// the worst (minimum) pair is the headline number.
inline StabilityReport margins(const BodeData& b) {
    b.validate();
    StabilityReport r;

    const auto& f = b.freqs_hz;
    const auto& mag = b.mag_db;
    const auto& ph = b.phase_deg;

    for (std::size_t i = 1; i < f.size(); ++i) {
        if ((mag[i - 1] > 0.0 && mag[i] <= 0.0) || (mag[i - 1] < 0.0 && mag[i] >= 0.0) ||
            (mag[i - 1] == 0.0 && mag[i] != 0.0)) {
            const double fx = mag[i] == mag[i - 1]
                                  ? f[i]
                                  : detail::interp_crossing_hz(f[i - 1], f[i], mag[i - 1],
                                                               mag[i], 0.0);
            r.gain_crossover_hz.push_back(fx);
        }
    }

    // phase levels -180°, -540°, ... reachable inside the sweep's phase range;
    // the +180° alias is deliberately not a threshold (lag convention)
    const double ph_min = *std::min_element(ph.begin(), ph.end());
    const double ph_max = *std::max_element(ph.begin(), ph.end());
    std::vector<double> levels;
    for (double level = -180.0; level >= ph_min - 360.0; level -= 360.0)
        if (level <= ph_max) levels.push_back(level);

    for (double level : levels)
        for (std::size_t i = 1; i < f.size(); ++i) {
            const bool crossed = (ph[i - 1] > level && ph[i] <= level) ||
                                 (ph[i - 1] < level && ph[i] >= level);
            if (!crossed) continue;
            const double fx = ph[i] == ph[i - 1]
                                  ? f[i]
                                  : detail::interp_crossing_hz(f[i - 1], f[i], ph[i - 1],
                                                               ph[i], level);
            r.phase_crossover_hz.push_back(fx);
        }
    std::sort(r.phase_crossover_hz.begin(), r.phase_crossover_hz.end());

    for (double fx : r.phase_crossover_hz) {
        const double m = -detail::interp_at_hz(f, mag, fx);
        r.gain_margins.push_back({fx, m});
        if (m < r.gain_margin_db) {
            r.gain_margin_db = m;
            r.gm_at_hz = fx;
        }
    }
    for (double fx : r.gain_crossover_hz) {
        const double phase_at = detail::interp_at_hz(f, ph, fx);
        const double m = 180.0 + phase_at;
        r.phase_margins.push_back({fx, m});
        if (m < r.phase_margin_deg) {
            r.phase_margin_deg = m;
            r.pm_at_hz = fx;
        }
    }

    r.marginal = (r.has_phase_crossover() && std::abs(r.gain_margin_db) <= kMarginalGainDb) ||
                 (r.has_gain_crossover() && std::abs(r.phase_margin_deg) <= kMarginalPhaseDeg);
    return r;
}

/// Sweep-then-extract convenience; also classifies the unity-feedback closed
/// loop by its characteristic roots so the report carries ground truth.
inline StabilityReport margins_of(const TransferFunction& tf, double f_min_hz = 10.0,
                                  double f_max_hz = 10e6, int points_per_decade = 200) {
    StabilityReport r = margins(sweep(tf, f_min_hz, f_max_hz, points_per_decade));
    const Polynomial chi = tf.den() + tf.num();
    if (chi.degree() >= 1) {
        bool stable = true;
        for (Complex p : polynomial_roots(chi))
            if (p.real() >= -1e-9) stable = false;
        r.pole_stable = stable;
    } else {
        r.pole_stable = !chi.is_zero();
    }
    return r;
}

/// Ground-truth closed-loop stability: every root of den(g)den(h)+num(g)num(h)
/// strictly inside the left half plane (margin 1e-9 rad/s).
inline bool pole_stable(const TransferFunction& g, const TransferFunction& h) {
    const Polynomial chi = characteristic_polynomial(g, h);
    if (chi.is_zero()) throw DegenerateLoop("1 + g*h identically zero");
    if (chi.degree() < 1) return true;
    for (Complex p : polynomial_roots(chi))
        if (p.real() >= -1e-9) return false;
    return true;
}

}  // namespace loopkit
