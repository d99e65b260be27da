#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "loopkit/loop_model.hpp"
#include "loopkit/stability.hpp"

namespace loopkit {

/// A synthesized phase-lead network and the margins it achieves. f0_hz is the
/// corner realized by the built (snapped) parts, so recomputing it from
/// (r_comp, c_comp, r_int) reproduces the stored value.
struct CompensationDesign {
    double f0_hz = 0.0;
    double r_comp_ohms = 0.0;
    double c_comp_f = 0.0;
    double r_int_ohms = 0.0;
    StabilityReport achieved;
};

/// Natural frequency of a simple RC network, f0 = 1/(2πRC).
inline double lead_corner(double r_ohms, double c_farads) {
    if (!(r_ohms > 0.0) || !(c_farads > 0.0))
        throw ValidationError("lead_corner needs positive R and C");
    return 1.0 / (2.0 * M_PI * r_ohms * c_farads);
}

/// R_comp = R_int/(2π f0 C R_int - 1): the series resistor that places the
/// lead corner at f0 once the internal R_int parallels it. Infeasible when
/// the denominator is not positive - f0 that low is reachable with R_int
/// alone or not at all.
inline double rcomp_for_f0(double r_int_ohms, double c_comp_farads, double f0_hz) {
    if (!(r_int_ohms > 0.0) || !(c_comp_farads > 0.0) || !(f0_hz > 0.0))
        throw ValidationError("rcomp_for_f0 needs positive arguments");
    const double denom = 2.0 * M_PI * f0_hz * c_comp_farads * r_int_ohms - 1.0;
    if (!(denom > 0.0))
        throw InfeasibleCorner("f0 at or below 1/(2*pi*C*R_int); no series resistor fits");
    return r_int_ohms / denom;
}

/// Corner-placement heuristic: 0.4x the lowest gain-crossover frequency,
/// mirroring the 2 kHz / 5.04 kHz ratio that worked in practice.
inline double pick_f0(const BodeData& uncompensated) {
    const StabilityReport r = margins(uncompensated);
    if (!r.has_gain_crossover())
        throw NoCrossover("no gain crossover in band; nothing to compensate");
    return 0.4 * r.gain_crossover_hz.front();
}

enum class ESeries { E12, E24 };

/// Nearest standard component value by geometric distance.
inline double snap_to_series(double value, ESeries series = ESeries::E24) {
    if (!(value > 0.0)) throw ValidationError("snap_to_series needs a positive value");
    static constexpr std::array<double, 24> e24 = {
        1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
        3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1};
    static constexpr std::array<double, 12> e12 = {1.0, 1.2, 1.5, 1.8, 2.2, 2.7,
                                                   3.3, 3.9, 4.7, 5.6, 6.8, 8.2};
    const double exp10 = std::floor(std::log10(value));
    double best = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    auto consider = [&](double candidate) {
        const double dist = std::abs(std::log10(value / candidate));
        if (dist < best_dist) {
            best_dist = dist;
            best = candidate;
        }
    };
    for (int e = -1; e <= 1; ++e) {
        const double decade = std::pow(10.0, exp10 + e);
        if (series == ESeries::E24)
            for (double m : e24) consider(m * decade);
        else
            for (double m : e12) consider(m * decade);
    }
    return best;
}

struct DesignOptions {
    std::vector<double> c_candidates_f = {1e-6, 2.2e-6, 4.7e-6, 10e-6};
    std::optional<double> f0_hz;       // explicit corner instead of the grid
    int f0_grid_points = 11;           // log-spaced over [0.2, 0.8] x crossover
    ESeries series = ESeries::E24;
    double f_min_hz = 10.0;
    double f_max_hz = 10e6;
    int points_per_decade = 200;
    // margin normalization per the usual design floor: 10 dB and 45 degrees
    double gm_target_db = 10.0;
    double pm_target_deg = 45.0;
};

namespace detail {

inline double margin_objective(const StabilityReport& r, const DesignOptions& opt) {
    return std::min(r.gain_margin_db / opt.gm_target_db,
                    r.phase_margin_deg / opt.pm_target_deg);
}

}  // namespace detail

/// Grid search over candidate capacitors and corner frequencies: for each
/// (C, f0) compute the exact series resistor, snap it to the E-series,
/// re-evaluate margins on the rebuilt loop, and keep the design with the
/// best normalized worst margin. Deterministic: candidates are scanned in
/// ascending order and only a strictly better objective replaces the
/// incumbent, so ties resolve to the smaller C, then the smaller f0.
inline CompensationDesign design_lead(const SupplyModel& plant, DesignOptions opt = {}) {
    if (opt.c_candidates_f.empty())
        throw NoFeasibleDesign("no candidate capacitors supplied");
    std::sort(opt.c_candidates_f.begin(), opt.c_candidates_f.end());

    const TransferFunction t0 = loop_gain(plant.build());
    const StabilityReport base =
        margins_of(t0, opt.f_min_hz, opt.f_max_hz, opt.points_per_decade);
    if (!base.has_gain_crossover())
        throw NoCrossover("uncompensated loop never crosses 0 dB in band");
    const double f_c = base.gain_crossover_hz.front();

    std::vector<double> f0_grid;
    if (opt.f0_hz) {
        f0_grid.push_back(*opt.f0_hz);
    } else {
        const int n = std::max(2, opt.f0_grid_points);
        const double lo = std::log10(0.2 * f_c);
        const double hi = std::log10(0.8 * f_c);
        for (int i = 0; i < n; ++i)
            f0_grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (n - 1)));
    }

    bool found = false;
    CompensationDesign best;
    double best_objective = -std::numeric_limits<double>::infinity();
    for (double c : opt.c_candidates_f) {
        for (double f0 : f0_grid) {
            double r_exact = 0.0;
            try {
                r_exact = rcomp_for_f0(plant.sense.r_int_ohms, c, f0);
            } catch (const InfeasibleCorner&) {
                continue;
            }
            const double r_snapped = snap_to_series(r_exact, opt.series);
            const SupplyModel candidate = plant.with_lead(r_snapped, c);
            const StabilityReport rep = margins_of(loop_gain(candidate.build()), opt.f_min_hz,
                                                   opt.f_max_hz, opt.points_per_decade);
            if (rep.pole_stable.has_value() && !*rep.pole_stable) continue;
            const double objective = detail::margin_objective(rep, opt);
            if (objective > best_objective) {
                best_objective = objective;
                best.f0_hz = lead_corner(r_snapped * plant.sense.r_int_ohms /
                                             (r_snapped + plant.sense.r_int_ohms),
                                         c);
                best.r_comp_ohms = r_snapped;
                best.c_comp_f = c;
                best.r_int_ohms = plant.sense.r_int_ohms;
                best.achieved = rep;
                found = true;
            }
        }
    }
    if (!found)
        throw NoFeasibleDesign("every candidate was infeasible or destabilizing");
    return best;
}

}  // namespace loopkit
