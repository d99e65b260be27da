#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

#include "loopkit/transfer_function.hpp"

namespace loopkit {

/// Controllable-canonical single-input single-output realization.
struct StateSpaceModel {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::RowVectorXd c;
    double d = 0.0;

    int order() const { return static_cast<int>(a.rows()); }
};

/// Controllable-canonical realization of a proper transfer function.
inline StateSpaceModel tf_to_state_space(const TransferFunction& tf) {
    if (!tf.is_proper())
        throw ImproperTransferFunction("numerator degree exceeds denominator degree");
    const int n = tf.den().degree();
    // canonical TF: monic denominator
    const std::vector<double>& a = tf.den().coeffs();
    std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t k = 0; k < tf.num().coeffs().size(); ++k) b[k] = tf.num().coeffs()[k];

    StateSpaceModel ss;
    ss.d = b[static_cast<std::size_t>(n)];
    ss.a.setZero(n, n);
    ss.b.setZero(n);
    ss.c.setZero(n);
    for (int i = 0; i + 1 < n; ++i) ss.a(i, i + 1) = 1.0;
    for (int k = 0; k < n; ++k) {
        ss.a(n - 1, k) = -a[static_cast<std::size_t>(k)];
        ss.c(k) = b[static_cast<std::size_t>(k)] - ss.d * a[static_cast<std::size_t>(k)];
    }
    if (n > 0) ss.b(n - 1) = 1.0;
    return ss;
}

/// Frequency response c(jωI - A)^{-1}b + d; the realization oracle.
inline Complex evaluate(const StateSpaceModel& ss, double f_hz) {
    if (!(f_hz > 0.0)) throw Error("evaluation frequency must be positive");
    const int n = ss.order();
    if (n == 0) return Complex(ss.d, 0.0);
    const Complex s(0.0, 2.0 * M_PI * f_hz);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) * s - ss.a.cast<Complex>();
    Eigen::VectorXcd x = m.partialPivLu().solve(ss.b.cast<Complex>());
    return (ss.c.cast<Complex>() * x)(0) + Complex(ss.d, 0.0);
}

/// Load-current step: i_before to i_after at t_step, simulated on a fixed grid.
struct LoadStep {
    double i_before_amps = 0.0;
    double i_after_amps = 0.0;
    double t_step_s = 0.0;
    double dt_s = 1e-6;
    double duration_s = 1e-3;

    void validate() const {
        if (!(t_step_s >= 0.0)) throw ValidationError("step.t_step must be >= 0");
        if (!(dt_s > 0.0)) throw ValidationError("step.dt must be positive");
        if (!(duration_s > t_step_s)) throw ValidationError("step.duration must exceed t_step");
        if (!(dt_s <= duration_s / 100.0))
            throw ValidationError("step.dt must be at most duration/100");
    }
};

/// Simulated deviation waveform plus extracted figures of merit. Deviation is
/// the droop from the pre-step regulation point, positive for a load increase.
struct TransientResult {
    std::vector<double> times_s;
    std::vector<double> v_deviation_volts;
    double t_step_s = 0.0;

    struct Metrics {
        double peak_droop_v = 0.0;
        double steady_state_droop_v = 0.0;
        double ringing_freq_hz = 0.0;  // 0 when fewer than 3 zero crossings
        double settling_time_s = 0.0;  // to 5% of the peak deviation from final
        double overshoot_ratio = 0.0;  // peak over steady-state magnitude
        int zero_crossings = 0;
    } metrics;
};

namespace detail {

/// Exact zero-order-hold discretization via the augmented-block exponential.
inline void discretize_zoh(const StateSpaceModel& ss, double dt, Eigen::MatrixXd& ad,
                           Eigen::VectorXd& bd) {
    const int n = ss.order();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = ss.a;
    m.topRightCorner(n, 1) = ss.b;
    const Eigen::MatrixXd e = (m * dt).exp();
    ad = e.topLeftCorner(n, n);
    bd = e.topRightCorner(n, 1);
}

}  // namespace detail

/// Step response of the closed-loop output impedance. The LTI system is
/// discretized exactly (ZOH), so the only numerical effect of dt is sampling
/// resolution. Unstable impedances are refused with the offending poles in
/// the message; the bounded ringing such supplies show in the lab comes from
/// nonlinear limiting this small-signal model cannot honestly reproduce.
inline TransientResult simulate_step(const TransferFunction& z_cl, const LoadStep& step) {
    step.validate();
    if (!z_cl.is_proper())
        throw ImproperTransferFunction("output impedance must be proper to simulate");
    if (z_cl.den().degree() >= 1) {
        std::string bad;
        for (Complex p : polynomial_roots(z_cl.den()))
            if (p.real() >= -1e-9)
                bad += " (" + std::to_string(p.real()) + (p.imag() < 0 ? "-" : "+") +
                       std::to_string(std::abs(p.imag())) + "j)";
        if (!bad.empty())
            throw UnstableSystem("closed-loop impedance has non-decaying poles:" + bad);
    }

    const double delta_i = step.i_after_amps - step.i_before_amps;
    const StateSpaceModel ss = tf_to_state_space(z_cl);
    const int n = ss.order();
    Eigen::MatrixXd ad;
    Eigen::VectorXd bd;
    if (n > 0) detail::discretize_zoh(ss, step.dt_s, ad, bd);

    const auto steps = static_cast<std::size_t>(std::llround(step.duration_s / step.dt_s));
    const auto k_step = static_cast<std::size_t>(std::llround(step.t_step_s / step.dt_s));

    TransientResult r;
    r.t_step_s = static_cast<double>(k_step) * step.dt_s;
    r.times_s.resize(steps + 1);
    r.v_deviation_volts.resize(steps + 1);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double u = k >= k_step ? delta_i : 0.0;
        r.times_s[k] = static_cast<double>(k) * step.dt_s;
        r.v_deviation_volts[k] = (n > 0 ? (ss.c * x)(0) : 0.0) + ss.d * u;
        if (n > 0 && k < steps) x = ad * x + bd * u;
    }

    // metrics over the post-step samples
    auto& m = r.metrics;
    const std::size_t k0 = std::min(k_step, steps);
    m.steady_state_droop_v = r.v_deviation_volts.back();
    for (std::size_t k = k0; k <= steps; ++k)
        m.peak_droop_v = std::max(m.peak_droop_v, std::abs(r.v_deviation_volts[k]));

    double peak_from_final = 0.0;
    for (std::size_t k = k0; k <= steps; ++k)
        peak_from_final =
            std::max(peak_from_final, std::abs(r.v_deviation_volts[k] - m.steady_state_droop_v));
    const double band = 0.05 * peak_from_final;
    m.settling_time_s = 0.0;
    for (std::size_t k = steps + 1; k-- > k0;) {
        if (std::abs(r.v_deviation_volts[k] - m.steady_state_droop_v) > band) {
            m.settling_time_s = r.times_s[std::min(k + 1, steps)] - r.t_step_s;
            break;
        }
    }

    std::vector<double> crossing_times;
    for (std::size_t k = k0 + 1; k <= steps; ++k) {
        const double e0 = r.v_deviation_volts[k - 1] - m.steady_state_droop_v;
        const double e1 = r.v_deviation_volts[k] - m.steady_state_droop_v;
        if ((e0 > 0.0 && e1 < 0.0) || (e0 < 0.0 && e1 > 0.0)) {
            const double t = e0 / (e0 - e1);
            crossing_times.push_back(r.times_s[k - 1] + t * step.dt_s);
        }
    }
    m.zero_crossings = static_cast<int>(crossing_times.size());
    if (crossing_times.size() >= 3) {
        const double span = crossing_times.back() - crossing_times.front();
        const double half_period = span / static_cast<double>(crossing_times.size() - 1);
        m.ringing_freq_hz = 1.0 / (2.0 * half_period);
    }
    m.overshoot_ratio = std::abs(m.steady_state_droop_v) > 0.0
                            ? m.peak_droop_v / std::abs(m.steady_state_droop_v)
                            : std::numeric_limits<double>::infinity();
    return r;
}

/// Dominant ring frequency and per-cycle amplitude decay from successive
/// positive extrema of the deviation about its final value. Non-ringing
/// waveforms report (0, 1).
inline std::pair<double, double> ringing_metrics(const TransientResult& r) {
    const double v_ss = r.metrics.steady_state_droop_v;
    std::vector<double> peak_t, peak_v;
    const auto& v = r.v_deviation_volts;
    std::size_t k0 = 0;
    while (k0 < r.times_s.size() && r.times_s[k0] < r.t_step_s) ++k0;
    for (std::size_t k = k0 + 1; k + 1 < v.size(); ++k) {
        const double e_prev = v[k - 1] - v_ss;
        const double e = v[k] - v_ss;
        const double e_next = v[k + 1] - v_ss;
        if (e > 0.0 && e >= e_prev && e > e_next) {
            // parabolic vertex through the three samples
            const double denom = e_prev - 2.0 * e + e_next;
            double dt_frac = 0.0, e_pk = e;
            if (denom != 0.0) {
                dt_frac = 0.5 * (e_prev - e_next) / denom;
                e_pk = e - 0.25 * (e_prev - e_next) * dt_frac;
            }
            peak_t.push_back(r.times_s[k] + dt_frac * (r.times_s[1] - r.times_s[0]));
            peak_v.push_back(e_pk);
        }
    }
    if (peak_t.size() < 2 || r.metrics.zero_crossings < 3) return {0.0, 1.0};

    double period_sum = 0.0;
    double log_ratio_sum = 0.0;
    int ratios = 0;
    for (std::size_t i = 1; i < peak_t.size(); ++i) {
        period_sum += peak_t[i] - peak_t[i - 1];
        if (peak_v[i] > 0.0 && peak_v[i - 1] > 0.0) {
            log_ratio_sum += std::log(peak_v[i] / peak_v[i - 1]);
            ++ratios;
        }
    }
    const double period = period_sum / static_cast<double>(peak_t.size() - 1);
    const double decay =
        ratios > 0 ? std::exp(log_ratio_sum / static_cast<double>(ratios)) : 1.0;
    return {1.0 / period, decay};
}

}  // namespace loopkit
