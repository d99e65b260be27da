#pragma once

#include <cstddef>
#include <vector>

#include "loopkit/loop_model.hpp"
#include "loopkit/transfer_function.hpp"

namespace loopkit {

/// Node phasors of the injected loop at one frequency, satisfying
/// v_error = -v_fb, v_out = G v_error, v_fb = H v_out + v_inj.
struct InjectionNodes {
    Complex v_error;
    Complex v_out;
    Complex v_fb;
    Complex v_inj;
};

struct InjectionMeasurement {
    FrequencyResponse loop_gain;
    std::vector<InjectionNodes> nodes;
    std::vector<std::size_t> ill_conditioned;  // indices where |1+GH| < 1e-6
};

/// Simulated series-injection measurement: an ideal source in the feedback
/// path, node equations solved per frequency, loop gain recovered as the
/// ratio of the signal after the loop traversal to the signal entering it.
///
/// The solve is done for a unit injection and the node phasors scaled
/// afterwards, so the recovered loop gain is bit-identical for any
/// amplitude - the linearity the real measurement relies on.
inline InjectionMeasurement measure_loop_gain(const LoopModel& m,
                                              const std::vector<double>& freqs_hz,
                                              double amplitude_v = 1e-3) {
    if (!(amplitude_v > 0.0)) throw ValidationError("injection amplitude must be positive");
    if (freqs_hz.size() < 2) throw Error("injection sweep needs at least 2 frequencies");

    InjectionMeasurement out;
    out.loop_gain.freqs_hz = freqs_hz;
    out.loop_gain.values.reserve(freqs_hz.size());
    out.nodes.reserve(freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        const double f = freqs_hz[i];
        const Complex g = evaluate(m.g, f);
        const Complex h = evaluate(m.h, f);
        const Complex denom = Complex(1.0, 0.0) + g * h;
        if (std::abs(denom) < 1e-30)
            throw SingularLoop("1+GH numerically zero at " + std::to_string(f) + " Hz");
        if (std::abs(denom) < 1e-6) out.ill_conditioned.push_back(i);

        // unit-injection solve
        const Complex v_fb = Complex(1.0, 0.0) / denom;
        const Complex v_error = -v_fb;
        const Complex v_out = g * v_error;
        const Complex returned = h * v_out;  // the loop side of the injection point

        out.loop_gain.values.push_back(returned / v_error);
        out.nodes.push_back({v_error * amplitude_v, v_out * amplitude_v,
                             v_fb * amplitude_v, Complex(amplitude_v, 0.0)});
    }
    out.loop_gain.validate();
    return out;
}

}  // namespace loopkit
