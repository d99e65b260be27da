#pragma once

#include <cmath>
#include <optional>

#include "loopkit/pdn.hpp"
#include "loopkit/transfer_function.hpp"

namespace loopkit {

/// Parametric stand-in for a regulator's forward path: DC gain, error-amp
/// pole, output LC pair, optional extra pole, plus the open-loop output
/// branch used to form the output impedance. The LC corner is the corner
/// with no external bank attached; adding bank capacitance shifts it as
/// 1/sqrt(C_total).
struct RegulatorTemplate {
    double dc_gain = 1.0;
    double error_amp_pole_hz = 1.0e6;
    double lc_corner_hz = 1.0e3;
    double lc_quality = 1.0;
    std::optional<double> extra_pole_hz;
    double filter_cap_f = 1000e-6;   // internal output filter capacitance
    double output_r_ohms = 0.05;     // open-loop output branch
    double output_l_h = 1e-6;

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError(std::string(name) + " must be positive");
        };
        pos(dc_gain, "regulator.dc_gain");
        pos(error_amp_pole_hz, "regulator.error_amp_pole_hz");
        pos(lc_corner_hz, "regulator.lc_corner_hz");
        pos(lc_quality, "regulator.lc_quality");
        pos(filter_cap_f, "regulator.filter_cap_f");
        if (extra_pole_hz) pos(*extra_pole_hz, "regulator.extra_pole_hz");
        if (!(output_r_ohms >= 0.0) || !(output_l_h >= 0.0))
            throw ValidationError("regulator output branch must be non-negative");
    }

    /// LC corner after the external bank augments the filter capacitance.
    double shifted_lc_corner_hz(const CapBank& bank) const {
        const double c_total = filter_cap_f + bank.total_capacitance_f();
        return lc_corner_hz * std::sqrt(filter_cap_f / c_total);
    }
};

/// Optional phase-lead branch: C_comp in series with R_comp, from the supply
/// output to the sense input, fighting the internal R_int for control of V_fb.
struct LeadNetwork {
    double r_comp_ohms = 0.0;
    double c_comp_f = 0.0;

    void validate() const {
        if (!(r_comp_ohms >= 0.0) || !std::isfinite(r_comp_ohms))
            throw ValidationError("lead.r_comp must be finite and >= 0");
        if (!(c_comp_f > 0.0) || !std::isfinite(c_comp_f))
            throw ValidationError("lead.c_comp must be positive");
    }
};

/// Feedback-side description: the internal sense resistor, the optional lead,
/// and the distribution path to the remote sense point.
struct SenseNetwork {
    double r_int_ohms = 100.0;
    std::optional<LeadNetwork> lead;
    TraceBranch distribution;
    double load_r_ohms = 1.0;

    void validate() const {
        if (!(r_int_ohms > 0.0)) throw ValidationError("sense.r_int must be positive");
        if (lead) lead->validate();
        distribution.validate();
        if (!(load_r_ohms > 0.0)) throw ValidationError("sense.load_r must be positive");
    }
};

/// The composed control loop: forward path G (V_error -> V_out), feedback
/// path H (V_out -> V_fb), and the open-loop output impedance in ohms.
struct LoopModel {
    TransferFunction g;
    TransferFunction h;
    TransferFunction z_open;
};

/// G(s) = A0 / [(1+s/w_ea)(1 + s/(Q w0) + s^2/w0^2)(1+s/w_extra)] with w0
/// the bank-shifted LC corner. DC value is exactly A0. The load resistance
/// participates through the template's Q, which already encodes its damping.
inline TransferFunction build_forward_path(const RegulatorTemplate& t, const CapBank& bank,
                                           [[maybe_unused]] double load_r_ohms = 0.0) {
    t.validate();
    bank.validate();
    const double w_ea = 2.0 * M_PI * t.error_amp_pole_hz;
    const double w0 = 2.0 * M_PI * t.shifted_lc_corner_hz(bank);

    Polynomial den = Polynomial{1.0, 1.0 / w_ea} *
                     Polynomial{1.0, 1.0 / (t.lc_quality * w0), 1.0 / (w0 * w0)};
    if (t.extra_pole_hz) den = den * Polynomial{1.0, 1.0 / (2.0 * M_PI * *t.extra_pole_hz)};
    return TransferFunction(Polynomial::constant(t.dc_gain), std::move(den));
}

/// Voltage transfer from the local regulator output to the remote sense
/// point: series trace into the (bank || load) divider.
inline TransferFunction distribution_transfer(const TraceBranch& trace, const CapBank& bank,
                                              double load_r_ohms) {
    trace.validate();
    const TransferFunction z_trace =
        TransferFunction::series_rl(trace.resistance_ohms, trace.inductance_h);
    TransferFunction z_shunt = TransferFunction::constant(load_r_ohms);
    if (!bank.empty()) z_shunt = parallel(bank_impedance(bank), z_shunt);
    return mul(z_shunt, add(z_trace, z_shunt).reciprocal());
}

/// H(s) = [D(s)/R_int + Y_lead(s)] / [1/R_int + Y_lead(s)], with the lead
/// admittance Y = sC/(1+sRC). With no lead this reduces to D itself; the lead
/// never changes H(0), so DC sense accuracy is preserved.
inline TransferFunction sense_transfer(const SenseNetwork& n, const TransferFunction& d) {
    n.validate();
    if (!n.lead) return d;
    const double gi = 1.0 / n.r_int_ohms;
    const TransferFunction y_lead(
        Polynomial{0.0, n.lead->c_comp_f},
        Polynomial{1.0, n.lead->r_comp_ohms * n.lead->c_comp_f});
    const TransferFunction num = add(scale(d, gi), y_lead);
    const TransferFunction den = add(TransferFunction::constant(gi), y_lead);
    return mul(num, den.reciprocal());
}

/// sense_transfer with D built from the network's own distribution path.
inline TransferFunction sense_transfer(const SenseNetwork& n, const CapBank& bank) {
    return sense_transfer(n, distribution_transfer(n.distribution, bank, n.load_r_ohms));
}

/// Open-loop output impedance at the load: regulator output branch in
/// parallel with the bank and the load resistance. Proper by construction
/// (the resistive load caps the high-frequency magnitude).
inline TransferFunction open_loop_output_impedance(const RegulatorTemplate& t,
                                                   const CapBank& bank, double load_r_ohms) {
    TransferFunction z = parallel(TransferFunction::series_rl(t.output_r_ohms, t.output_l_h),
                                  TransferFunction::constant(load_r_ohms));
    if (!bank.empty()) z = parallel(z, bank_impedance(bank));
    return z;
}

/// Full plant description; the one place a compensator can swap the lead
/// network and rebuild the loop.
struct SupplyModel {
    RegulatorTemplate regulator;
    CapBank bank;
    SenseNetwork sense;

    SupplyModel with_lead(double r_comp_ohms, double c_comp_f) const {
        SupplyModel m = *this;
        m.sense.lead = LeadNetwork{r_comp_ohms, c_comp_f};
        return m;
    }

    SupplyModel without_lead() const {
        SupplyModel m = *this;
        m.sense.lead.reset();
        return m;
    }

    LoopModel build() const {
        LoopModel lm;
        lm.g = build_forward_path(regulator, bank, sense.load_r_ohms);
        lm.h = sense_transfer(sense, bank);
        lm.z_open = open_loop_output_impedance(regulator, bank, sense.load_r_ohms);
        return lm;
    }
};

/// T = G·H, the net gain around the opened loop from V_error to V_fb.
inline TransferFunction loop_gain(const LoopModel& m) { return mul(m.g, m.h); }

/// V_out/V_ref = G/(1+GH).
inline TransferFunction closed_loop_ref_to_out(const LoopModel& m) {
    return feedback_close(m.g, m.h);
}

/// Z_cl = Z_open/(1+T): what a load-current step actually sees.
inline TransferFunction closed_loop_output_impedance(const LoopModel& m) {
    const TransferFunction t = loop_gain(m);
    const Polynomial chi = t.den() + t.num();
    if (chi.is_zero()) throw DegenerateLoop("1 + loop gain identically zero");
    return mul(m.z_open, TransferFunction(t.den(), chi));
}

}  // namespace loopkit
