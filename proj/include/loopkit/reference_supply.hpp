#pragma once

#include "loopkit/config.hpp"
#include "loopkit/loop_model.hpp"

namespace loopkit {

/// Ten 470 uF low-ESR tantalums: the motherboard bulk bank. ESR/ESL are
/// representative tantalum figures (configuration, not measured data).
inline CapBank reference_bulk_bank() {
    return CapBank{{{CapBranch{470e-6, 0.025, 2e-9}, 10}}};
}

/// Calibrated stand-in for the internal multi-output supply. The regulator's
/// real G(s) is unpublished; these parameters were fitted numerically so the
/// uncompensated loop lands on the measured anchors (0 dB at 5.04 kHz with
/// 13 deg of phase margin, -180 deg at 6.05 kHz with 3.2 dB of gain margin)
/// and the 4.7 uF / 20 ohm lead reproduces the compensated behaviour.
inline SupplyModel reference_supply() {
    SupplyModel m;
    m.regulator.dc_gain = 3.3;
    m.regulator.error_amp_pole_hz = 60e3;
    m.regulator.lc_corner_hz = 9.2e3;  // bank-loaded corner near 3.8 kHz
    m.regulator.lc_quality = 0.7;
    m.regulator.extra_pole_hz.reset();
    m.regulator.filter_cap_f = 1000e-6;
    m.regulator.output_r_ohms = 0.030;
    m.regulator.output_l_h = 0.5e-6;
    m.bank = reference_bulk_bank();
    m.sense.r_int_ohms = 100.0;
    m.sense.lead.reset();
    m.sense.distribution = TraceBranch{8e-3, 100e-9};
    m.sense.load_r_ohms = 0.165;  // 3.3 V at the 20 A measurement load
    return m;
}

/// The paper's compensation as built: 4.7 uF with the snapped 20 ohm resistor.
inline SupplyModel reference_supply_compensated() {
    return reference_supply().with_lead(20.0, 4.7e-6);
}

/// Full analysis configuration for the reference supply, matching the shipped
/// configs/internal_supply.json.
inline AnalysisConfig reference_config() {
    AnalysisConfig cfg;
    cfg.model = reference_supply();
    cfg.sweep = SweepSpec{10.0, 10e6, 200};
    cfg.step = LoadStep{40.0, 45.0, 1e-3, 2e-6, 12e-3};
    cfg.setpoint_volts = 3.3;
    return cfg;
}

}  // namespace loopkit
