#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "loopkit/transfer_function.hpp"

namespace loopkit {

/// Real decoupling capacitor: C with equivalent series resistance and inductance.
struct CapBranch {
    double capacitance_f = 0.0;
    double esr_ohms = 0.0;
    double esl_h = 0.0;

    void validate() const {
        if (!(capacitance_f > 0.0) || !std::isfinite(capacitance_f))
            throw ValidationError("capacitance must be positive");
        if (!(esr_ohms >= 0.0) || !std::isfinite(esr_ohms))
            throw ValidationError("esr must be finite and >= 0");
        if (!(esl_h >= 0.0) || !std::isfinite(esl_h))
            throw ValidationError("esl must be finite and >= 0");
    }

    /// Impedance minimum 1/(2π√(esl·C)); |Z| there equals the ESR.
    double self_resonance_hz() const {
        return esl_h > 0.0 ? 1.0 / (2.0 * M_PI * std::sqrt(esl_h * capacitance_f)) : 0.0;
    }
};

/// Series distribution element between regulator output and load.
struct TraceBranch {
    double resistance_ohms = 0.0;
    double inductance_h = 0.0;

    void validate() const {
        if (!(resistance_ohms >= 0.0) || !std::isfinite(resistance_ohms))
            throw ValidationError("trace resistance must be finite and >= 0");
        if (!(inductance_h >= 0.0) || !std::isfinite(inductance_h))
            throw ValidationError("trace inductance must be finite and >= 0");
    }
};

/// Parallel bank of identical-capacitor groups, e.g. 10 x 470 uF tantalum.
struct CapBank {
    struct Entry {
        CapBranch branch;
        int count = 1;
    };
    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }

    double total_capacitance_f() const {
        double c = 0.0;
        for (const auto& e : entries) c += e.branch.capacitance_f * e.count;
        return c;
    }

    void validate() const {
        for (const auto& e : entries) {
            e.branch.validate();
            if (e.count < 1) throw ValidationError("bank entry count must be >= 1");
        }
    }
};

/// Z(s) = esr + s·esl + 1/(sC) as the rational (esl·C·s² + esr·C·s + 1)/(C·s).
inline TransferFunction branch_impedance(const CapBranch& b) {
    b.validate();
    return TransferFunction(
        Polynomial{1.0, b.esr_ohms * b.capacitance_f, b.esl_h * b.capacitance_f},
        Polynomial{0.0, b.capacitance_f});
}

inline TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    return add(a, b);
}

/// a·b/(a+b); n identical branches in parallel reduce to one branch over n,
/// which keeps the rational degree independent of the count.
inline TransferFunction parallel(const TransferFunction& a, const TransferFunction& b) {
    const TransferFunction sum = add(a, b);
    if (sum.is_zero()) throw DegenerateParallel("parallel combination of opposite impedances");
    return mul(mul(a, b), sum.reciprocal());
}

inline TransferFunction bank_impedance(const CapBank& bank) {
    if (bank.empty()) throw ValidationError("bank must have at least one entry");
    bank.validate();
    bool first = true;
    TransferFunction z;
    for (const auto& e : bank.entries) {
        TransferFunction zb = scale(branch_impedance(e.branch), 1.0 / e.count);
        z = first ? zb : parallel(z, zb);
        first = false;
    }
    return z;
}

}  // namespace loopkit
