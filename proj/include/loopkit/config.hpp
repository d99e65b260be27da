#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "loopkit/loop_model.hpp"
#include "loopkit/transient.hpp"

namespace loopkit {

struct SweepSpec {
    double f_min_hz = 10.0;
    double f_max_hz = 10e6;
    int points_per_decade = 200;
};

/// Everything one analysis run needs: the plant, the sweep band, the load
/// step, and the nominal setpoint (metadata only - the model works in
/// deviations from the regulation point).
struct AnalysisConfig {
    SupplyModel model;
    SweepSpec sweep;
    LoadStep step{0.0, 5.0, 1e-3, 2e-6, 10e-3};
    double setpoint_volts = 3.3;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& path) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ValidationError("unknown key `" + (path.empty() ? "" : path + ".") +
                                  item.key() + "`");
}

inline double require_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        throw ValidationError("missing required key `" + path + "." + key + "`");
    if (!j.at(key).is_number())
        throw ValidationError("`" + path + "." + key + "` must be a number");
    return j.at(key).get<double>();
}

inline double number_or(const json& j, const std::string& key, const std::string& path,
                        double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ValidationError("`" + path + "." + key + "` must be a number");
    return j.at(key).get<double>();
}

inline void check_positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError("`" + path + "` must be positive");
}

inline void check_non_negative(double v, const std::string& path) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError("`" + path + "` must be finite and >= 0");
}

inline RegulatorTemplate parse_regulator(const json& j) {
    reject_unknown_keys(j,
                        {"dc_gain", "error_amp_pole_hz", "lc_corner_hz", "lc_quality",
                         "extra_pole_hz", "filter_cap_f", "output_r_ohms", "output_l_h"},
                        "regulator");
    RegulatorTemplate t;
    t.dc_gain = require_number(j, "dc_gain", "regulator");
    t.error_amp_pole_hz = require_number(j, "error_amp_pole_hz", "regulator");
    t.lc_corner_hz = require_number(j, "lc_corner_hz", "regulator");
    t.lc_quality = require_number(j, "lc_quality", "regulator");
    if (j.contains("extra_pole_hz"))
        t.extra_pole_hz = require_number(j, "extra_pole_hz", "regulator");
    t.filter_cap_f = number_or(j, "filter_cap_f", "regulator", t.filter_cap_f);
    t.output_r_ohms = number_or(j, "output_r_ohms", "regulator", t.output_r_ohms);
    t.output_l_h = number_or(j, "output_l_h", "regulator", t.output_l_h);
    check_positive(t.dc_gain, "regulator.dc_gain");
    check_positive(t.error_amp_pole_hz, "regulator.error_amp_pole_hz");
    check_positive(t.lc_corner_hz, "regulator.lc_corner_hz");
    check_positive(t.lc_quality, "regulator.lc_quality");
    if (t.extra_pole_hz) check_positive(*t.extra_pole_hz, "regulator.extra_pole_hz");
    check_positive(t.filter_cap_f, "regulator.filter_cap_f");
    check_non_negative(t.output_r_ohms, "regulator.output_r_ohms");
    check_non_negative(t.output_l_h, "regulator.output_l_h");
    return t;
}

inline CapBank parse_bank(const json& j) {
    CapBank bank;
    if (!j.is_array()) throw ValidationError("`bank` must be an array");
    int i = 0;
    for (const auto& e : j) {
        const std::string path = "bank[" + std::to_string(i) + "]";
        reject_unknown_keys(e, {"capacitance_f", "esr_ohms", "esl_h", "count"}, path);
        CapBank::Entry entry;
        entry.branch.capacitance_f = require_number(e, "capacitance_f", path);
        entry.branch.esr_ohms = number_or(e, "esr_ohms", path, 0.0);
        entry.branch.esl_h = number_or(e, "esl_h", path, 0.0);
        check_positive(entry.branch.capacitance_f, path + ".capacitance_f");
        check_non_negative(entry.branch.esr_ohms, path + ".esr_ohms");
        check_non_negative(entry.branch.esl_h, path + ".esl_h");
        if (e.contains("count")) {
            if (!e.at("count").is_number_integer() || e.at("count").get<int>() < 1)
                throw ValidationError("`" + path + ".count` must be an integer >= 1");
            entry.count = e.at("count").get<int>();
        }
        bank.entries.push_back(entry);
        ++i;
    }
    return bank;
}

inline SenseNetwork parse_sense(const json& j) {
    reject_unknown_keys(j, {"r_int_ohms", "lead", "distribution", "load_r_ohms"}, "sense");
    SenseNetwork n;
    n.r_int_ohms = number_or(j, "r_int_ohms", "sense", 100.0);
    check_positive(n.r_int_ohms, "sense.r_int_ohms");
    if (j.contains("lead")) {
        const auto& l = j.at("lead");
        reject_unknown_keys(l, {"r_comp_ohms", "c_comp_f"}, "sense.lead");
        LeadNetwork lead;
        lead.r_comp_ohms = require_number(l, "r_comp_ohms", "sense.lead");
        lead.c_comp_f = require_number(l, "c_comp_f", "sense.lead");
        check_non_negative(lead.r_comp_ohms, "sense.lead.r_comp_ohms");
        check_positive(lead.c_comp_f, "sense.lead.c_comp_f");
        n.lead = lead;
    }
    if (!j.contains("distribution"))
        throw ValidationError("missing required key `sense.distribution`");
    const auto& d = j.at("distribution");
    reject_unknown_keys(d, {"resistance_ohms", "inductance_h"}, "sense.distribution");
    n.distribution.resistance_ohms = require_number(d, "resistance_ohms", "sense.distribution");
    n.distribution.inductance_h = require_number(d, "inductance_h", "sense.distribution");
    check_non_negative(n.distribution.resistance_ohms, "sense.distribution.resistance_ohms");
    check_non_negative(n.distribution.inductance_h, "sense.distribution.inductance_h");
    if (n.distribution.resistance_ohms == 0.0 && n.distribution.inductance_h == 0.0)
        throw ValidationError("`sense.distribution` must not be identically zero");
    n.load_r_ohms = require_number(j, "load_r_ohms", "sense");
    check_positive(n.load_r_ohms, "sense.load_r_ohms");
    return n;
}

}  // namespace detail

inline AnalysisConfig parse_config(const std::string& text) {
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    detail::reject_unknown_keys(
        j, {"schema", "setpoint_volts", "regulator", "bank", "sense", "sweep", "step"}, "");
    if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
        j.at("schema").get<int>() != 1)
        throw ValidationError("config must declare `schema`: 1");
    if (!j.contains("regulator")) throw ValidationError("missing required key `regulator`");
    if (!j.contains("sense")) throw ValidationError("missing required key `sense`");

    AnalysisConfig cfg;
    cfg.model.regulator = detail::parse_regulator(j.at("regulator"));
    if (j.contains("bank")) cfg.model.bank = detail::parse_bank(j.at("bank"));
    cfg.model.sense = detail::parse_sense(j.at("sense"));
    cfg.setpoint_volts = detail::number_or(j, "setpoint_volts", "", 3.3);
    detail::check_positive(cfg.setpoint_volts, "setpoint_volts");

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::reject_unknown_keys(s, {"f_min_hz", "f_max_hz", "points_per_decade"}, "sweep");
        cfg.sweep.f_min_hz = detail::number_or(s, "f_min_hz", "sweep", cfg.sweep.f_min_hz);
        cfg.sweep.f_max_hz = detail::number_or(s, "f_max_hz", "sweep", cfg.sweep.f_max_hz);
        if (s.contains("points_per_decade")) {
            if (!s.at("points_per_decade").is_number_integer())
                throw ValidationError("`sweep.points_per_decade` must be an integer");
            cfg.sweep.points_per_decade = s.at("points_per_decade").get<int>();
        }
        detail::check_positive(cfg.sweep.f_min_hz, "sweep.f_min_hz");
        if (!(cfg.sweep.f_max_hz > cfg.sweep.f_min_hz))
            throw ValidationError("`sweep.f_max_hz` must exceed f_min_hz");
        if (cfg.sweep.points_per_decade < 10)
            throw ValidationError("`sweep.points_per_decade` must be >= 10");
    }
    if (j.contains("step")) {
        const auto& s = j.at("step");
        detail::reject_unknown_keys(
            s, {"i_before_amps", "i_after_amps", "t_step_s", "dt_s", "duration_s"}, "step");
        cfg.step.i_before_amps =
            detail::number_or(s, "i_before_amps", "step", cfg.step.i_before_amps);
        cfg.step.i_after_amps =
            detail::number_or(s, "i_after_amps", "step", cfg.step.i_after_amps);
        cfg.step.t_step_s = detail::number_or(s, "t_step_s", "step", cfg.step.t_step_s);
        cfg.step.dt_s = detail::number_or(s, "dt_s", "step", cfg.step.dt_s);
        cfg.step.duration_s = detail::number_or(s, "duration_s", "step", cfg.step.duration_s);
        try {
            cfg.step.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("`step`: ") + e.what());
        }
    }
    return cfg;
}

inline AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

inline std::string emit_config(const AnalysisConfig& cfg) {
    using detail::json;
    json j;
    j["schema"] = 1;
    j["setpoint_volts"] = cfg.setpoint_volts;
    json reg;
    reg["dc_gain"] = cfg.model.regulator.dc_gain;
    reg["error_amp_pole_hz"] = cfg.model.regulator.error_amp_pole_hz;
    reg["lc_corner_hz"] = cfg.model.regulator.lc_corner_hz;
    reg["lc_quality"] = cfg.model.regulator.lc_quality;
    if (cfg.model.regulator.extra_pole_hz)
        reg["extra_pole_hz"] = *cfg.model.regulator.extra_pole_hz;
    reg["filter_cap_f"] = cfg.model.regulator.filter_cap_f;
    reg["output_r_ohms"] = cfg.model.regulator.output_r_ohms;
    reg["output_l_h"] = cfg.model.regulator.output_l_h;
    j["regulator"] = reg;
    if (!cfg.model.bank.empty()) {
        json bank = json::array();
        for (const auto& e : cfg.model.bank.entries) {
            json entry;
            entry["capacitance_f"] = e.branch.capacitance_f;
            entry["esr_ohms"] = e.branch.esr_ohms;
            entry["esl_h"] = e.branch.esl_h;
            entry["count"] = e.count;
            bank.push_back(entry);
        }
        j["bank"] = bank;
    }
    json sense;
    sense["r_int_ohms"] = cfg.model.sense.r_int_ohms;
    if (cfg.model.sense.lead) {
        sense["lead"] = {{"r_comp_ohms", cfg.model.sense.lead->r_comp_ohms},
                         {"c_comp_f", cfg.model.sense.lead->c_comp_f}};
    }
    sense["distribution"] = {{"resistance_ohms", cfg.model.sense.distribution.resistance_ohms},
                             {"inductance_h", cfg.model.sense.distribution.inductance_h}};
    sense["load_r_ohms"] = cfg.model.sense.load_r_ohms;
    j["sense"] = sense;
    j["sweep"] = {{"f_min_hz", cfg.sweep.f_min_hz},
                  {"f_max_hz", cfg.sweep.f_max_hz},
                  {"points_per_decade", cfg.sweep.points_per_decade}};
    j["step"] = {{"i_before_amps", cfg.step.i_before_amps},
                 {"i_after_amps", cfg.step.i_after_amps},
                 {"t_step_s", cfg.step.t_step_s},
                 {"dt_s", cfg.step.dt_s},
                 {"duration_s", cfg.step.duration_s}};
    return j.dump(2) + "\n";
}

inline void save_config(const AnalysisConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path);
    out << emit_config(cfg);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace loopkit
