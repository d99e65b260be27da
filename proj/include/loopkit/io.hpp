#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loopkit/compensator.hpp"
#include "loopkit/stability.hpp"
#include "loopkit/transient.hpp"

namespace loopkit {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string format_fixed(double v, int precision = 6) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace detail

// ---------------------------------------------------------------- CSV ----

inline constexpr const char* kBodeCsvHeader = "freq_hz,mag_db,phase_deg";
inline constexpr const char* kWaveformCsvHeader = "time_s,v_deviation";

inline std::string bode_csv(const BodeData& b) {
    b.validate();
    std::string out = kBodeCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < b.size(); ++i) {
        out += format_shortest(b.freqs_hz[i]);
        out += ',';
        out += format_shortest(b.mag_db[i]);
        out += ',';
        out += format_shortest(b.phase_deg[i]);
        out += '\n';
    }
    return out;
}

inline void write_bode_csv(const BodeData& b, const std::string& path) {
    detail::write_file(path, bode_csv(b));
}

inline std::string waveform_csv(const TransientResult& r) {
    if (r.times_s.size() < 2) throw Error("refusing to emit an empty waveform");
    std::string out = kWaveformCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < r.times_s.size(); ++i) {
        out += format_shortest(r.times_s[i]);
        out += ',';
        out += format_shortest(r.v_deviation_volts[i]);
        out += '\n';
    }
    return out;
}

inline void write_waveform_csv(const TransientResult& r, const std::string& path) {
    detail::write_file(path, waveform_csv(r));
}

/// Instrument-measured loop gain rows, e.g. exported from a network analyzer.
struct MeasuredLoopGain {
    std::vector<double> freq_hz;
    std::vector<double> mag_db;
    std::vector<double> phase_deg;

    /// Phase is assumed continuous already but re-unwrapped defensively.
    BodeData to_bode() const {
        BodeData b{freq_hz, mag_db, detail::unwrap_degrees(phase_deg)};
        b.validate();
        return b;
    }
};

inline MeasuredLoopGain parse_measured_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    MeasuredLoopGain m;
    auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    if (!std::getline(in, line)) throw ParseError("line 1: empty file");
    ++line_no;
    strip_cr(line);
    if (line != kBodeCsvHeader)
        throw ParseError("line 1: header must be exactly `" + std::string(kBodeCsvHeader) +
                         "`");
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        double vals[3];
        const char* p = line.c_str();
        const char* end = p + line.size();
        for (int k = 0; k < 3; ++k) {
            if (k > 0) {
                if (p >= end || *p != ',')
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": expected 3 comma-separated values");
                ++p;
            }
            const auto res = std::from_chars(p, end, vals[k]);
            if (res.ec != std::errc{})
                throw ParseError("line " + std::to_string(line_no) + ": bad number in column " +
                                 std::to_string(k + 1));
            p = res.ptr;
        }
        if (p != end)
            throw ParseError("line " + std::to_string(line_no) + ": trailing characters");
        if (!m.freq_hz.empty() && !(vals[0] > m.freq_hz.back()))
            throw NonMonotonicFrequency("line " + std::to_string(line_no) +
                                        ": frequency does not increase");
        if (!(vals[0] > 0.0))
            throw ParseError("line " + std::to_string(line_no) + ": frequency must be positive");
        m.freq_hz.push_back(vals[0]);
        m.mag_db.push_back(vals[1]);
        m.phase_deg.push_back(vals[2]);
    }
    if (m.freq_hz.size() < 2) throw ParseError("need at least 2 data rows");
    return m;
}

inline MeasuredLoopGain import_measured(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open measured-data file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_measured_csv(text);
}

// ------------------------------------------------------------- report ----

inline std::string report_text(const StabilityReport& r) {
    std::string out;
    auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    auto freq_list = [&](const std::vector<double>& f) {
        std::string s;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) s += ",";
            s += detail::format_fixed(f[i]);
        }
        return s.empty() ? std::string("none") : s;
    };
    line("gain_margin_db", detail::format_fixed(r.gain_margin_db));
    line("gain_margin_at_hz", detail::format_fixed(r.gm_at_hz));
    line("phase_margin_deg", detail::format_fixed(r.phase_margin_deg));
    line("phase_margin_at_hz", detail::format_fixed(r.pm_at_hz));
    line("gain_crossover_hz", freq_list(r.gain_crossover_hz));
    line("phase_crossover_hz", freq_list(r.phase_crossover_hz));
    line("marginal", r.marginal ? "true" : "false");
    if (r.pole_stable) line("pole_stable", *r.pole_stable ? "true" : "false");
    return out;
}

inline std::string report_text(const CompensationDesign& d) {
    std::string out;
    out += "f0_hz=" + detail::format_fixed(d.f0_hz) + "\n";
    out += "r_comp_ohms=" + detail::format_fixed(d.r_comp_ohms) + "\n";
    out += "c_comp_f=" + detail::format_fixed(d.c_comp_f) + "\n";
    out += "r_int_ohms=" + detail::format_fixed(d.r_int_ohms) + "\n";
    out += report_text(d.achieved);
    return out;
}

inline std::string report_text(const TransientResult::Metrics& m) {
    std::string out;
    out += "peak_droop_v=" + detail::format_fixed(m.peak_droop_v) + "\n";
    out += "steady_state_droop_v=" + detail::format_fixed(m.steady_state_droop_v) + "\n";
    out += "ringing_freq_hz=" + detail::format_fixed(m.ringing_freq_hz) + "\n";
    out += "zero_crossings=" + std::to_string(m.zero_crossings) + "\n";
    out += "settling_time_s=" + detail::format_fixed(m.settling_time_s) + "\n";
    out += "overshoot_ratio=" + detail::format_fixed(m.overshoot_ratio) + "\n";
    return out;
}

inline void write_report(const std::string& text, const std::string& path) {
    detail::write_file(path, text);
}

// ---------------------------------------------------------------- SVG ----

namespace detail {

struct SvgPanel {
    double x0, y0, w, h;  // plot area in svg coordinates
    double fx0, fx1;      // data x-range (log10 when log_x)
    double fy0, fy1;      // data y-range
    bool log_x = true;

    double sx(double x) const {
        const double v = log_x ? std::log10(x) : x;
        return x0 + (v - fx0) / (fx1 - fx0) * w;
    }
    double sy(double y) const { return y0 + h - (y - fy0) / (fy1 - fy0) * h; }
};

inline void svg_axes(std::string& s, const SvgPanel& p, const std::string& y_label) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' fill='none' "
                  "stroke='black'/>\n",
                  p.x0, p.y0, p.w, p.h);
    s += buf;
    if (p.log_x) {
        for (int d = static_cast<int>(std::ceil(p.fx0)); d <= std::floor(p.fx1); ++d) {
            const double x = p.x0 + (d - p.fx0) / (p.fx1 - p.fx0) * p.w;
            std::snprintf(buf, sizeof(buf),
                          "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#ccc'/>\n"
                          "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle'>"
                          "1e%d</text>\n",
                          x, p.y0, x, p.y0 + p.h, x, p.y0 + p.h + 14.0, d);
            s += buf;
        }
    }
    const double ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double yv = p.fy0 + (p.fy1 - p.fy0) * i / ticks;
        const double y = p.sy(yv);
        std::snprintf(buf, sizeof(buf),
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#eee'/>\n"
                      "<text x='%.1f' y='%.1f' font-size='11' text-anchor='end'>%.4g</text>\n",
                      p.x0, y, p.x0 + p.w, y, p.x0 - 4.0, y + 4.0, yv);
        s += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x='%.1f' y='%.1f' font-size='12' transform='rotate(-90 %.1f %.1f)' "
                  "text-anchor='middle'>%s</text>\n",
                  p.x0 - 48.0, p.y0 + p.h / 2, p.x0 - 48.0, p.y0 + p.h / 2, y_label.c_str());
    s += buf;
}

inline void svg_polyline(std::string& s, const SvgPanel& p, const std::vector<double>& x,
                         const std::vector<double>& y, const char* color) {
    s += "<polyline fill='none' stroke='";
    s += color;
    s += "' stroke-width='1.2' points='";
    char buf[48];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", p.sx(x[i]), p.sy(y[i]));
        s += buf;
    }
    s += "'/>\n";
}

inline void svg_marker(std::string& s, const SvgPanel& p, double x, double y,
                       const char* color) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx='%.1f' cy='%.1f' r='4' fill='none' stroke='%s' "
                  "stroke-width='1.5'/>\n",
                  p.sx(x), p.sy(y), color);
    s += buf;
}

inline std::pair<double, double> padded_range(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    const double pad = (hi - lo) == 0.0 ? std::max(1.0, std::abs(hi)) * 0.1 : (hi - lo) * 0.08;
    return {lo - pad, hi + pad};
}

}  // namespace detail

/// Two stacked log-x panels (magnitude, phase) with crossover markers.
inline std::string bode_svg(const BodeData& b, const StabilityReport* report = nullptr) {
    b.validate();
    std::string s =
        "<svg xmlns='http://www.w3.org/2000/svg' width='960' height='640' "
        "viewBox='0 0 960 640'>\n<rect width='960' height='640' fill='white'/>\n";
    const double lx0 = std::log10(b.freqs_hz.front());
    const double lx1 = std::log10(b.freqs_hz.back());

    auto [m0, m1] = detail::padded_range(b.mag_db);
    m0 = std::min(m0, -5.0);
    m1 = std::max(m1, 5.0);
    detail::SvgPanel mag{90, 30, 830, 260, lx0, lx1, m0, m1, true};
    detail::svg_axes(s, mag, "magnitude (dB)");
    detail::svg_polyline(s, mag, b.freqs_hz, b.mag_db, "#1f77b4");
    // 0 dB line
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#888' "
                  "stroke-dasharray='4,3'/>\n",
                  mag.x0, mag.sy(0.0), mag.x0 + mag.w, mag.sy(0.0));
    s += buf;

    auto [p0, p1] = detail::padded_range(b.phase_deg);
    p0 = std::min(p0, -185.0);
    detail::SvgPanel ph{90, 340, 830, 260, lx0, lx1, p0, p1, true};
    detail::svg_axes(s, ph, "phase (deg)");
    detail::svg_polyline(s, ph, b.freqs_hz, b.phase_deg, "#d62728");
    std::snprintf(buf, sizeof(buf),
                  "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#888' "
                  "stroke-dasharray='4,3'/>\n",
                  ph.x0, ph.sy(-180.0), ph.x0 + ph.w, ph.sy(-180.0));
    s += buf;

    if (report) {
        for (double fx : report->gain_crossover_hz)
            detail::svg_marker(s, mag, fx, 0.0, "#2ca02c");
        for (const auto& gm : report->gain_margins)
            detail::svg_marker(s, mag, gm.freq_hz, -gm.margin, "#9467bd");
        for (double fx : report->phase_crossover_hz)
            detail::svg_marker(s, ph, fx, detail::interp_at_hz(b.freqs_hz, b.phase_deg, fx),
                               "#9467bd");
        for (const auto& pm : report->phase_margins)
            detail::svg_marker(s, ph, pm.freq_hz,
                               detail::interp_at_hz(b.freqs_hz, b.phase_deg, pm.freq_hz),
                               "#2ca02c");
    }
    s += "</svg>\n";
    return s;
}

inline void write_bode_svg(const BodeData& b, const StabilityReport* report,
                           const std::string& path) {
    detail::write_file(path, bode_svg(b, report));
}

/// Single linear-x panel of the deviation waveform.
inline std::string waveform_svg(const TransientResult& r) {
    if (r.times_s.size() < 2) throw Error("refusing to emit an empty waveform");
    std::string s =
        "<svg xmlns='http://www.w3.org/2000/svg' width='960' height='420' "
        "viewBox='0 0 960 420'>\n<rect width='960' height='420' fill='white'/>\n";
    auto [y0, y1] = detail::padded_range(r.v_deviation_volts);
    detail::SvgPanel p{90, 30, 830, 340, r.times_s.front(), r.times_s.back(), y0, y1, false};
    detail::svg_axes(s, p, "deviation (V)");
    detail::svg_polyline(s, p, r.times_s, r.v_deviation_volts, "#1f77b4");
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#888' "
                  "stroke-dasharray='4,3'/>\n",
                  p.sx(r.t_step_s), p.y0, p.sx(r.t_step_s), p.y0 + p.h);
    s += buf;
    s += "</svg>\n";
    return s;
}

inline void write_waveform_svg(const TransientResult& r, const std::string& path) {
    detail::write_file(path, waveform_svg(r));
}

}  // namespace loopkit
