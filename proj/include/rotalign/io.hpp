#pragma once

// Deterministic text outputs: time-series CSV, sweep summary CSV, gnuplot
// scripts, and the reproducibility manifest. All doubles are written in
// shortest round-trip form so re-parsing and re-emitting is byte-stable.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotalign/config.hpp"
#include "rotalign/propagator.hpp"
#include "rotalign/sweep.hpp"
#include "rotalign/version.hpp"

namespace rotalign {

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("failed to open '" + path.string() + "' for writing: " +
                                 std::strerror(errno));
    }
    out << content;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed while writing '" + path.string() + "': " +
                                 std::strerror(errno));
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("failed to open '" + path.string() + "' for reading: " +
                                 std::strerror(errno));
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

inline std::string timeseries_csv_string(const TimeSeries& series) {
    std::string out = "t,alignment,orientation,norm,field";
    const bool with_populations =
        !series.records.empty() && !series.records.front().populations.empty();
    if (with_populations) {
        for (std::size_t j = 0; j < series.records.front().populations.size(); ++j) {
            out += ",p" + std::to_string(j);
        }
    }
    out += '\n';
    for (const auto& rec : series.records) {
        out += format_double(rec.t);
        out += ',';
        out += format_double(rec.alignment);
        out += ',';
        out += format_double(rec.orientation);
        out += ',';
        out += format_double(rec.norm);
        out += ',';
        out += format_double(rec.field);
        for (const double p : rec.populations) {
            out += ',';
            out += format_double(p);
        }
        out += '\n';
    }
    return out;
}

inline void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path) {
    if (series.records.empty()) {
        throw std::invalid_argument("write_timeseries_csv: refusing to write an empty series");
    }
    write_text_file(path, timeseries_csv_string(series));
}

inline std::string summary_csv_string(const std::vector<SweepResult>& results) {
    std::string out =
        "index,delta_omega,tau_fwhm,amplitude_ratio,delay_ratio,peak_alignment,t_peak,"
        "post_pulse_mean,post_pulse_amplitude,converged\n";
    for (const auto& res : results) {
        const RunSummary& s = res.summary;
        out += std::to_string(s.params.index);
        out += ',';
        out += format_double(s.params.delta_omega);
        out += ',';
        out += format_double(s.params.tau_fwhm);
        out += ',';
        if (s.params.color_mode == ColorMode::TwoColor) {
            out += format_double(s.params.amplitude_ratio);
            out += ',';
            out += format_double(s.params.delay_ratio);
        } else {
            out += ',';  // one-color runs have no second harmonic
        }
        out += ',';
        out += format_double(s.peak_alignment);
        out += ',';
        out += format_double(s.t_peak);
        out += ',';
        if (s.post_pulse_mean) out += format_double(*s.post_pulse_mean);
        out += ',';
        if (s.post_pulse_amplitude) out += format_double(*s.post_pulse_amplitude);
        out += ',';
        out += s.converged ? "true" : "false";
        out += '\n';
    }
    return out;
}

inline std::string run_csv_filename(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run_%04d.csv", index);
    return buf;
}

namespace detail {

inline std::string ratio_label(double ratio) {
    if (ratio == 1.0) return "F2=F1";
    if (std::abs(ratio - std::sqrt(2.0)) < 1e-12) return "F2=sqrt(2)F1";
    return "F2=" + format_double(ratio) + "F1";
}

inline std::string delay_label(double delay) {
    if (delay == 1.0) return "t2=t1";
    return "t2=" + format_double(delay) + "t1";
}

struct PanelKey {
    double tau;
    double ratio;
    double delay;
    friend auto operator<=>(const PanelKey&, const PanelKey&) = default;
};

}  // namespace detail

// Gnuplot multiplot script: one panel per non-delta_omega parameter tuple,
// one curve per delta_omega inside each panel. Line styles follow the
// solid / dashed / dot-dashed convention.
inline std::string plot_script_string(const std::vector<SweepResult>& results,
                                      const std::string& output_png) {
    // panels in first-appearance (expansion) order
    std::vector<detail::PanelKey> panel_order;
    std::map<detail::PanelKey, std::vector<const SweepResult*>> panels;
    bool vary_tau = false, vary_ratio = false, vary_delay = false;
    for (const auto& res : results) {
        detail::PanelKey key{res.config.tau_fwhm, res.config.amplitude_ratio,
                             res.config.delay_ratio};
        auto [it, inserted] = panels.try_emplace(key);
        if (inserted) panel_order.push_back(key);
        it->second.push_back(&res);
    }
    for (const auto& key : panel_order) {
        vary_tau |= key.tau != panel_order.front().tau;
        vary_ratio |= key.ratio != panel_order.front().ratio;
        vary_delay |= key.delay != panel_order.front().delay;
    }

    const int n_panels = static_cast<int>(panel_order.size());
    const int cols = n_panels < 3 ? n_panels : 3;
    const int rows = (n_panels + cols - 1) / cols;

    std::string s;
    s += "# generated by rotalign " + std::string(kToolVersion) + "\n";
    s += "set datafile separator ','\n";
    s += "set terminal pngcairo size " + std::to_string(500 * cols) + "," +
         std::to_string(380 * rows) + "\n";
    s += "set output '" + output_png + "'\n";
    s += "set multiplot layout " + std::to_string(rows) + "," + std::to_string(cols) + "\n";
    s += "set xlabel 't  [hbar/B]'\n";
    s += "set ylabel '<cos^2 theta>'\n";
    s += "set yrange [0:1]\n";
    s += "set key top right\n";
    const int dashtypes[] = {1, 2, 4};  // solid, dashed, dot-dashed
    for (const auto& key : panel_order) {
        std::string label;
        if (vary_tau || (!vary_ratio && !vary_delay)) label = "tau=" + format_double(key.tau);
        if (vary_ratio) {
            if (!label.empty()) label += ", ";
            label += detail::ratio_label(key.ratio);
        }
        if (vary_delay) {
            if (!label.empty()) label += ", ";
            label += detail::delay_label(key.delay);
        }
        s += "set title '" + label + "'\n";
        s += "plot ";
        const auto& runs = panels.at(key);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (i > 0) s += ", \\\n     ";
            s += "'" + run_csv_filename(runs[i]->config.index) + "' using 1:2 with lines dashtype " +
                 std::to_string(dashtypes[i % 3]) + " lc rgb 'black' title 'dw=" +
                 format_double(runs[i]->config.delta_omega) + "'";
        }
        s += '\n';
    }
    s += "unset multiplot\n";
    return s;
}

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string timestamp;
    std::vector<std::string> output_paths;
};

inline json manifest_json(const RunManifest& manifest, const json& resolved_config) {
    json j;
    j["config_hash"] = manifest.config_hash;
    j["tool_version"] = manifest.tool_version;
    j["timestamp"] = manifest.timestamp;
    j["output_paths"] = manifest.output_paths;
    j["resolved_config"] = resolved_config;
    return j;
}

inline std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Writes every artifact of a finished (single- or multi-run) computation
// into `dir`: per-run CSVs, summary, plot script, manifest.
inline RunManifest write_run_outputs(const std::vector<SweepResult>& results,
                                     const json& resolved_config,
                                     const std::filesystem::path& dir,
                                     const std::string& plot_png_name = "plot.png") {
    std::filesystem::create_directories(dir);
    RunManifest manifest;
    manifest.config_hash = config_hash(resolved_config);
    manifest.tool_version = std::string(kToolVersion);
    manifest.timestamp = utc_timestamp_now();
    for (const auto& res : results) {
        const std::string name = run_csv_filename(res.config.index);
        write_timeseries_csv(res.series, dir / name);
        manifest.output_paths.push_back(name);
    }
    write_text_file(dir / "summary.csv", summary_csv_string(results));
    manifest.output_paths.push_back("summary.csv");
    write_text_file(dir / "plot.gp", plot_script_string(results, plot_png_name));
    manifest.output_paths.push_back("plot.gp");
    write_text_file(dir / "manifest.json",
                    manifest_json(manifest, resolved_config).dump(2) + "\n");
    return manifest;
}

}  // namespace rotalign
