#pragma once

// Strict configuration parsing. Every key is validated against a closed set;
// unknown keys are fatal so a typo cannot silently fall back to a default.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotalign/sweep.hpp"
#include "rotalign/units.hpp"

namespace rotalign {

using json = nlohmann::json;

struct ResolvedConfig {
    SweepSpec sweep;
    std::optional<PhysicalMolecule> physical;
    json resolved;  // canonical echo with all defaults filled in
    std::vector<std::string> warnings;
};

inline std::string config_hash(const json& resolved) {
    // FNV-1a 64 over the canonical dump (nlohmann orders keys)
    const std::string text = resolved.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace detail {

class ConfigReader {
  public:
    ConfigReader(const json& doc, std::string context) : doc_(doc), context_(std::move(context)) {
        if (!doc.is_object()) {
            throw std::invalid_argument("config: " + context_ + " must be a JSON object");
        }
    }

    bool has(const std::string& key) const { return doc_.contains(key); }

    double number(const std::string& key, double fallback) {
        if (!take(key)) return fallback;
        return as_number(doc_.at(key), key);
    }

    std::optional<double> number_opt(const std::string& key) {
        if (!take(key)) return std::nullopt;
        return as_number(doc_.at(key), key);
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> fallback) {
        if (!take(key)) return fallback;
        const json& v = doc_.at(key);
        if (v.is_array()) {
            std::vector<double> out;
            for (const auto& item : v) out.push_back(as_number(item, key));
            if (out.empty()) fail(key, "must not be an empty list");
            return out;
        }
        return {as_number(v, key)};
    }

    int integer(const std::string& key, int fallback) {
        if (!take(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!take(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_boolean()) fail(key, "must be a boolean");
        return v.get<bool>();
    }

    std::string text(const std::string& key, std::string fallback) {
        if (!take(key)) return fallback;
        const json& v = doc_.at(key);
        if (!v.is_string()) fail(key, "must be a string");
        return v.get<std::string>();
    }

    const json* object(const std::string& key) {
        if (!take(key)) return nullptr;
        const json& v = doc_.at(key);
        if (!v.is_object()) fail(key, "must be an object");
        return &v;
    }

    // every key must have been consumed by now
    void finish() const {
        for (const auto& [key, value] : doc_.items()) {
            if (!consumed_.contains(key)) {
                throw std::invalid_argument("config: unknown key '" + qualified(key) + "'");
            }
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw std::invalid_argument("config: key '" + qualified(key) + "' " + what);
    }

  private:
    bool take(const std::string& key) {
        if (!doc_.contains(key)) return false;
        consumed_.insert(key);
        return true;
    }

    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail(key, "must be a number");
        return v.get<double>();
    }

    std::string qualified(const std::string& key) const {
        return context_.empty() ? key : context_ + "." + key;
    }

    const json& doc_;
    std::string context_;
    std::set<std::string> consumed_;
};

inline ColorMode parse_color_mode(ConfigReader& reader) {
    const std::string s = reader.text("color_mode", "one_color");
    if (s == "one_color") return ColorMode::OneColor;
    if (s == "two_color") return ColorMode::TwoColor;
    reader.fail("color_mode", "must be 'one_color' or 'two_color' (got '" + s + "')");
}

inline InteractionMode parse_interaction(ConfigReader& reader) {
    const std::string s = reader.text("interaction", "cycle_averaged");
    if (s == "cycle_averaged") return InteractionMode::CycleAveraged;
    if (s == "full_carrier") return InteractionMode::FullCarrier;
    reader.fail("interaction", "must be 'cycle_averaged' or 'full_carrier' (got '" + s + "')");
}

inline PhysicalMolecule parse_physical(const json& block, double& intensity, double& tau_s) {
    ConfigReader reader(block, "physical");
    PhysicalMolecule mol;
    if (auto v = reader.number_opt("rotational_constant_invcm")) {
        mol.rotational_constant_invcm = *v;
    } else {
        reader.fail("rotational_constant_invcm", "is required");
    }
    mol.dipole_debye = reader.number("dipole_debye", 0.0);
    if (auto v = reader.number_opt("alpha_parallel_angstrom3")) {
        mol.alpha_parallel_angstrom3 = *v;
    } else {
        reader.fail("alpha_parallel_angstrom3", "is required");
    }
    if (auto v = reader.number_opt("alpha_perp_angstrom3")) {
        mol.alpha_perp_angstrom3 = *v;
    } else {
        reader.fail("alpha_perp_angstrom3", "is required");
    }
    if (auto v = reader.number_opt("peak_intensity_w_cm2")) {
        intensity = *v;
    } else {
        reader.fail("peak_intensity_w_cm2", "is required");
    }
    if (auto v = reader.number_opt("tau_fwhm_fs")) {
        tau_s = *v * 1e-15;
    } else {
        reader.fail("tau_fwhm_fs", "is required");
    }
    reader.finish();
    return mol;
}

}  // namespace detail

inline ResolvedConfig parse_config(const json& doc) {
    detail::ConfigReader reader(doc, "");
    // surface typos before any missing-key diagnostics
    static const std::set<std::string> known_keys{
        "color_mode",      "interaction",       "delta_omega",
        "delta_omega_mu",  "delta_omega_perp",  "tau_fwhm",
        "amplitude_ratio", "delay_ratio",       "carrier_omega",
        "j_max",           "m",                 "initial_j",
        "n_nodes",         "dt",                "t_start",
        "t_end",           "record_every",      "record_populations",
        "refine_dt",       "refine_tol",        "refine_max_halvings",
        "post_pulse_cutoff", "check_basis",     "physical"};
    for (const auto& [key, value] : doc.items()) {
        if (!known_keys.contains(key)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    ResolvedConfig out;
    SweepSpec& spec = out.sweep;

    spec.color_mode = detail::parse_color_mode(reader);
    spec.interaction = detail::parse_interaction(reader);

    const json* physical_block = reader.object("physical");
    const bool have_physical = physical_block != nullptr;

    spec.delta_omegas = reader.number_list("delta_omega", {});
    spec.tau_fwhms = reader.number_list("tau_fwhm", {});
    spec.delta_omega_mu = reader.number("delta_omega_mu", 0.0);
    spec.delta_omega_perp = reader.number("delta_omega_perp", 0.0);

    if (have_physical) {
        if (!spec.delta_omegas.empty() || !spec.tau_fwhms.empty() || spec.delta_omega_mu != 0.0 ||
            spec.delta_omega_perp != 0.0) {
            throw std::invalid_argument(
                "config: 'physical' is mutually exclusive with the dimensionless keys "
                "delta_omega/tau_fwhm/delta_omega_mu/delta_omega_perp");
        }
        double intensity = 0.0;
        double tau_s = 0.0;
        out.physical = detail::parse_physical(*physical_block, intensity, tau_s);
        const DimensionlessDrive drive = to_dimensionless(*out.physical, intensity, tau_s);
        spec.delta_omegas = {drive.couplings.delta_omega};
        spec.tau_fwhms = {drive.tau_fwhm};
        spec.delta_omega_mu = drive.couplings.delta_omega_mu;
        spec.delta_omega_perp = drive.couplings.delta_omega_perp;
    } else {
        if (spec.delta_omegas.empty()) reader.fail("delta_omega", "is required");
        if (spec.tau_fwhms.empty()) reader.fail("tau_fwhm", "is required");
    }

    spec.amplitude_ratios = reader.number_list("amplitude_ratio", {1.0});
    spec.delay_ratios = reader.number_list("delay_ratio", {1.0});
    spec.carrier_omega = reader.number("carrier_omega", 0.0);

    spec.j_max = reader.integer("j_max", 64);
    spec.m = reader.integer("m", 0);
    spec.initial_j = reader.integer("initial_j", std::abs(spec.m));
    spec.n_nodes = reader.integer("n_nodes", 0);
    spec.dt = reader.number("dt", 1e-4);
    spec.t_start = reader.number("t_start", 0.0);
    spec.t_end = reader.number("t_end", 0.0);
    spec.record_every = reader.integer("record_every", 20);
    spec.record_populations = reader.boolean("record_populations", false);
    spec.refine_dt = reader.boolean("refine_dt", true);
    spec.refine_tol = reader.number("refine_tol", 1e-7);
    spec.refine_max_halvings = reader.integer("refine_max_halvings", 6);
    spec.post_pulse_cutoff = reader.number("post_pulse_cutoff", 1e-6);
    spec.check_basis = reader.boolean("check_basis", false);
    reader.finish();

    // constraint checks, each naming the offending key
    for (double v : spec.delta_omegas) {
        if (!(v >= 0.0) || !std::isfinite(v)) reader.fail("delta_omega", "values must be finite and >= 0");
    }
    for (double v : spec.tau_fwhms) {
        if (!(v > 0.0)) reader.fail("tau_fwhm", "values must be > 0");
    }
    for (double v : spec.amplitude_ratios) {
        if (!(v >= 0.0)) reader.fail("amplitude_ratio", "values must be >= 0");
    }
    for (double v : spec.delay_ratios) {
        if (!(v > 0.0)) reader.fail("delay_ratio", "values must be > 0");
    }
    if (!(spec.delta_omega_mu >= 0.0)) reader.fail("delta_omega_mu", "must be >= 0");
    if (!(spec.delta_omega_perp >= 0.0)) reader.fail("delta_omega_perp", "must be >= 0");
    if (spec.j_max < 0) reader.fail("j_max", "must be >= 0");
    if (spec.j_max < std::abs(spec.m)) reader.fail("m", "requires |m| <= j_max");
    if (spec.initial_j < std::abs(spec.m) || spec.initial_j > spec.j_max) {
        reader.fail("initial_j", "must lie in [|m|, j_max]");
    }
    if (spec.n_nodes != 0 && spec.n_nodes < spec.j_max + 1) {
        reader.fail("n_nodes", "must be 0 (auto) or >= j_max + 1");
    }
    if (!(spec.dt > 0.0)) reader.fail("dt", "must be > 0");
    if (spec.t_end != 0.0 && spec.t_end <= spec.t_start) {
        reader.fail("t_end", "must be > t_start (or 0 for automatic)");
    }
    if (spec.record_every < 1) reader.fail("record_every", "must be >= 1");
    if (!(spec.refine_tol > 0.0)) reader.fail("refine_tol", "must be > 0");
    if (spec.refine_max_halvings < 1) reader.fail("refine_max_halvings", "must be >= 1");
    if (!(spec.post_pulse_cutoff > 0.0 && spec.post_pulse_cutoff < 1.0)) {
        reader.fail("post_pulse_cutoff", "must lie in (0, 1)");
    }
    if (spec.interaction == InteractionMode::FullCarrier) {
        if (!(spec.carrier_omega > 0.0)) {
            reader.fail("carrier_omega", "is required (> 0) when interaction is 'full_carrier'");
        }
        for (double tau : spec.tau_fwhms) {
            if (spec.carrier_omega * tau < 10.0) {
                out.warnings.push_back(
                    "carrier_omega * tau_fwhm = " + std::to_string(spec.carrier_omega * tau) +
                    " < 10; the carrier is not well separated from the envelope");
            }
        }
    } else if (spec.delta_omega_mu > 0.0) {
        reader.fail("delta_omega_mu",
                    "has no effect under 'cycle_averaged' interaction (the dipole term "
                    "averages to zero); set interaction to 'full_carrier'");
    }

    // canonical echo
    json& r = out.resolved;
    r["color_mode"] = spec.color_mode == ColorMode::OneColor ? "one_color" : "two_color";
    r["interaction"] =
        spec.interaction == InteractionMode::CycleAveraged ? "cycle_averaged" : "full_carrier";
    r["delta_omega"] = spec.delta_omegas;
    r["tau_fwhm"] = spec.tau_fwhms;
    r["amplitude_ratio"] = spec.amplitude_ratios;
    r["delay_ratio"] = spec.delay_ratios;
    r["delta_omega_mu"] = spec.delta_omega_mu;
    r["delta_omega_perp"] = spec.delta_omega_perp;
    r["carrier_omega"] = spec.carrier_omega;
    r["j_max"] = spec.j_max;
    r["m"] = spec.m;
    r["initial_j"] = spec.initial_j;
    r["n_nodes"] = spec.n_nodes > 0 ? spec.n_nodes : 2 * spec.j_max + 1;
    r["dt"] = spec.dt;
    r["t_start"] = spec.t_start;
    r["t_end"] = spec.t_end;  // 0 means per-run automatic window
    r["record_every"] = spec.record_every;
    r["record_populations"] = spec.record_populations;
    r["refine_dt"] = spec.refine_dt;
    r["refine_tol"] = spec.refine_tol;
    r["refine_max_halvings"] = spec.refine_max_halvings;
    r["post_pulse_cutoff"] = spec.post_pulse_cutoff;
    r["check_basis"] = spec.check_basis;
    if (out.physical) {
        r["physical"] = *physical_block;
    }
    return out;
}

inline ResolvedConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// single-run view of a config whose axes must all be singletons
inline void require_single_run(const SweepSpec& spec) {
    auto check = [](const std::vector<double>& axis, const char* name) {
        if (axis.size() != 1) {
            throw std::invalid_argument(std::string("config: '") + name +
                                        "' must be a single value here (got a list of " +
                                        std::to_string(axis.size()) + "); use the sweep command");
        }
    };
    check(spec.delta_omegas, "delta_omega");
    check(spec.tau_fwhms, "tau_fwhm");
    if (spec.color_mode == ColorMode::TwoColor) {
        check(spec.amplitude_ratios, "amplitude_ratio");
        check(spec.delay_ratios, "delay_ratio");
    }
}

}  // namespace rotalign
