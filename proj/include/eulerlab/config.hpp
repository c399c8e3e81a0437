#ifndef EULERLAB_CONFIG_HPP
#define EULERLAB_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "initial_data.hpp"
#include "stability.hpp"

namespace eulerlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Minimal declarative config: [section] headers, key = value lines, '#'
// comments.  Values keep their raw text; typed getters parse on demand.
class ConfigFile {
public:
    static ConfigFile parse_string(const std::string& text) {
        ConfigFile cfg;
        cfg.raw_ = text;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            cfg.entries_[section + "." + key] = value;
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    const std::string& raw_text() const { return raw_; }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        entries_[section + "." + key] = value;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        const auto it = entries_.find(section + "." + key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        return parse_double(*v, section + "." + key);
    }

    std::size_t get_size(const std::string& section, const std::string& key,
                         std::size_t fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        try {
            return static_cast<std::size_t>(std::stoull(*v));
        } catch (const std::exception&) {
            throw ConfigError("bad integer for " + section + "." + key + ": " + *v);
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "on" || *v == "1") return true;
        if (*v == "false" || *v == "off" || *v == "0") return false;
        throw ConfigError("bad boolean for " + section + "." + key + ": " + *v);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return get(section, key).value_or(fallback);
    }

    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        const auto v = get(section, key);
        std::vector<double> out;
        if (!v || trim(*v).empty()) return out;
        std::stringstream ss(*v);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(parse_double(trim(cell), section + "." + key));
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static double parse_double(const std::string& s, const std::string& where) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad number for " + where + ": " + s);
        }
    }

    std::string raw_;
    std::map<std::string, std::string> entries_;
};

// Initial-field kinds the pipelines accept: the blob families of the data
// module plus the analytic fields used for validation runs.
enum class FieldKind { blobs, taylor_green, zero };

struct ExperimentConfig {
    Grid2D grid{256, two_pi};
    SolverConfig solver;
    FieldKind field_kind = FieldKind::blobs;
    InitialDataSpec data;
    PerturbationSpec perturbation;
    std::vector<double> deltas;
    double beta = 0.25;
    std::size_t samples_per_unit_time = 32;
    std::size_t history_every = 0;  // 0: no velocity history frames
    double flow_error_bound = 1e-4;
    double box_error_fraction = 0.01;
    ApproximationKind approx_kind = ApproximationKind::mollification;
    std::vector<double> approx_parameters;

    static ExperimentConfig from(const ConfigFile& cfg) {
        ExperimentConfig out;
        out.grid = Grid2D(cfg.get_size("grid", "n", 256),
                          cfg.get_double("grid", "box_length", two_pi));

        out.solver.cfl = cfg.get_double("solver", "cfl", 0.5);
        out.solver.t_end = cfg.get_double("solver", "t_end", 1.0);
        out.solver.dealias = cfg.get_bool("solver", "dealias", true);
        out.solver.conservation_check_every = cfg.get_size("solver", "conservation_check_every", 8);
        out.solver.holder_alpha = cfg.get_double("solver", "holder_alpha", 0.0);
        out.solver.validate();
        out.history_every = cfg.get_size("solver", "history_every", 0);

        const std::string kind = cfg.get_string("data", "kind", "smooth_dipole");
        if (kind == "taylor_green") {
            out.field_kind = FieldKind::taylor_green;
        } else if (kind == "zero") {
            out.field_kind = FieldKind::zero;
        } else {
            out.field_kind = FieldKind::blobs;
            if (kind == "smooth_dipole")
                out.data.kind = DataKind::smooth_dipole;
            else if (kind == "holder_patch_pair")
                out.data.kind = DataKind::holder_patch_pair;
            else if (kind == "mollified_vortex_patch")
                out.data.kind = DataKind::mollified_vortex_patch;
            else
                throw ConfigError("unknown data.kind: " + kind);
            out.data.alpha = cfg.get_double("data", "alpha", 0.5);
            out.data.seed = cfg.get_size("data", "seed", 1);
            const std::vector<double> centers = cfg.get_list("data", "centers");
            const std::vector<double> radii = cfg.get_list("data", "radii");
            const std::vector<double> amplitudes = cfg.get_list("data", "amplitudes");
            if (centers.empty() && radii.empty() && amplitudes.empty()) {
                out.data = make_default_pair(out.data.kind, out.grid, out.data.alpha);
                out.data.seed = cfg.get_size("data", "seed", 1);
            } else {
                if (centers.size() != 2 * radii.size() || radii.size() != amplitudes.size())
                    throw ConfigError(
                        "data.centers must hold one x,y pair per entry of data.radii and "
                        "data.amplitudes");
                for (std::size_t k = 0; k < radii.size(); ++k)
                    out.data.blobs.push_back(
                        {centers[2 * k], centers[2 * k + 1], radii[k], amplitudes[k]});
                validate_initial_data(out.data, out.grid);
            }
        }

        const std::string mode = cfg.get_string("perturbation", "mode", "translate");
        if (mode == "translate")
            out.perturbation.mode = PerturbationMode::translate;
        else if (mode == "amplitude_wiggle")
            out.perturbation.mode = PerturbationMode::amplitude_wiggle;
        else
            throw ConfigError("unknown perturbation.mode: " + mode);
        out.perturbation.delta = cfg.get_double("perturbation", "delta", 1e-3);
        out.deltas = cfg.get_list("perturbation", "deltas");
        if (out.deltas.empty()) out.deltas = {out.perturbation.delta};

        out.beta = cfg.get_double("analysis", "beta", 0.25);
        out.samples_per_unit_time = cfg.get_size("analysis", "samples_per_unit_time", 32);
        out.flow_error_bound = cfg.get_double("analysis", "flow_error_bound", 1e-4);
        out.box_error_fraction = cfg.get_double("analysis", "box_error_fraction", 0.01);
        const std::string approx = cfg.get_string("analysis", "approximation", "mollification");
        if (approx == "mollification")
            out.approx_kind = ApproximationKind::mollification;
        else if (approx == "truncation")
            out.approx_kind = ApproximationKind::truncation;
        else
            throw ConfigError("unknown analysis.approximation: " + approx);
        out.approx_parameters = cfg.get_list("analysis", "approximation_parameters");
        return out;
    }

    RealField make_initial_field() const {
        switch (field_kind) {
            case FieldKind::zero: return RealField(grid);
            case FieldKind::taylor_green: {
                const double k = two_pi / grid.box_length;
                return RealField::sample(grid, [k](double x, double y) {
                    return -2.0 * k * k * std::sin(k * x) * std::sin(k * y);
                });
            }
            case FieldKind::blobs: return generate_initial_data(data, grid);
        }
        throw ConfigError("unreachable field kind");
    }
};

}  // namespace eulerlab

#endif
