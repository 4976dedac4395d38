#pragma once

// JSON run configuration shared by the CLI subcommands. Schema version 1.
//
// {
//   "version": 1,
//   "kernel": {"family": "szego_disk" | "bergman_disk" | "paley_wiener" | "gaussian",
//              "bandwidth": 1.0,          // paley_wiener only
//              "gamma": 1.0},             // gaussian only
//   "points": [[re, im], ...],
//   "target": [re, im],
//   "epsilons": [0.1, 0.2] | {"min": 1e-3, "max": 0.5, "count": 40},
//   "grid": {"re_min": -0.9, "re_max": 0.9, "im_min": -0.9, "im_max": 0.9,
//            "nx": 64, "ny": 64},         // optional; maximizer output only
//   "tolerances": {"tol_zero": 1e-10, "tol_cluster": 1e-8,
//                  "root_residual": 1e-12},                        // optional
//   "verify": {"dual_grid": 100, "primal_grid": 200, "max_gap_rel": 0.05,
//              "perturbations": 20, "perturbation_scale": 1e-3}    // optional
// }
//
// Complex numbers are two-element arrays [re, im] everywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkcont/errors.hpp"
#include "rkcont/kernels.hpp"
#include "rkcont/types.hpp"

namespace rkcont {

struct GridSpec {
    double re_min = 0.0, re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;
    std::size_t nx = 1, ny = 1;
};

struct VerifyOptions {
    std::size_t dual_grid = 100;        ///< per-axis dual multiplier grid size
    std::size_t primal_grid = 200;      ///< eta grid size for the feasible trials
    double max_gap_rel = 0.05;          ///< sandwich gap threshold, relative to A
    std::size_t perturbations = 20;     ///< random coefficient perturbations
    double perturbation_scale = 1e-3;   ///< Euclidean norm of each perturbation
};

struct RunConfig {
    KernelSpec kernel;
    std::vector<Complex> points;
    Complex target{0.0, 0.0};
    std::vector<double> epsilons;  ///< normalized: positive, ascending
    std::optional<GridSpec> grid;
    Tolerances tolerances;
    VerifyOptions verify;

    ProblemInstance instance() const { return {kernel, points, target}; }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

inline double require_finite(const nlohmann::json& j, const std::string& field) {
    const double x = require_number(j, field);
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

inline std::size_t require_count(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0) {
        throw ConfigError(field, "expected a positive integer");
    }
    return j.get<std::size_t>();
}

inline Complex parse_complex(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(field, "expected a two-element array [re, im]");
    }
    return {require_finite(j[0], field + "[0]"), require_finite(j[1], field + "[1]")};
}

inline KernelSpec parse_kernel(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("kernel", "expected an object");
    if (!j.contains("family")) throw ConfigError("kernel.family", "missing");
    if (!j["family"].is_string()) throw ConfigError("kernel.family", "expected a string");
    const std::string family = j["family"].get<std::string>();

    KernelSpec spec;
    if (family == "szego_disk") {
        spec = KernelSpec::szego_disk();
    } else if (family == "bergman_disk") {
        spec = KernelSpec::bergman_disk();
    } else if (family == "paley_wiener") {
        spec = KernelSpec::paley_wiener();
        if (j.contains("bandwidth")) {
            spec.bandwidth = require_finite(j["bandwidth"], "kernel.bandwidth");
        }
        if (!(spec.bandwidth > 0.0)) throw ConfigError("kernel.bandwidth", "must be positive");
    } else if (family == "gaussian") {
        spec = KernelSpec::gaussian();
        if (j.contains("gamma")) {
            spec.gamma = require_finite(j["gamma"], "kernel.gamma");
        }
        if (!(spec.gamma > 0.0)) throw ConfigError("kernel.gamma", "must be positive");
    } else {
        throw ConfigError("kernel.family",
                          "unknown family '" + family +
                              "' (expected szego_disk, bergman_disk, paley_wiener or gaussian)");
    }
    return spec;
}

inline std::vector<double> parse_epsilons(const nlohmann::json& j) {
    std::vector<double> eps;
    if (j.is_array()) {
        if (j.empty()) throw ConfigError("epsilons", "list must not be empty");
        for (std::size_t i = 0; i < j.size(); ++i) {
            eps.push_back(require_finite(j[i], "epsilons[" + std::to_string(i) + "]"));
        }
    } else if (j.is_object()) {
        const double lo = require_finite(j.value("min", nlohmann::json()), "epsilons.min");
        const double hi = require_finite(j.value("max", nlohmann::json()), "epsilons.max");
        const std::size_t count = require_count(j.value("count", nlohmann::json()), "epsilons.count");
        if (!(lo > 0.0)) throw ConfigError("epsilons.min", "must be positive");
        if (!(hi >= lo)) throw ConfigError("epsilons.max", "must be >= epsilons.min");
        if (count == 1) {
            eps.push_back(lo);
        } else {
            const double step = std::log(hi / lo) / static_cast<double>(count - 1);
            for (std::size_t i = 0; i < count; ++i) {
                eps.push_back(lo * std::exp(step * static_cast<double>(i)));
            }
        }
    } else {
        throw ConfigError("epsilons", "expected a list of numbers or {min, max, count}");
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) {
            throw ConfigError("epsilons[" + std::to_string(i) + "]", "must be positive");
        }
    }
    std::sort(eps.begin(), eps.end());
    return eps;
}

inline GridSpec parse_grid(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("grid", "expected an object");
    GridSpec g;
    for (const char* key : {"re_min", "re_max", "im_min", "im_max", "nx", "ny"}) {
        if (!j.contains(key)) throw ConfigError(std::string("grid.") + key, "missing");
    }
    g.re_min = require_finite(j["re_min"], "grid.re_min");
    g.re_max = require_finite(j["re_max"], "grid.re_max");
    g.im_min = require_finite(j["im_min"], "grid.im_min");
    g.im_max = require_finite(j["im_max"], "grid.im_max");
    g.nx = require_count(j["nx"], "grid.nx");
    g.ny = require_count(j["ny"], "grid.ny");
    if (!(g.re_max >= g.re_min)) throw ConfigError("grid.re_max", "must be >= grid.re_min");
    if (!(g.im_max >= g.im_min)) throw ConfigError("grid.im_max", "must be >= grid.im_min");
    return g;
}

inline Tolerances parse_tolerances(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("tolerances", "expected an object");
    Tolerances tol;
    if (j.contains("tol_zero")) tol.tol_zero = require_finite(j["tol_zero"], "tolerances.tol_zero");
    if (j.contains("tol_cluster")) {
        tol.tol_cluster = require_finite(j["tol_cluster"], "tolerances.tol_cluster");
    }
    if (j.contains("root_residual")) {
        tol.root_residual = require_finite(j["root_residual"], "tolerances.root_residual");
    }
    if (!(tol.tol_zero > 0.0)) throw ConfigError("tolerances.tol_zero", "must be positive");
    if (!(tol.tol_cluster >= 0.0)) throw ConfigError("tolerances.tol_cluster", "must be >= 0");
    if (!(tol.root_residual > 0.0)) throw ConfigError("tolerances.root_residual", "must be positive");
    return tol;
}

inline VerifyOptions parse_verify(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("verify", "expected an object");
    VerifyOptions v;
    if (j.contains("dual_grid")) v.dual_grid = require_count(j["dual_grid"], "verify.dual_grid");
    if (j.contains("primal_grid")) {
        v.primal_grid = require_count(j["primal_grid"], "verify.primal_grid");
    }
    if (j.contains("max_gap_rel")) {
        v.max_gap_rel = require_finite(j["max_gap_rel"], "verify.max_gap_rel");
        if (!(v.max_gap_rel > 0.0)) throw ConfigError("verify.max_gap_rel", "must be positive");
    }
    if (j.contains("perturbations")) {
        v.perturbations = require_count(j["perturbations"], "verify.perturbations");
    }
    if (j.contains("perturbation_scale")) {
        v.perturbation_scale = require_finite(j["perturbation_scale"], "verify.perturbation_scale");
        if (!(v.perturbation_scale > 0.0)) {
            throw ConfigError("verify.perturbation_scale", "must be positive");
        }
    }
    return v;
}

}  // namespace detail

/// Parses and validates a run configuration. Throws ConfigError naming the
/// offending field, or the validate_instance errors for ill-posed instances.
inline RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");
    if (!j.contains("version")) throw ConfigError("version", "missing");
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) {
        throw ConfigError("version", "unsupported schema version (expected 1)");
    }
    for (const char* key : {"kernel", "points", "target", "epsilons"}) {
        if (!j.contains(key)) throw ConfigError(key, "missing");
    }

    RunConfig cfg;
    cfg.kernel = detail::parse_kernel(j["kernel"]);
    if (!j["points"].is_array() || j["points"].empty()) {
        throw ConfigError("points", "expected a non-empty array of [re, im] pairs");
    }
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
        cfg.points.push_back(
            detail::parse_complex(j["points"][i], "points[" + std::to_string(i) + "]"));
    }
    cfg.target = detail::parse_complex(j["target"], "target");
    cfg.epsilons = detail::parse_epsilons(j["epsilons"]);
    if (j.contains("grid")) cfg.grid = detail::parse_grid(j["grid"]);
    if (j.contains("tolerances")) cfg.tolerances = detail::parse_tolerances(j["tolerances"]);
    if (j.contains("verify")) cfg.verify = detail::parse_verify(j["verify"]);

    validate_instance(cfg.kernel, cfg.points, cfg.target);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError("config", std::string("JSON parse error: ") + err.what());
    }
    return parse_config(j);
}

}  // namespace rkcont
