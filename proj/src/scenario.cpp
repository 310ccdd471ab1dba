#include "herdlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "herdlab/errors.hpp"

namespace herdlab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(where.empty() ? it.key() : where + "." + it.key(),
                                  "unknown key");
}

double require_number(const json& obj, const std::string& key) {
    if (!obj.contains(key)) throw ValidationError(key, "missing required field");
    if (!obj[key].is_number()) throw ValidationError(key, "must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ValidationError(key, "must be a number");
    return obj[key].get<double>();
}

int int_or(const json& obj, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ValidationError(key, "must be an integer");
    return obj[key].get<int>();
}

json resolved_document(const ScenarioConfig& cfg) {
    json doc;
    doc["mode"] = cfg.params.mode == PursuitMode::Spiral ? "spiral" : "circular";
    doc["k"] = cfg.params.k;
    doc["k1"] = cfg.params.k1;
    doc["R"] = cfg.params.R;
    doc["omega"] = cfg.params.omega;
    doc["kappa"] = cfg.params.kappa;
    json evs = json::array();
    for (const auto& e : cfg.evaders) evs.push_back({e.x, e.y});
    doc["evaders"] = evs;
    doc["integrator"] = {
        {"method", cfg.integrator.method == Method::Rk4Fixed ? "rk4" : "rk45"},
        {"step", cfg.integrator.step},
        {"rel_tol", cfg.integrator.rel_tol},
        {"abs_tol", cfg.integrator.abs_tol},
        {"max_step", cfg.integrator.max_step},
        {"t_end", cfg.integrator.t_end},
        {"record_every", cfg.integrator.record_every},
    };
    doc["convergence"] = {{"tol", cfg.conv_tol}, {"window", cfg.conv_window}};
    doc["roa"] = {{"samples", cfg.roa_samples},
                  {"kappa_count", cfg.roa_kappa_count},
                  {"circle_samples", cfg.roa_circle_samples}};
    json sweep = {{"r_min", cfg.sweep_grid.r_min},   {"r_max", cfg.sweep_grid.r_max},
                  {"nr", cfg.sweep_grid.nr},         {"psi_min", cfg.sweep_grid.psi_min},
                  {"psi_max", cfg.sweep_grid.psi_max}, {"npsi", cfg.sweep_grid.npsi}};
    if (cfg.sweep_anchor)
        sweep["anchor"] = {{"kappa", cfg.sweep_anchor->kappa}, {"psi0", cfg.sweep_anchor->psi0}};
    doc["sweep"] = sweep;
    doc["pi_roa"] = {{"theta_samples", cfg.pi_theta_samples},
                     {"radius_count", cfg.pi_radius_count}};
    doc["outputs"] = {{"prefix", cfg.prefix}};
    return doc;
}

}  // namespace

std::string ScenarioConfig::resolved_json() const { return resolved_document(*this).dump(2); }

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ValidationError("<root>", "scenario must be a JSON object");
    reject_unknown_keys(doc,
                        {"mode", "k", "k1", "R", "omega", "kappa", "evaders", "integrator",
                         "convergence", "roa", "sweep", "pi_roa", "outputs"},
                        "");

    ScenarioConfig cfg;

    if (!doc.contains("mode")) throw ValidationError("mode", "missing required field");
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "spiral")
        cfg.params.mode = PursuitMode::Spiral;
    else if (mode == "circular")
        cfg.params.mode = PursuitMode::Circular;
    else
        throw ValidationError("mode", "must be \"spiral\" or \"circular\"");

    cfg.params.k = require_number(doc, "k");
    cfg.params.R = require_number(doc, "R");
    cfg.params.omega = require_number(doc, "omega");
    cfg.params.k1 = number_or(doc, "k1", 0.0);
    if (cfg.params.mode == PursuitMode::Spiral && !(cfg.params.k1 > 0.0))
        throw ValidationError("k1", "spiral mode requires k1 > 0");
    if (cfg.params.mode == PursuitMode::Circular && cfg.params.k1 != 0.0)
        throw ValidationError("k1", "circular mode requires k1 = 0");
    if (!(cfg.params.k > 0.0)) throw ValidationError("k", "must be > 0");
    if (!(cfg.params.R > 0.0)) throw ValidationError("R", "must be > 0");
    if (!(cfg.params.omega > 0.0)) throw ValidationError("omega", "must be > 0");

    if (!doc.contains("evaders") || !doc["evaders"].is_array() || doc["evaders"].empty())
        throw ValidationError("evaders", "must be a non-empty array of [x, y] pairs");
    for (const auto& item : doc["evaders"]) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
            throw ValidationError("evaders", "each entry must be an [x, y] number pair");
        cfg.evaders.push_back({item[0].get<double>(), item[1].get<double>()});
    }

    // kappa = max distance from the target, attained by evader 0; re-index on
    // load when another evader is farthest.
    std::size_t farthest = 0;
    double max_r = -1.0;
    for (std::size_t i = 0; i < cfg.evaders.size(); ++i) {
        const double r = std::hypot(cfg.evaders[i].x, cfg.evaders[i].y);
        if (r > max_r) {
            max_r = r;
            farthest = i;
        }
    }
    if (!(max_r > 0.0)) throw ValidationError("evaders", "evader 0 must not sit on the target");
    if (farthest != 0) {
        std::swap(cfg.evaders[0], cfg.evaders[farthest]);
        cfg.notices.push_back("re-indexed: evader " + std::to_string(farthest) +
                              " is farthest from the target and became evader 0");
    }
    if (doc.contains("kappa")) {
        const double given = require_number(doc, "kappa");
        if (std::abs(given - max_r) > 1e-9 * std::max(1.0, max_r))
            throw ValidationError("kappa", "must equal the largest evader distance " +
                                               std::to_string(max_r));
    }
    cfg.params.kappa = max_r;
    cfg.params.validate();

    const double period = 2.0 * kPi / cfg.params.omega;
    cfg.integrator = default_settings(cfg.params, 40.0 * period);
    if (doc.contains("integrator")) {
        const json& it = doc["integrator"];
        reject_unknown_keys(
            it, {"method", "step", "rel_tol", "abs_tol", "max_step", "t_end", "record_every"},
            "integrator");
        if (it.contains("method")) {
            const std::string m = it["method"].get<std::string>();
            if (m == "rk4")
                cfg.integrator.method = Method::Rk4Fixed;
            else if (m == "rk45")
                cfg.integrator.method = Method::Rk45Adaptive;
            else
                throw ValidationError("integrator.method", "must be \"rk4\" or \"rk45\"");
        }
        cfg.integrator.step = number_or(it, "step", cfg.integrator.step);
        cfg.integrator.rel_tol = number_or(it, "rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = number_or(it, "abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.max_step = number_or(it, "max_step", cfg.integrator.max_step);
        cfg.integrator.t_end = number_or(it, "t_end", cfg.integrator.t_end);
        cfg.integrator.record_every = number_or(it, "record_every", cfg.integrator.record_every);
    }
    try {
        cfg.integrator.validate();
    } catch (const DomainError& e) {
        throw ValidationError("integrator", e.what());
    }

    cfg.conv_window = 2.0 * period;
    if (doc.contains("convergence")) {
        const json& cv = doc["convergence"];
        reject_unknown_keys(cv, {"tol", "window"}, "convergence");
        cfg.conv_tol = number_or(cv, "tol", cfg.conv_tol);
        cfg.conv_window = number_or(cv, "window", cfg.conv_window);
        if (!(cfg.conv_tol > 0.0)) throw ValidationError("convergence.tol", "must be > 0");
        if (!(cfg.conv_window > 0.0)) throw ValidationError("convergence.window", "must be > 0");
    }

    if (doc.contains("roa")) {
        const json& ro = doc["roa"];
        reject_unknown_keys(ro, {"samples", "kappa_count", "circle_samples"}, "roa");
        cfg.roa_samples = int_or(ro, "samples", cfg.roa_samples);
        cfg.roa_kappa_count = int_or(ro, "kappa_count", cfg.roa_kappa_count);
        cfg.roa_circle_samples = int_or(ro, "circle_samples", cfg.roa_circle_samples);
        if (cfg.roa_samples < 8) throw ValidationError("roa.samples", "must be >= 8");
        if (cfg.roa_kappa_count < 1) throw ValidationError("roa.kappa_count", "must be >= 1");
    }

    cfg.sweep_grid.r_min = 0.02 * cfg.params.R;
    cfg.sweep_grid.r_max = 1.2 * cfg.params.R;
    cfg.sweep_grid.nr = 128;
    cfg.sweep_grid.npsi = 128;
    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        reject_unknown_keys(sw, {"r_min", "r_max", "nr", "psi_min", "psi_max", "npsi", "anchor"},
                            "sweep");
        cfg.sweep_grid.r_min = number_or(sw, "r_min", cfg.sweep_grid.r_min);
        cfg.sweep_grid.r_max = number_or(sw, "r_max", cfg.sweep_grid.r_max);
        cfg.sweep_grid.nr = int_or(sw, "nr", cfg.sweep_grid.nr);
        cfg.sweep_grid.psi_min = number_or(sw, "psi_min", cfg.sweep_grid.psi_min);
        cfg.sweep_grid.psi_max = number_or(sw, "psi_max", cfg.sweep_grid.psi_max);
        cfg.sweep_grid.npsi = int_or(sw, "npsi", cfg.sweep_grid.npsi);
        if (!(cfg.sweep_grid.r_min > 0.0)) throw ValidationError("sweep.r_min", "must be > 0");
        if (cfg.sweep_grid.nr < 1 || cfg.sweep_grid.npsi < 1)
            throw ValidationError("sweep", "grid must have at least one cell");
        if (sw.contains("anchor")) {
            const json& an = sw["anchor"];
            reject_unknown_keys(an, {"kappa", "psi0"}, "sweep.anchor");
            BruteForceAnchor anchor;
            anchor.kappa = require_number(an, "kappa");
            anchor.psi0 = number_or(an, "psi0", 0.0);
            if (!(anchor.kappa > 0.0)) throw ValidationError("sweep.anchor.kappa", "must be > 0");
            cfg.sweep_anchor = anchor;
        }
    }

    if (doc.contains("pi_roa")) {
        const json& pr = doc["pi_roa"];
        reject_unknown_keys(pr, {"theta_samples", "radius_count"}, "pi_roa");
        cfg.pi_theta_samples = int_or(pr, "theta_samples", cfg.pi_theta_samples);
        cfg.pi_radius_count = int_or(pr, "radius_count", cfg.pi_radius_count);
        if (cfg.pi_theta_samples < 4) throw ValidationError("pi_roa.theta_samples", "must be >= 4");
        if (cfg.pi_radius_count < 2) throw ValidationError("pi_roa.radius_count", "must be >= 2");
    }

    if (doc.contains("outputs")) {
        const json& out = doc["outputs"];
        reject_unknown_keys(out, {"prefix"}, "outputs");
        if (out.contains("prefix")) cfg.prefix = out["prefix"].get<std::string>();
        if (cfg.prefix.empty()) throw ValidationError("outputs.prefix", "must not be empty");
    }

    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario parse failure: ") + e.what());
    }
    return parse_scenario(doc);
}

}  // namespace herdlab
