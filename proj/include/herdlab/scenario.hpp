#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "herdlab/integrate.hpp"
#include "herdlab/model.hpp"
#include "herdlab/roa.hpp"

namespace herdlab {

/// Fully resolved scenario: params, initial evader positions, integrator and
/// command-specific blocks, with defaults applied and unknown keys rejected.
struct ScenarioConfig {
    PursuitParams params;
    std::vector<FixedCartesian> evaders;  // index 0 farthest from the target
    IntegratorSettings integrator;

    double conv_tol = 1e-3;
    double conv_window = 0.0;  // 2 rotation periods

    int roa_samples = 256;
    int roa_kappa_count = 64;
    int roa_circle_samples = 256;

    GridSpec sweep_grid;
    std::optional<BruteForceAnchor> sweep_anchor;

    int pi_theta_samples = 64;
    int pi_radius_count = 256;

    std::string prefix = "run";
    std::vector<std::string> notices;  // e.g. the re-indexing notice

    /// The resolved config as JSON: reloading it reproduces this config
    /// bit-identically (report round-trip support).
    std::string resolved_json() const;
};

/// Parses and validates a scenario file. Throws ParseError (with the JSON
/// parser's line/column message) or ValidationError (field, reason).
ScenarioConfig load_scenario(const std::string& path);

/// Same, from an already-parsed document.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

}  // namespace herdlab
