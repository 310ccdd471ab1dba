#include "herdlab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "herdlab/dynamics.hpp"
#include "herdlab/errors.hpp"
#include "herdlab/roa.hpp"
#include "herdlab/stability.hpp"

namespace herdlab {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// FNV-1a over the resolved config text; stable across runs and platforms.
std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json equilibrium_json(const Equilibrium& eq) {
    const char* branch = eq.branch == Branch::SpiralUnique
                             ? "SpiralUnique"
                             : (eq.branch == Branch::CircularInner ? "CircularInner"
                                                                   : "CircularOuter");
    return {{"r_star", eq.r_star},       {"psi_star", eq.psi_star},
            {"R_star", eq.R_star},       {"branch", branch},
            {"cubic_residual", eq.cubic_residual}, {"angle_residual", eq.angle_residual}};
}

json verdict_json(const StabilityVerdict& v) {
    json eig = json::array();
    for (const auto& lam : v.eigenvalues) eig.push_back({{"re", lam.real()}, {"im", lam.imag()}});
    return {{"class", to_string(v.cls)}, {"margin", v.margin}, {"eigenvalues", eig}};
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Completed: return "Completed";
        case Termination::Converged: return "Converged";
        case Termination::Singular: return "Singular";
        case Termination::DomainFault: return "DomainError";
    }
    return "Unknown";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

/// Trajectory CSV: t, pursuer position, then per evader the fixed-frame
/// position and rotating-polar coordinates (3 + 4n columns).
std::string trajectory_csv(const Trajectory& traj, const PursuitParams& params) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size() / 2;
    std::string csv = "t,x_p,y_p";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string s = std::to_string(i);
        csv += ",x_e" + s + ",y_e" + s + ",r_e" + s + ",psi_e" + s;
    }
    csv += "\n";
    for (std::size_t row = 0; row < traj.times.size(); ++row) {
        const double t = traj.times[row];
        const auto& s = traj.states[row];
        const double r0 = std::hypot(s[0], s[1]);
        const FixedCartesian p = pursuer_position(t, r0, params);
        csv += fmt17(t) + "," + fmt17(p.x) + "," + fmt17(p.y);
        for (std::size_t i = 0; i < n; ++i) {
            const RotatingCartesian uv{s[2 * i], s[2 * i + 1]};
            const FixedCartesian xy = from_rotating(uv, t, params.omega);
            const RotatingPolar pol = to_polar(uv);
            csv += "," + fmt17(xy.x) + "," + fmt17(xy.y) + "," + fmt17(pol.r) + "," +
                   fmt17(pol.psi);
        }
        csv += "\n";
    }
    return csv;
}

/// Region boundary polyline in absolute rotating-frame coordinates.
std::string region_polyline_csv(const EllipsoidRegion& region, int samples,
                                const std::string& label) {
    std::string csv = "curve,u,v\n";
    for (const Vec2& w : ellipse_boundary(region.A, samples))
        csv += label + "," + fmt17(region.center.u + w.x) + "," + fmt17(region.center.v + w.y) +
               "\n";
    return csv;
}

struct CommandContext {
    const ScenarioConfig& cfg;
    std::filesystem::path out_dir;
    int threads;
    json results;
    json error;  // non-null on failure
    int exit_code = 0;
};

RotatingPolar convergence_target(const ScenarioConfig& cfg) {
    if (cfg.params.mode == PursuitMode::Circular) {
        const Equilibrium eq = solve_circular(cfg.params).inner;
        return {eq.r_star, eq.psi_star};
    }
    const Equilibrium eq = multi_evader_equilibrium(cfg.params);
    return {eq.r_star, eq.psi_star};
}

void cmd_simulate(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    SwarmState swarm;
    swarm.t = 0.0;
    swarm.frame = Frame::RotatingCartesian;  // coincides with the fixed frame at t = 0
    for (const auto& e : cfg.evaders) swarm.evaders.push_back({e.x, e.y});
    const StateVector s0 = to_state_vector(swarm);
    const Rhs rhs = [&cfg](double, std::span<const double> y, std::span<double> dy) {
        rhs_rotating_cartesian(y, cfg.params, dy);
    };
    Trajectory traj = integrate(rhs, s0, cfg.integrator);

    json res;
    if (traj.termination == Termination::Completed) {
        // A stable target may not exist (e.g. non-admissible spiral runs);
        // the trajectory is still written, only the convergence check is
        // skipped.
        try {
            const RotatingPolar target = convergence_target(cfg);
            std::vector<RotatingPolar> targets(cfg.evaders.size(), target);
            const ConvergenceReport rep = detect_convergence(traj, targets, cfg.conv_tol,
                                                             cfg.conv_window);
            if (rep.converged) traj.termination = Termination::Converged;
            res["convergence"] = {{"converged", rep.converged},
                                  {"t_converged", rep.t_converged},
                                  {"final_error", rep.final_error}};
            res["target"] = {{"r_star", target.r}, {"psi_star", target.psi}};
        } catch (const std::exception& e) {
            res["convergence_unavailable"] = e.what();
        }
    } else {
        ctx.exit_code = 2;
        ctx.error = {{"type", traj.termination == Termination::Singular ? "SingularityError"
                                                                        : "DomainError"},
                     {"what", traj.fault_what},
                     {"t", traj.t_interrupt},
                     {"evader_index", traj.fault_index}};
    }
    res["termination"] = termination_name(traj.termination);
    res["samples"] = traj.times.size();
    if (!traj.states.empty()) {
        json fin = json::array();
        const auto& s = traj.states.back();
        for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
            const RotatingPolar pol = to_polar(RotatingCartesian{s[i], s[i + 1]});
            fin.push_back({{"r", pol.r}, {"psi", pol.psi}});
        }
        res["final_state"] = fin;
        res["t_final"] = traj.times.back();
    }
    ctx.results = res;
    write_text(ctx.out_dir / (cfg.prefix + "_trajectory.csv"),
               trajectory_csv(traj, cfg.params));
}

void cmd_equilibria(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    json res;
    res["admissibility"] = [&] {
        const AdmissibilityReport adm = check_admissibility(cfg.params);
        json j = {{"spiral_ok", adm.spiral_ok},
                  {"circular_ok", adm.circular_ok},
                  {"ratio", adm.ratio}};
        if (adm.kappa_bound) j["kappa_bound"] = *adm.kappa_bound;
        return j;
    }();
    if (cfg.params.mode == PursuitMode::Circular) {
        const CircularSolution sol = solve_circular(cfg.params);
        res["r_s1"] = sol.roots.r_s1;
        res["r_s2"] = sol.roots.r_s2;
        res["r_s3"] = sol.roots.r_s3;
        res["inner"] = equilibrium_json(sol.inner);
        res["outer"] = equilibrium_json(sol.outer);
    } else {
        const SpiralSolution sol = solve_spiral(cfg.params);
        json roots = json::array();
        for (const auto& eq : sol.roots) roots.push_back(equilibrium_json(eq));
        res["roots"] = roots;
        res["admissibility_warning"] = sol.admissibility_warning;
    }
    ctx.results = res;
}

void cmd_stability(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const int n = static_cast<int>(cfg.evaders.size());
    json res;
    if (cfg.params.mode == PursuitMode::Circular) {
        const CircularSolution sol = solve_circular(cfg.params);
        for (const Equilibrium* eq : {&sol.inner, &sol.outer}) {
            json entry = equilibrium_json(*eq);
            entry["verdict"] = verdict_json(classify(cfg.params, *eq, n));
            const auto closed = eigenvalues_circular(cfg.params, eq->r_star);
            entry["closed_form_eigenvalues"] = {
                {{"re", closed.first.real()}, {"im", closed.first.imag()}},
                {{"re", closed.second.real()}, {"im", closed.second.imag()}}};
            res[eq->branch == Branch::CircularInner ? "inner" : "outer"] = entry;
        }
    } else {
        const Equilibrium eq = multi_evader_equilibrium(cfg.params);
        json entry = equilibrium_json(eq);
        entry["verdict"] = verdict_json(classify(cfg.params, eq, n));
        res["equilibrium"] = entry;
    }
    res["evaders"] = n;
    ctx.results = res;
}

void cmd_roa(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    json res;
    if (cfg.params.mode == PursuitMode::Circular) {
        const Equilibrium eq = solve_circular(cfg.params).inner;
        const PlanarField field = make_shifted_field(0.0, cfg.params, eq);
        const VectorField planar = [&field](std::span<const double> y, std::span<double> dy) {
            const Vec2 f = field(y[0], y[1]);
            dy[0] = f.x;
            dy[1] = f.y;
        };
        const double origin[2] = {0.0, 0.0};
        const Matrix2 seed = lyapunov_seed(jacobian_numeric(planar, origin));
        const RotatingCartesian center{eq.r_star * std::cos(eq.psi_star),
                                       eq.r_star * std::sin(eq.psi_star)};
        const EllipsoidRegion region =
            optimize_ellipsoid(field, center, std::nullopt, seed, cfg.roa_samples);
        res["equilibrium"] = equilibrium_json(eq);
        res["region"] = {{"center", {region.center.u, region.center.v}},
                         {"A", {region.A(0, 0), region.A(0, 1), region.A(1, 1)}}};
        write_text(ctx.out_dir / (cfg.prefix + "_region.csv"),
                   region_polyline_csv(region, 256, "region"));
    } else {
        const double c = *check_admissibility(cfg.params).kappa_bound;
        std::vector<double> grid;
        for (int i = 0; i < cfg.roa_kappa_count; ++i)
            grid.push_back(0.01 + (0.999 * c - 0.01) * static_cast<double>(i) /
                                      static_cast<double>(std::max(1, cfg.roa_kappa_count - 1)));
        const StableRegionSweep sweep =
            stable_region_spiral(cfg.params, grid, cfg.roa_samples, -kPi, kPi,
                                 cfg.roa_circle_samples, ctx.threads);
        json entries = json::array();
        std::string polylines = "curve,u,v\n";
        for (const auto& entry : sweep.entries) {
            json e = {{"kappa", entry.kappa},
                      {"circle_contained", entry.circle_contained}};
            if (entry.eq) e["equilibrium"] = equilibrium_json(*entry.eq);
            if (entry.region)
                e["A"] = {entry.region->A(0, 0), entry.region->A(0, 1), entry.region->A(1, 1)};
            if (!entry.failure.empty()) e["failure"] = entry.failure;
            entries.push_back(e);
            if (entry.region) {
                const std::string label = "kappa=" + fmt17(entry.kappa);
                for (const Vec2& w : ellipse_boundary(entry.region->A, 128))
                    polylines += label + "," + fmt17(entry.region->center.u + w.x) + "," +
                                 fmt17(entry.region->center.v + w.y) + "\n";
            }
        }
        res["kappa_bound"] = c;
        res["entries"] = entries;
        res["contained_kappas"] = sweep.contained_kappas;
        write_text(ctx.out_dir / (cfg.prefix + "_regions.csv"), polylines);
    }
    ctx.results = res;
}

void cmd_sweep(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    const RegionMap map = brute_force_region(cfg.params, cfg.sweep_grid, cfg.sweep_anchor,
                                             cfg.integrator, cfg.conv_tol, cfg.conv_window,
                                             ctx.threads);
    std::string csv = "r0,psi0,outcome\n";
    std::size_t counts[4] = {0, 0, 0, 0};
    for (int ir = 0; ir < map.grid.nr; ++ir)
        for (int ip = 0; ip < map.grid.npsi; ++ip) {
            const CellOutcome outcome =
                map.outcomes[static_cast<std::size_t>(ir) * static_cast<std::size_t>(map.grid.npsi) +
                             static_cast<std::size_t>(ip)];
            counts[static_cast<int>(outcome)]++;
            csv += fmt17(map.r_centers[static_cast<std::size_t>(ir)]) + "," +
                   fmt17(map.psi_centers[static_cast<std::size_t>(ip)]) + "," +
                   to_string(outcome) + "\n";
        }
    write_text(ctx.out_dir / (cfg.prefix + "_regionmap.csv"), csv);
    ctx.results = {{"target", {{"r_star", map.target.r}, {"psi_star", map.target.psi}}},
                   {"cells", map.outcomes.size()},
                   {"converged", counts[0]},
                   {"diverged", counts[1]},
                   {"singular", counts[2]},
                   {"undecided", counts[3]}};
    if (cfg.sweep_anchor)
        ctx.results["anchor"] = {{"kappa", cfg.sweep_anchor->kappa},
                                 {"psi0", cfg.sweep_anchor->psi0}};
}

void cmd_pi_roa(CommandContext& ctx) {
    const ScenarioConfig& cfg = ctx.cfg;
    if (cfg.params.mode != PursuitMode::Circular)
        throw ValidationError("mode", "pi-roa requires circular mode");
    const Equilibrium eq = solve_circular(cfg.params).inner;
    std::vector<double> radii;
    for (int i = 0; i < cfg.pi_radius_count; ++i)
        radii.push_back(cfg.params.R * static_cast<double>(i) /
                        static_cast<double>(cfg.pi_radius_count - 1));
    const PiRoaResult pi =
        pi_roa(cfg.params, eq, cfg.pi_theta_samples, radii, cfg.roa_samples);

    std::string csv = region_polyline_csv(pi.omega, 256, "region");
    for (int i = 0; i < 256; ++i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / 256.0;
        csv += "disk," + fmt17(pi.r_max * std::cos(th)) + "," + fmt17(pi.r_max * std::sin(th)) +
               "\n";
    }
    write_text(ctx.out_dir / (cfg.prefix + "_piroa.csv"), csv);
    ctx.results = {{"r_max", pi.r_max},
                   {"theta_samples", pi.theta_samples},
                   {"equilibrium", equilibrium_json(eq)},
                   {"region",
                    {{"center", {pi.omega.center.u, pi.omega.center.v}},
                     {"A", {pi.omega.A(0, 0), pi.omega.A(0, 1), pi.omega.A(1, 1)}}}}};
}

}  // namespace

int run_command(const std::string& command, const ScenarioConfig& config,
                const std::string& out_dir, int threads) {
    CommandContext ctx{config, out_dir.empty() ? "." : out_dir, threads, json(), json(), 0};
    std::filesystem::create_directories(ctx.out_dir);

    const auto start = std::chrono::steady_clock::now();
    try {
        if (command == "simulate")
            cmd_simulate(ctx);
        else if (command == "equilibria")
            cmd_equilibria(ctx);
        else if (command == "stability")
            cmd_stability(ctx);
        else if (command == "roa")
            cmd_roa(ctx);
        else if (command == "sweep")
            cmd_sweep(ctx);
        else if (command == "pi-roa")
            cmd_pi_roa(ctx);
        else
            throw ValidationError("command", "unknown command: " + command);
    } catch (const ValidationError&) {
        throw;  // usage error, no report
    } catch (const std::exception& e) {
        ctx.exit_code = 2;
        ctx.error = {{"type", "ModelError"}, {"what", e.what()}};
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string resolved = config.resolved_json();
    json report;
    report["command"] = command;
    report["version"] = kVersion;
    report["config_hash"] = config_hash(resolved);
    report["config"] = json::parse(resolved);
    report["params"] = {{"mode", config.params.mode == PursuitMode::Spiral ? "spiral" : "circular"},
                        {"k", config.params.k},
                        {"k1", config.params.k1},
                        {"R", config.params.R},
                        {"omega", config.params.omega},
                        {"kappa", config.params.kappa}};
    report["notices"] = config.notices;
    report["wall_time_s"] = wall;
    if (!ctx.results.is_null()) report["results"] = ctx.results;
    if (!ctx.error.is_null()) report["error"] = ctx.error;
    write_text(ctx.out_dir / (config.prefix + "_report.json"), report.dump(2) + "\n");
    return ctx.exit_code;
}

}  // namespace herdlab
