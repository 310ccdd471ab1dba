#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "herdlab/model.hpp"

namespace herdlab {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorSettings {
    Method method = Method::Rk4Fixed;
    double step = 1e-3;        // RK4 fixed step, > 0
    double rel_tol = 1e-8;     // RK45
    double abs_tol = 1e-10;    // RK45
    double max_step = 0.0;     // RK45; <= 0 means unrestricted
    double t_end = 1.0;        // integration end time, > start time
    double record_every = 0.0; // output cadence; <= 0 records every accepted step

    void validate() const;
};

/// RK4 step matching the rotation period: h = 1e-3 * (2 pi / omega).
IntegratorSettings default_settings(const PursuitParams& params, double t_end);

/// Flat 2n-state with its frame tag and current time. Layout per dynamics.hpp;
/// index 0 is the kappa-defining evader.
struct StateVector {
    Frame frame = Frame::RotatingCartesian;
    double t = 0.0;
    std::vector<double> values;

    std::size_t evader_count() const { return values.size() / 2; }
};

StateVector to_state_vector(const SwarmState& swarm);
SwarmState to_swarm_state(const StateVector& state);

enum class Termination { Completed, Converged, Singular, DomainFault };

struct Trajectory {
    Frame frame = Frame::RotatingCartesian;
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // states[i] sampled at times[i]
    Termination termination = Termination::Completed;
    double t_interrupt = std::numeric_limits<double>::quiet_NaN();
    int fault_index = -1;
    std::string fault_what;
};

using Rhs = std::function<void(double t, std::span<const double>, std::span<double>)>;

/// Deterministic integration of ds/dt = rhs(t, s) from s0.t to settings.t_end.
/// Propagated SingularityError / DomainError halt the run early; the partial
/// trajectory is returned with the interruption recorded.
Trajectory integrate(const Rhs& rhs, const StateVector& s0, const IntegratorSettings& settings);

struct ConvergenceReport {
    bool converged = false;
    double t_converged = std::numeric_limits<double>::quiet_NaN();
    double final_error = std::numeric_limits<double>::quiet_NaN();
};

/// Trailing-window convergence test in a rotating frame: converged iff every
/// sample in the last `window` time units is within tol of its evader's
/// target, where the per-evader error is max(|r - r*|, wrapped |psi - psi*|)
/// and the reported error is the sup over evaders. Throws FrameError for
/// fixed-frame trajectories (limit cycles are not fixed points there).
ConvergenceReport detect_convergence(const Trajectory& traj,
                                     std::span<const RotatingPolar> targets, double tol,
                                     double window);

}  // namespace herdlab
