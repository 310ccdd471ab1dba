#include "herdlab/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "herdlab/errors.hpp"

namespace herdlab {

void IntegratorSettings::validate() const {
    if (method == Method::Rk4Fixed && !(step > 0.0))
        throw DomainError("integrator step must be > 0");
    if (method == Method::Rk45Adaptive && (!(rel_tol > 0.0) || !(abs_tol > 0.0)))
        throw DomainError("integrator tolerances must be > 0");
    if (!(t_end > 0.0)) throw DomainError("t_end must be > 0");
}

IntegratorSettings default_settings(const PursuitParams& params, double t_end) {
    IntegratorSettings st;
    st.method = Method::Rk4Fixed;
    st.step = 1e-3 * (2.0 * kPi / params.omega);
    st.t_end = t_end;
    st.record_every = 100.0 * st.step;
    return st;
}

StateVector to_state_vector(const SwarmState& swarm) {
    StateVector s;
    s.frame = swarm.frame;
    s.t = swarm.t;
    s.values.reserve(2 * swarm.evaders.size());
    for (const auto& e : swarm.evaders) {
        s.values.push_back(e[0]);
        s.values.push_back(e[1]);
    }
    return s;
}

SwarmState to_swarm_state(const StateVector& state) {
    if (state.values.size() % 2 != 0) throw DomainError("state must hold 2n values");
    SwarmState swarm;
    swarm.frame = state.frame;
    swarm.t = state.t;
    swarm.evaders.reserve(state.evader_count());
    for (std::size_t i = 0; i < state.values.size(); i += 2)
        swarm.evaders.push_back({state.values[i], state.values[i + 1]});
    return swarm;
}

namespace {

class Recorder {
public:
    Recorder(Trajectory& traj, double t0, double record_every)
        : traj_(traj), every_(record_every), next_(t0 + (record_every > 0.0 ? record_every : 0.0)) {}

    void record_initial(double t, const std::vector<double>& s) { push(t, s); }

    void maybe_record(double t, const std::vector<double>& s, double t_end) {
        const bool final_sample = t >= t_end;
        if (every_ <= 0.0 || t + 1e-12 * std::max(1.0, std::abs(t)) >= next_ || final_sample) {
            push(t, s);
            while (every_ > 0.0 && next_ <= t + 1e-12 * std::max(1.0, std::abs(t)))
                next_ += every_;
        }
    }

private:
    void push(double t, const std::vector<double>& s) {
        if (!traj_.times.empty() && traj_.times.back() == t) return;
        traj_.times.push_back(t);
        traj_.states.push_back(s);
    }

    Trajectory& traj_;
    double every_;
    double next_;
};

void rk4_step(const Rhs& rhs, double t, double h, std::vector<double>& y,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = y.size();
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

Trajectory integrate(const Rhs& rhs, const StateVector& s0, const IntegratorSettings& settings) {
    settings.validate();
    if (s0.values.empty() || s0.values.size() % 2 != 0)
        throw DomainError("initial state must hold 2n values, n >= 1");
    if (!(settings.t_end > s0.t)) throw DomainError("t_end must exceed the initial time");

    Trajectory traj;
    traj.frame = s0.frame;
    Recorder rec(traj, s0.t, settings.record_every);
    rec.record_initial(s0.t, s0.values);

    const std::size_t n = s0.values.size();
    std::vector<double> y = s0.values;
    double t = s0.t;

    try {
        if (settings.method == Method::Rk4Fixed) {
            std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
            while (t < settings.t_end) {
                const double h = std::min(settings.step, settings.t_end - t);
                rk4_step(rhs, t, h, y, k1, k2, k3, k4, tmp);
                t += h;
                rec.maybe_record(t, y, settings.t_end);
            }
        } else {
            std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n),
                ynew(n);
            double h = settings.max_step > 0.0
                           ? std::min(settings.max_step, settings.t_end - t)
                           : std::min(1e-2 * (settings.t_end - t), 0.1);
            rhs(t, y, k1);  // FSAL seed
            while (t < settings.t_end) {
                h = std::min(h, settings.t_end - t);
                for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
                rhs(t + c2 * h, tmp, k2);
                for (std::size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
                rhs(t + c3 * h, tmp, k3);
                for (std::size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
                rhs(t + c4 * h, tmp, k4);
                for (std::size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
                rhs(t + c5 * h, tmp, k5);
                for (std::size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                         a64 * k4[i] + a65 * k5[i]);
                rhs(t + h, tmp, k6);
                for (std::size_t i = 0; i < n; ++i)
                    ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                          b6 * k6[i]);
                rhs(t + h, ynew, k7);

                double err = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                    const double scale =
                        settings.abs_tol +
                        settings.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                    const double e = (ynew[i] - y4) / scale;
                    err += e * e;
                }
                err = std::sqrt(err / static_cast<double>(n));

                if (err <= 1.0) {
                    t += h;
                    y = ynew;
                    k1 = k7;  // FSAL
                    rec.maybe_record(t, y, settings.t_end);
                }
                double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                factor = std::clamp(factor, 0.2, 5.0);
                h *= factor;
                if (settings.max_step > 0.0) h = std::min(h, settings.max_step);
                if (!(h > 0.0) || t + h == t)
                    throw DomainError("adaptive step underflow");
            }
        }
    } catch (const SingularityError& e) {
        traj.termination = Termination::Singular;
        traj.t_interrupt = t;
        traj.fault_index = e.evader_index();
        traj.fault_what = e.what();
        return traj;
    } catch (const DomainError& e) {
        traj.termination = Termination::DomainFault;
        traj.t_interrupt = t;
        traj.fault_what = e.what();
        return traj;
    }
    traj.termination = Termination::Completed;
    return traj;
}

ConvergenceReport detect_convergence(const Trajectory& traj,
                                     std::span<const RotatingPolar> targets, double tol,
                                     double window) {
    if (!is_rotating_frame(traj.frame))
        throw FrameError("convergence detection requires a rotating-frame trajectory");
    if (traj.times.size() < 2) throw DomainError("trajectory too short");
    const double span = traj.times.back() - traj.times.front();
    if (!(window >= 0.0) || window > span)
        throw DomainError("window must lie within the trajectory span");
    const std::size_t n = traj.states.front().size() / 2;
    if (targets.size() != n) throw DomainError("one target per evader required");

    auto sample_error = [&](const std::vector<double>& s) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r, psi;
            if (traj.frame == Frame::RotatingPolar) {
                r = s[2 * i];
                psi = s[2 * i + 1];
            } else {
                r = std::hypot(s[2 * i], s[2 * i + 1]);
                psi = std::atan2(s[2 * i + 1], s[2 * i]);
            }
            const double err = std::max(std::abs(r - targets[i].r),
                                        std::abs(wrap_angle(psi - targets[i].psi)));
            worst = std::max(worst, err);
        }
        return worst;
    };

    // Longest all-within-tol suffix.
    std::size_t first_ok = traj.times.size();
    for (std::size_t i = traj.times.size(); i-- > 0;) {
        if (sample_error(traj.states[i]) <= tol)
            first_ok = i;
        else
            break;
    }

    ConvergenceReport rep;
    const double window_start = traj.times.back() - window;
    rep.converged =
        first_ok < traj.times.size() && traj.times[first_ok] <= window_start + 1e-12;
    if (first_ok < traj.times.size()) rep.t_converged = traj.times[first_ok];

    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= window_start - 1e-12)
            worst = std::max(worst, sample_error(traj.states[i]));
    rep.final_error = worst;
    return rep;
}

}  // namespace herdlab
