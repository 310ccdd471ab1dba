#pragma once

#include <span>
#include <vector>

#include "herdlab/model.hpp"

namespace herdlab {

/// Minimum pursuer-evader distance (length). Below this the repulsion law is
/// treated as a model breakdown and the step is aborted, not clamped.
inline constexpr double kSingularityGuard = 1e-9;

/// Inverse-square repulsion: velocity of one evader at e given the pursuer at p.
/// Magnitude k/d^2, directed from pursuer to evader.
/// Throws SingularityError (index -1) when d <= kSingularityGuard.
Vec2 evader_rhs_fixed(FixedCartesian e, FixedCartesian p, double k);

/// Pursuer radius R e^{k1 (r0 - kappa)} as a function of the index-0 evader radius.
double pursuer_radius(double r0, const PursuitParams& params);

/// Prescribed pursuer trajectory: radius pursuer_radius(r0), phase omega*t.
/// The pursuer is algebraic - recomputed from (t, r0), never integrated.
FixedCartesian pursuer_position(double t, double r0, const PursuitParams& params);

// --- coupled right-hand sides ------------------------------------------------
//
// State layouts, n evaders (state.size() = 2n):
//   polar frames:     (r0, psi0, r1, psi1, ...)   or (r0, phi0, ...)
//   cartesian frames: (u0, v0, u1, v1, ...)       or (x0, y0, ...)
// Index 0 drives the pursuer feedback exponential for every evader.
// Derivatives are written into `ds` (same layout).

/// Autonomous rotating-polar system. Throws DomainError if any r_i <= 0,
/// SingularityError (with evader index) on pursuer contact.
void rhs_rotating_polar(std::span<const double> s, const PursuitParams& params,
                        std::span<double> ds);

/// Autonomous rotating-cartesian system (same dynamics, +omega*v / -omega*u
/// rotation terms, sqrt(u0^2+v0^2) in the feedback exponential).
void rhs_rotating_cartesian(std::span<const double> s, const PursuitParams& params,
                            std::span<double> ds);

/// Time-varying fixed-polar system; psi_i = phi_i - omega*t appears explicitly.
void rhs_fixed_polar(std::span<const double> s, double t, const PursuitParams& params,
                     std::span<double> ds);

/// Time-varying fixed-cartesian system: per-evader inverse-square repulsion
/// from the prescribed pursuer position.
void rhs_fixed_cartesian(std::span<const double> s, double t, const PursuitParams& params,
                         std::span<double> ds);

}  // namespace herdlab
