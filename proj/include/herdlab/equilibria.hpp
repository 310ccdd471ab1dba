#pragma once

#include <complex>
#include <vector>

#include "herdlab/model.hpp"

namespace herdlab {

enum class Branch { SpiralUnique, CircularInner, CircularOuter };

/// Equilibrium of the rotating-frame dynamics: evader radius/angle plus the
/// pursuer limit radius, with back-substitution residuals for both defining
/// equations.
struct Equilibrium {
    double r_star = 0.0;    // 0 < r_star < R_star
    double psi_star = 0.0;  // in (0, pi/2)
    double R_star = 0.0;    // pursuer limit radius R e^{k1 (r_star - kappa)}
    Branch branch = Branch::SpiralUnique;
    double cubic_residual = 0.0;  // |r^3 - R^2 e^{2 k1 (r-kappa)} r + k/omega|
    double angle_residual = 0.0;  // |cos(psi) sin^2(psi) - k/(omega R^3 e^{3 k1 (r-kappa)})|
};

struct SpiralSolution {
    std::vector<Equilibrium> roots;      // all positive real roots, ascending r
    bool admissibility_warning = false;  // set when spiral_ok fails and several roots exist
};

/// Roots of r^3 - R^2 e^{2 k1 (r - kappa)} r + k/omega = 0 (k1 > 0 required).
/// Under spiral admissibility exactly one root is returned. Otherwise every
/// positive root found by a sign-change scan over a log-spaced grid is
/// returned. Throws NoRootError when the search range holds no root.
SpiralSolution solve_spiral(const PursuitParams& params);

/// All three real roots of r^3 - R^2 r + k/omega = 0 plus the intermediate
/// quantities of the radical (Cardano) form, kept for cross-checking.
struct CircularRoots {
    double r_s1 = 0.0;  // outer equilibrium radius, in (R/sqrt(3), R)
    double r_s2 = 0.0;  // inner equilibrium radius, in (0, R/sqrt(3))
    double r_s3 = 0.0;  // negative root, retained for verification
    std::complex<double> sigma1;
    std::complex<double> sigma2;
};

struct CircularSolution {
    CircularRoots roots;
    Equilibrium outer;  // (r_s1, psi_s1), saddle
    Equilibrium inner;  // (r_s2, psi_s2), asymptotically stable
};

/// Closed-form circular-mode equilibria via the trigonometric cubic method,
/// cross-checked against the principal-branch radical form to 1e-10.
/// Throws ExistenceError unless 0 < k/(omega R^3) < 2/(3 sqrt 3) and k1 = 0.
CircularSolution solve_circular(const PursuitParams& params);

/// Inverts the equilibrium cubic for omega given a target radius:
///   circular: omega = k / (R^2 t - t^3),            0 < t < R/sqrt(3)
///   spiral:   omega = k / (R^2 e^{2 k1 (t-kappa)} t - t^3)
/// The omega field of `params` is ignored. Throws RangeError when the target
/// is outside the invertible branch (denominator <= 0 or, circular, beyond
/// the stable-branch range).
double omega_for_radius(const PursuitParams& params, double target_r);

/// The single equilibrium shared by every evader in an admissible spiral
/// swarm; identical to the solve_spiral root. Throws DomainError when spiral
/// admissibility fails.
Equilibrium multi_evader_equilibrium(const PursuitParams& params);

}  // namespace herdlab
