#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herdlab/equilibria.hpp"
#include "herdlab/integrate.hpp"
#include "herdlab/model.hpp"
#include "herdlab/stability.hpp"

namespace herdlab {

/// Planar autonomous field in equilibrium-shifted coordinates w = (u,v) - (u*,v*).
using PlanarField = std::function<Vec2(double, double)>;

/// Candidate invariant set {w : (p - center)^T A (p - center) <= 1}.
struct EllipsoidRegion {
    RotatingCartesian center;     // the equilibrium (u*, v*)
    Matrix2 A = Matrix2::Zero();  // symmetric positive definite
    std::optional<double> kappa;  // spiral: the kappa it was computed for
};

/// Origin-shifted rotating-cartesian field: the single-evader dynamics moved
/// so the equilibrium sits at w = 0. f(kappa, 0) = 0 by construction.
Vec2 shifted_rhs(double u_bar, double v_bar, double kappa, const PursuitParams& params,
                 const Equilibrium& eq);

PlanarField make_shifted_field(double kappa, const PursuitParams& params,
                               const Equilibrium& eq);

/// Unnormalized symmetric solution of A J + J^T A = -I (3-unknown linear
/// solve). Throws NotHurwitzError unless max Re(lambda(J)) < 0.
Matrix2 lyapunov_solve(const Matrix2& J);

/// lyapunov_solve scaled so the largest eigenvalue of A is 1.
Matrix2 lyapunov_seed(const Matrix2& J);

/// Boundary points of {w^T A w = 1}, uniformly in angle: w = A^{-1/2}(cos, sin).
std::vector<Vec2> ellipse_boundary(const Matrix2& A, int samples);

/// Sampled certificate of boundary decrease: f(w)^T A w <= -eps0 with
/// eps0 = 1e-8 ||w||^2 at every boundary sample (strict inequality is not
/// checkable in floating point without a margin). Field faults count as
/// violations.
bool region_certified(const PlanarField& field, const Matrix2& A, int samples);

struct EllipsoidDiagnostics {
    double seed_det = 0.0;            // det of the certified scaled seed
    bool scale_cap_bound = false;     // seed growth stopped at the cap, not the constraint
    std::vector<double> det_history;  // best certified det per optimizer iteration
};

/// Maximizes the certified ellipse area (minimizes det A) by simplex descent
/// on the three free entries of A, penalizing positivity/boundary violations,
/// seeded by the largest certified multiple of `seed`. The result is
/// re-certified on a 4x denser boundary grid; failure there rejects the
/// candidate (CertificationError) rather than repairing it.
EllipsoidRegion optimize_ellipsoid(const PlanarField& field, RotatingCartesian center,
                                   std::optional<double> kappa, const Matrix2& seed,
                                   int samples, EllipsoidDiagnostics* diag = nullptr);

/// Membership of an absolute-coordinates point in the region.
bool region_contains(const EllipsoidRegion& region, RotatingCartesian point);

struct KappaRegionEntry {
    double kappa = 0.0;
    std::optional<Equilibrium> eq;
    std::optional<EllipsoidRegion> region;
    bool circle_contained = false;  // is {r = kappa} inside the region?
    std::string failure;            // non-empty when this kappa failed
};

struct StableRegionSweep {
    std::vector<KappaRegionEntry> entries;
    std::vector<double> contained_kappas;  // union summary: kappas whose circle fits
};

/// Per-kappa pipeline (equilibrium, Hurwitz Jacobian, Lyapunov seed, optimized
/// ellipse, circle-membership test) over a kappa grid. Each kappa must lie
/// below ln(2 k1^2 R^2)/(2 k1). Per-kappa failures are recorded, not fatal.
/// The membership circle {r = kappa} is sampled over [psi_lo, psi_hi]
/// (defaults to the full circle; the restricted variant uses (-pi/2, pi/2)).
StableRegionSweep stable_region_spiral(const PursuitParams& params,
                                       std::span<const double> kappa_grid, int samples = 256,
                                       double psi_lo = -kPi, double psi_hi = kPi,
                                       int circle_samples = 256, int threads = 1);

enum class CellOutcome { Converged, Diverged, Singular, Undecided };

const char* to_string(CellOutcome outcome);

/// Initial-condition grid over (r(0), psi(0)) in the rotating frame.
struct GridSpec {
    double r_min = 0.1;
    double r_max = 2.0;
    int nr = 32;
    double psi_min = -kPi;
    double psi_max = kPi;
    int npsi = 32;
};

/// Fixed initial condition of evader 0; the grid then scans evader 1.
struct BruteForceAnchor {
    double kappa = 1.0;  // r0(0)
    double psi0 = 0.0;   // psi0(0)
};

struct RegionMap {
    GridSpec grid;
    PursuitParams params;
    std::optional<BruteForceAnchor> anchor;
    RotatingPolar target;               // equilibrium tested against (anchored/circular)
    std::vector<CellOutcome> outcomes;  // row-major: [ir * npsi + ipsi]
    std::vector<double> r_centers;
    std::vector<double> psi_centers;
};

/// Brute-force region map: integrate every grid cell to t_end and classify
/// against the equilibrium set. Unanchored spiral cells take kappa = r(0)
/// cell by cell (the stable-region parameterization); anchored runs fix
/// evader 0 and scan evader 1. Diverged means the tested evader escaped
/// beyond 10 R; trajectories neither converged nor escaped are Undecided.
RegionMap brute_force_region(const PursuitParams& params, const GridSpec& grid,
                             std::optional<BruteForceAnchor> anchor,
                             const IntegratorSettings& settings, double tol, double window,
                             int threads = 1);

struct PiRoaResult {
    double r_max = 0.0;                // radius of the pursuer-phase-independent disk
    int theta_samples = 0;
    EllipsoidRegion omega;             // the rotating-frame region the disk was cut from
};

/// Pursuer-position-independent ROA for circular pursuit: the largest
/// origin-centered disk inside every rotated copy of the rotating-frame
/// region. The region is rotation-generated and the disk rotation-invariant,
/// so testing the disk's boundary circle against the single region suffices.
/// Throws EmptyIntersectionError when even r = 0 (the origin) is outside.
PiRoaResult pi_roa(const PursuitParams& params, const Equilibrium& eq_s2, int theta_samples,
                   std::span<const double> radius_grid, int samples = 256);

/// Same intersection computed from a precomputed region.
PiRoaResult pi_roa_with_region(const EllipsoidRegion& region, int theta_samples,
                               std::span<const double> radius_grid);

}  // namespace herdlab
