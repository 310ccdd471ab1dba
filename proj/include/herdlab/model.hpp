#pragma once

#include <array>
#include <optional>
#include <vector>

namespace herdlab {

inline constexpr double kPi = 3.14159265358979323846;

/// Upper bound of the circular-mode existence ratio k/(omega R^3), i.e. 2/(3*sqrt(3)).
inline constexpr double kCircularRatioBound = 0.38490017945975052;

enum class PursuitMode { Spiral, Circular };

/// Parameters of both pursuit laws. Circular mode is the k1 = 0 special case
/// of the spiral law, not a separate implementation.
struct PursuitParams {
    double k = 1.0;      // repulsion strength (length^3/time), > 0
    double k1 = 0.0;     // radial feedback gain (1/length), >= 0
    double R = 1.0;      // initial pursuer radius (length), > 0
    double omega = 1.0;  // pursuer angular velocity (rad/time), > 0
    double kappa = 1.0;  // initial radius of the farthest evader r0(0) (length), > 0
    PursuitMode mode = PursuitMode::Spiral;

    /// Throws DomainError if any invariant is violated (including mode/k1 consistency).
    void validate() const;
};

// --- coordinate frames ------------------------------------------------------
//
// All frames share the target point as origin. The rotating frame tracks the
// pursuer: its u-axis passes through the pursuer at every instant, so it spins
// counterclockwise at omega and psi = phi - omega*t.

struct FixedCartesian {
    double x = 0.0;
    double y = 0.0;
};

struct FixedPolar {
    double r = 0.0;    // >= 0
    double phi = 0.0;  // rad, normalized to (-pi, pi]
};

struct RotatingCartesian {
    double u = 0.0;
    double v = 0.0;
};

struct RotatingPolar {
    double r = 0.0;    // >= 0
    double psi = 0.0;  // rad, normalized to (-pi, pi]
};

/// Velocity / derivative pair (length/time components).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class Frame { FixedCartesian, FixedPolar, RotatingCartesian, RotatingPolar };

bool is_rotating_frame(Frame f);
bool is_polar_frame(Frame f);

/// Normalizes an angle to (-pi, pi].
double wrap_angle(double a);

RotatingCartesian to_rotating(FixedCartesian p, double t, double omega);
FixedCartesian from_rotating(RotatingCartesian p, double t, double omega);

// Polar <-> Cartesian in either frame. (0,0) maps to (r=0, angle=0) by
// convention so the conversion is total.
FixedCartesian to_cartesian(FixedPolar p);
FixedPolar to_polar(FixedCartesian p);
RotatingCartesian to_cartesian(RotatingPolar p);
RotatingPolar to_polar(RotatingCartesian p);

/// Positions of n evaders in one frame at one time. Index 0 is the evader
/// farthest from the target at t = 0 (the one whose r0(0) defines kappa);
/// the ordering is fixed for the whole run.
struct SwarmState {
    double t = 0.0;
    Frame frame = Frame::RotatingCartesian;
    std::vector<std::array<double, 2>> evaders;
};

/// Existence conditions for the two pursuit laws.
struct AdmissibilityReport {
    bool spiral_ok = false;
    std::optional<double> kappa_bound;  // ln(2 k1^2 R^2)/(2 k1); empty when 2 k1^2 R^2 <= 1 or k1 = 0
    bool circular_ok = false;
    double ratio = 0.0;  // k/(omega R^3)
};

/// spiral_ok  <=> 2 k1^2 R^2 > 1 and kappa < ln(2 k1^2 R^2)/(2 k1)
/// circular_ok <=> 0 < k/(omega R^3) < 2/(3 sqrt 3)
AdmissibilityReport check_admissibility(const PursuitParams& params);

}  // namespace herdlab
