#include "herdlab/model.hpp"

#include <cmath>

#include "herdlab/errors.hpp"

namespace herdlab {

void PursuitParams::validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("k must be > 0 and finite");
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw DomainError("k1 must be >= 0 and finite");
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("R must be > 0 and finite");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("omega must be > 0 and finite");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be > 0 and finite");
    if (mode == PursuitMode::Circular && k1 != 0.0)
        throw DomainError("circular mode requires k1 = 0");
}

bool is_rotating_frame(Frame f) {
    return f == Frame::RotatingCartesian || f == Frame::RotatingPolar;
}

bool is_polar_frame(Frame f) {
    return f == Frame::FixedPolar || f == Frame::RotatingPolar;
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // lands in [-pi, pi]
    if (w <= -kPi) w = kPi;
    return w;
}

RotatingCartesian to_rotating(FixedCartesian p, double t, double omega) {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return {p.x * c + p.y * s, -p.x * s + p.y * c};
}

FixedCartesian from_rotating(RotatingCartesian p, double t, double omega) {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return {p.u * c - p.v * s, p.u * s + p.v * c};
}

FixedCartesian to_cartesian(FixedPolar p) {
    return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)};
}

FixedPolar to_polar(FixedCartesian p) {
    if (p.x == 0.0 && p.y == 0.0) return {0.0, 0.0};
    return {std::hypot(p.x, p.y), wrap_angle(std::atan2(p.y, p.x))};
}

RotatingCartesian to_cartesian(RotatingPolar p) {
    return {p.r * std::cos(p.psi), p.r * std::sin(p.psi)};
}

RotatingPolar to_polar(RotatingCartesian p) {
    if (p.u == 0.0 && p.v == 0.0) return {0.0, 0.0};
    return {std::hypot(p.u, p.v), wrap_angle(std::atan2(p.v, p.u))};
}

AdmissibilityReport check_admissibility(const PursuitParams& params) {
    params.validate();
    AdmissibilityReport rep;
    rep.ratio = params.k / (params.omega * params.R * params.R * params.R);
    rep.circular_ok = rep.ratio > 0.0 && rep.ratio < kCircularRatioBound;

    const double g = 2.0 * params.k1 * params.k1 * params.R * params.R;
    if (params.k1 > 0.0 && g > 1.0) {
        rep.kappa_bound = std::log(g) / (2.0 * params.k1);
        rep.spiral_ok = params.kappa < *rep.kappa_bound;
    } else {
        rep.spiral_ok = false;
    }
    return rep;
}

}  // namespace herdlab
