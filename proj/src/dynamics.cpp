#include "herdlab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "herdlab/errors.hpp"

namespace herdlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_layout(std::span<const double> s, std::span<double> ds) {
    if (s.size() < 2 || s.size() % 2 != 0)
        throw DomainError("state must hold 2n values, n >= 1");
    if (ds.size() != s.size())
        throw DomainError("derivative span size must match state");
}

[[noreturn]] void throw_contact(int index) {
    throw SingularityError(index, kNan,
                           "pursuer-evader distance at or below guard (evader " +
                               std::to_string(index) + ")");
}

}  // namespace

Vec2 evader_rhs_fixed(FixedCartesian e, FixedCartesian p, double k) {
    const double dx = e.x - p.x;
    const double dy = e.y - p.y;
    const double d = std::hypot(dx, dy);
    if (d <= kSingularityGuard) throw_contact(-1);
    const double scale = k / (d * d * d);  // k/d^2 along the unit vector
    return {scale * dx, scale * dy};
}

double pursuer_radius(double r0, const PursuitParams& params) {
    if (!(r0 >= 0.0)) throw DomainError("r0 must be >= 0");
    return params.R * std::exp(params.k1 * (r0 - params.kappa));
}

FixedCartesian pursuer_position(double t, double r0, const PursuitParams& params) {
    const double rho = pursuer_radius(r0, params);
    return {rho * std::cos(params.omega * t), rho * std::sin(params.omega * t)};
}

void rhs_rotating_polar(std::span<const double> s, const PursuitParams& params,
                        std::span<double> ds) {
    check_layout(s, ds);
    const std::size_t n = s.size() / 2;
    for (std::size_t i = 0; i < n; ++i)
        if (!(s[2 * i] > 0.0))
            throw DomainError("polar radius r_" + std::to_string(i) + " must be > 0");

    const double rho = pursuer_radius(s[0], params);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s[2 * i];
        const double psi = s[2 * i + 1];
        const double c = std::cos(psi);
        const double d2 = r * r + rho * rho - 2.0 * r * rho * c;  // squared distance
        const double d = std::sqrt(d2);
        if (d <= kSingularityGuard) throw_contact(static_cast<int>(i));
        const double d3 = d2 * d;
        ds[2 * i] = params.k * (r - rho * c) / d3;
        ds[2 * i + 1] = params.k * rho * std::sin(psi) / (r * d3) - params.omega;
    }
}

void rhs_rotating_cartesian(std::span<const double> s, const PursuitParams& params,
                            std::span<double> ds) {
    check_layout(s, ds);
    const std::size_t n = s.size() / 2;
    const double r0 = std::hypot(s[0], s[1]);
    const double rho = pursuer_radius(r0, params);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = s[2 * i];
        const double v = s[2 * i + 1];
        const double du = u - rho;  // pursuer sits at (rho, 0) in this frame
        const double d2 = du * du + v * v;
        const double d = std::sqrt(d2);
        if (d <= kSingularityGuard) throw_contact(static_cast<int>(i));
        const double d3 = d2 * d;
        ds[2 * i] = params.k * du / d3 + params.omega * v;
        ds[2 * i + 1] = params.k * v / d3 - params.omega * u;
    }
}

void rhs_fixed_polar(std::span<const double> s, double t, const PursuitParams& params,
                     std::span<double> ds) {
    check_layout(s, ds);
    const std::size_t n = s.size() / 2;
    for (std::size_t i = 0; i < n; ++i)
        if (!(s[2 * i] > 0.0))
            throw DomainError("polar radius r_" + std::to_string(i) + " must be > 0");

    const double rho = pursuer_radius(s[0], params);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s[2 * i];
        const double rel = s[2 * i + 1] - params.omega * t;  // phi_i - omega t
        const double c = std::cos(rel);
        const double d2 = r * r + rho * rho - 2.0 * r * rho * c;
        const double d = std::sqrt(d2);
        if (d <= kSingularityGuard) throw_contact(static_cast<int>(i));
        const double d3 = d2 * d;
        ds[2 * i] = params.k * (r - rho * c) / d3;
        ds[2 * i + 1] = params.k * rho * std::sin(rel) / (r * d3);
    }
}

void rhs_fixed_cartesian(std::span<const double> s, double t, const PursuitParams& params,
                         std::span<double> ds) {
    check_layout(s, ds);
    const std::size_t n = s.size() / 2;
    const double r0 = std::hypot(s[0], s[1]);
    const FixedCartesian p = pursuer_position(t, r0, params);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const Vec2 vel = evader_rhs_fixed({s[2 * i], s[2 * i + 1]}, p, params.k);
            ds[2 * i] = vel.x;
            ds[2 * i + 1] = vel.y;
        } catch (const SingularityError&) {
            throw_contact(static_cast<int>(i));
        }
    }
}

}  // namespace herdlab
