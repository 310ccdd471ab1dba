#include "herdlab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "herdlab/errors.hpp"

namespace herdlab {

namespace {

double spiral_cubic(double r, const PursuitParams& p) {
    return r * r * r - p.R * p.R * std::exp(2.0 * p.k1 * (r - p.kappa)) * r + p.k / p.omega;
}

// Brent's method on a bracketing interval [a, b] with f(a) f(b) <= 0.
template <class F>
double brent(F&& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::abs(b) + 1e-15;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r1 = fa / fc, r2 = fb / fc;
                p = s * (2.0 * m * r1 * (r1 - r2) - (b - a) * (r2 - 1.0));
                q = (r1 - 1.0) * (r2 - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

Equilibrium make_spiral_equilibrium(double r, const PursuitParams& p) {
    Equilibrium eq;
    eq.r_star = r;
    eq.R_star = p.R * std::exp(p.k1 * (r - p.kappa));
    // From the cubic, cos^2(psi*) = r^3/(r^3 + k/omega) < 1, so the arccos
    // argument is safe up to rounding.
    eq.psi_star = std::acos(std::clamp(r / eq.R_star, -1.0, 1.0));
    eq.branch = Branch::SpiralUnique;
    eq.cubic_residual = std::abs(spiral_cubic(r, p));
    const double s = std::sin(eq.psi_star);
    eq.angle_residual =
        std::abs(std::cos(eq.psi_star) * s * s -
                 p.k / (p.omega * p.R * p.R * p.R * std::exp(3.0 * p.k1 * (r - p.kappa))));
    return eq;
}

}  // namespace

SpiralSolution solve_spiral(const PursuitParams& params) {
    params.validate();
    if (!(params.k1 > 0.0)) throw DomainError("solve_spiral requires k1 > 0");
    const AdmissibilityReport adm = check_admissibility(params);
    auto f = [&](double r) { return spiral_cubic(r, params); };

    // f(0) = k/omega > 0 and f -> -inf as r -> inf (the exponential wins for
    // k1 > 0), so a sign change always exists.
    double hi = std::max({1.0, params.kappa, params.R});
    int guard = 0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200)
            throw NoRootError("no sign change found in (0, " + std::to_string(hi) + ")");
    }

    SpiralSolution sol;
    if (adm.spiral_ok) {
        const double r = brent(f, 1e-14, hi, f(1e-14), f(hi));
        sol.roots.push_back(make_spiral_equilibrium(r, params));
        return sol;
    }

    // Outside the uniqueness conditions up to three positive roots may exist:
    // scan a log-spaced grid for sign changes and polish each bracket.
    const int grid_n = 10000;
    const double lo = 1e-9;
    double prev_r = lo, prev_f = f(lo);
    for (int i = 1; i <= grid_n; ++i) {
        const double r =
            lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(grid_n));
        const double fr = f(r);
        if ((prev_f > 0.0) != (fr > 0.0) || fr == 0.0) {
            const double root = brent(f, prev_r, r, prev_f, fr);
            if (sol.roots.empty() ||
                std::abs(root - sol.roots.back().r_star) > 1e-9 * std::max(1.0, root))
                sol.roots.push_back(make_spiral_equilibrium(root, params));
        }
        prev_r = r;
        prev_f = fr;
    }
    if (sol.roots.empty())
        throw NoRootError("no positive root in [1e-9, " + std::to_string(hi) + "]");
    sol.admissibility_warning = sol.roots.size() > 1;
    return sol;
}

CircularSolution solve_circular(const PursuitParams& params) {
    params.validate();
    if (params.k1 != 0.0) throw DomainError("solve_circular requires k1 = 0");
    const AdmissibilityReport adm = check_admissibility(params);
    if (!adm.circular_ok)
        throw ExistenceError("equilibria exist iff 0 < k/(omega R^3) < 2/(3 sqrt 3); ratio = " +
                             std::to_string(adm.ratio));

    const double R = params.R;
    const double q = params.k / params.omega;

    // Depressed cubic r^3 - R^2 r + q: all roots real here since
    // q^2/4 - R^6/27 < 0. Trigonometric solution, ordered per the root
    // interlacing R > r_s1 > R/sqrt(3) > r_s2 > 0 > r_s3.
    const double m = 2.0 * R / std::sqrt(3.0);
    const double arg = std::clamp(-3.0 * std::sqrt(3.0) * q / (2.0 * R * R * R), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;

    CircularRoots roots;
    roots.r_s1 = m * std::cos(phi);
    roots.r_s2 = m * std::cos(phi - 2.0 * kPi / 3.0);
    roots.r_s3 = m * std::cos(phi - 4.0 * kPi / 3.0);

    // Radical form with principal-branch complex cube roots, kept as a
    // cross-check on the trigonometric roots.
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(q * q / 4.0 - std::pow(R, 6.0) / 27.0, 0.0));
    roots.sigma1 = std::pow(-disc - q / 2.0, 1.0 / 3.0);
    roots.sigma2 = std::pow(disc - q / 2.0, 1.0 / 3.0);
    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> c1 = roots.sigma2 + roots.sigma1;
    const std::complex<double> c2 = -roots.sigma2 / 2.0 + std::sqrt(3.0) * roots.sigma1 / 2.0 * j -
                                    roots.sigma1 / 2.0 - std::sqrt(3.0) * roots.sigma2 / 2.0 * j;
    const std::complex<double> c3 = -roots.sigma2 / 2.0 - std::sqrt(3.0) * roots.sigma1 / 2.0 * j -
                                    roots.sigma1 / 2.0 + std::sqrt(3.0) * roots.sigma2 / 2.0 * j;
    const double mismatch =
        std::max({std::abs(c1 - roots.r_s1), std::abs(c2 - roots.r_s2), std::abs(c3 - roots.r_s3)});
    if (mismatch > 1e-10)
        throw DomainError("radical/trigonometric root cross-check failed: mismatch = " +
                          std::to_string(mismatch));

    auto make = [&](double r, Branch branch) {
        Equilibrium eq;
        eq.r_star = r;
        eq.R_star = R;
        eq.psi_star = std::acos(std::clamp(r / R, -1.0, 1.0));
        eq.branch = branch;
        eq.cubic_residual = std::abs(r * r * r - R * R * r + q);
        const double s = std::sin(eq.psi_star);
        eq.angle_residual = std::abs(std::cos(eq.psi_star) * s * s - adm.ratio);
        return eq;
    };

    CircularSolution sol;
    sol.roots = roots;
    sol.outer = make(roots.r_s1, Branch::CircularOuter);
    sol.inner = make(roots.r_s2, Branch::CircularInner);
    return sol;
}

double omega_for_radius(const PursuitParams& params, double target_r) {
    if (!(target_r > 0.0)) throw RangeError("target radius must be > 0");
    if (params.mode == PursuitMode::Circular) {
        if (!(target_r < params.R / std::sqrt(3.0)))
            throw RangeError("circular target radius must lie in (0, R/sqrt(3)), the stable branch");
        const double denom = params.R * params.R * target_r - target_r * target_r * target_r;
        if (!(denom > 0.0)) throw RangeError("cubic denominator is not positive");
        return params.k / denom;
    }
    const double denom =
        params.R * params.R * std::exp(2.0 * params.k1 * (target_r - params.kappa)) * target_r -
        target_r * target_r * target_r;
    if (!(denom > 0.0)) throw RangeError("cubic denominator is not positive");
    return params.k / denom;
}

Equilibrium multi_evader_equilibrium(const PursuitParams& params) {
    if (!check_admissibility(params).spiral_ok)
        throw DomainError("multi-evader equilibrium requires spiral admissibility");
    // Every evader shares the index-0 equilibrium: the difference of the two
    // cubics factors as (r_i - r_0)(positive) = 0.
    return solve_spiral(params).roots.front();
}

}  // namespace herdlab
