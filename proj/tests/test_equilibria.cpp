#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "herdlab/equilibria.hpp"
#include "herdlab/errors.hpp"
#include "herdlab/model.hpp"

using namespace herdlab;

namespace {

// Test-local oracle: plain bisection, independent of the library's solver.
template <class F>
double bisect(F&& f, double lo, double hi) {
    double flo = f(lo);
    REQUIRE(flo * f(hi) <= 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo > 0.0) == (fm > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double spiral_poly(double r, const PursuitParams& p) {
    return r * r * r - p.R * p.R * std::exp(2.0 * p.k1 * (r - p.kappa)) * r + p.k / p.omega;
}

double circ_poly(double r, const PursuitParams& p) {
    return r * r * r - p.R * p.R * r + p.k / p.omega;
}

const PursuitParams kSpiralW2{1.0, 1.0, 2.0, 2.0, 1.0, PursuitMode::Spiral};
const PursuitParams kSpiralW5{1.0, 1.0, 2.0, 5.0, 1.0, PursuitMode::Spiral};
const PursuitParams kCircW1{1.0, 0.0, 2.0, 1.0, 1.0, PursuitMode::Circular};
const PursuitParams kCircW2{1.0, 0.0, 2.0, 2.0, 1.0, PursuitMode::Circular};

}  // namespace

TEST_CASE("spiral equilibrium golden values") {
    SUBCASE("omega = 2 run") {
        const SpiralSolution sol = solve_spiral(kSpiralW2);
        REQUIRE(sol.roots.size() == 1);
        CHECK_FALSE(sol.admissibility_warning);
        const Equilibrium& eq = sol.roots.front();
        CHECK(std::abs(eq.r_star - 0.4458) < 1e-3);
        CHECK(std::abs(eq.psi_star - 1.1728) < 1e-3);
        CHECK(std::abs(eq.R_star - 1.149) < 1e-3);
        CHECK(eq.cubic_residual < 1e-10);
        CHECK(eq.angle_residual < 1e-9);
        CHECK(bisect([&](double r) { return spiral_poly(r, kSpiralW2); }, 1e-6, 1.0) ==
              doctest::Approx(eq.r_star).epsilon(1e-10));
    }
    SUBCASE("omega = 5 run") {
        const Equilibrium eq = solve_spiral(kSpiralW5).roots.front();
        CHECK(std::abs(eq.r_star - 0.2434) < 1e-3);
        CHECK(std::abs(eq.R_star - 0.9385) < 1e-3);
        // psi* = arccos(r*/R*), hand evaluation of the inverse relation.
        CHECK(std::abs(eq.psi_star - 1.3085) < 1e-3);
    }
}

TEST_CASE("circular equilibria and root ordering") {
    // Golden pair (0.2541, 1.4434): it satisfies the cubic only for
    // k/omega = 1, so with k = 1 the producing run must have had omega = 1.
    // An omega = 2 attribution sometimes quoted for the same pair is
    // inconsistent with the cubic; omega = 1 is used here, no guess is made
    // about what the omega = 2 run would have produced.
    const CircularSolution sol = solve_circular(kCircW1);
    CHECK(std::abs(sol.roots.r_s2 - 0.2541) < 5e-4);
    CHECK(std::abs(sol.inner.psi_star - 1.4434) < 5e-4);

    SUBCASE("all three roots match the bisection oracle") {
        auto f = [&](double r) { return circ_poly(r, kCircW1); };
        CHECK(sol.roots.r_s1 == doctest::Approx(bisect(f, 1.0, 2.0)).epsilon(1e-10));
        CHECK(sol.roots.r_s2 == doctest::Approx(bisect(f, 0.0, 1.0)).epsilon(1e-10));
        CHECK(sol.roots.r_s3 == doctest::Approx(bisect(f, -3.0, -1.0)).epsilon(1e-10));
        CHECK(std::abs(sol.roots.r_s1 - 1.8608) < 5e-4);
        CHECK(std::abs(sol.roots.r_s3 - (-2.1149)) < 5e-4);
    }
    SUBCASE("Vieta relations") {
        CHECK(sol.roots.r_s1 + sol.roots.r_s2 + sol.roots.r_s3 ==
              doctest::Approx(0.0).epsilon(1e-12));
        CHECK(sol.roots.r_s1 * sol.roots.r_s2 * sol.roots.r_s3 ==
              doctest::Approx(-kCircW1.k / kCircW1.omega).epsilon(1e-12));
    }
    SUBCASE("omega = 2 case against the oracle") {
        const CircularSolution s2 = solve_circular(kCircW2);
        auto f = [&](double r) { return circ_poly(r, kCircW2); };
        CHECK(s2.roots.r_s2 == doctest::Approx(bisect(f, 0.0, 1.0)).epsilon(1e-10));
        CHECK(std::abs(s2.roots.r_s2 - 0.12551) < 5e-5);
        CHECK(std::abs(s2.roots.r_s1 - 1.9343) < 5e-5);
    }
    SUBCASE("radical-form intermediates reproduce the roots") {
        const std::complex<double> j(0.0, 1.0);
        const auto s1 = sol.roots.sigma1, s2c = sol.roots.sigma2;
        CHECK(std::abs(s2c + s1 - sol.roots.r_s1) < 1e-10);
        const std::complex<double> r2 =
            -s2c / 2.0 + std::sqrt(3.0) * s1 / 2.0 * j - s1 / 2.0 - std::sqrt(3.0) * s2c / 2.0 * j;
        CHECK(std::abs(r2 - sol.roots.r_s2) < 1e-10);
    }
    SUBCASE("existence bound is sharp") {
        PursuitParams bad = kCircW1;
        bad.omega = 0.1;  // ratio = 1.25 > 2/(3 sqrt 3)
        CHECK_THROWS_AS(solve_circular(bad), ExistenceError);
    }
    SUBCASE("spiral solver refuses k1 = 0") {
        CHECK_THROWS_AS(solve_spiral(kCircW1), DomainError);
    }
}

TEST_CASE("root ordering holds across random admissible draws") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    int checked = 0;
    while (checked < 1000) {
        PursuitParams p{u(rng), 0.0, u(rng), u(rng), 1.0, PursuitMode::Circular};
        if (!check_admissibility(p).circular_ok) continue;
        const CircularSolution sol = solve_circular(p);
        const double guard = p.R / std::sqrt(3.0);
        CHECK(p.R > sol.roots.r_s1);
        CHECK(sol.roots.r_s1 > guard);
        CHECK(guard > sol.roots.r_s2);
        CHECK(sol.roots.r_s2 > 0.0);
        CHECK(0.0 > sol.roots.r_s3);
        ++checked;
    }
}

TEST_CASE("equilibrium radii approach their omega -> infinity limits monotonically") {
    double prev_r2 = kCircW1.R;
    double prev_r1 = 0.0;
    for (double omega : {10.0, 100.0, 1000.0, 10000.0}) {
        PursuitParams p = kCircW1;
        p.omega = omega;
        const CircularSolution sol = solve_circular(p);
        CHECK(sol.roots.r_s2 < prev_r2);
        CHECK(sol.roots.r_s1 > prev_r1);
        prev_r2 = sol.roots.r_s2;
        prev_r1 = sol.roots.r_s1;
    }
    CHECK(prev_r2 < 1e-3 * kCircW1.R);
    CHECK(kCircW1.R - prev_r1 < 1e-3 * kCircW1.R);
}

TEST_CASE("omega inversion") {
    SUBCASE("hand-evaluated circular target") {
        PursuitParams p = kCircW1;
        const double omega = omega_for_radius(p, 0.1);
        CHECK(omega == doctest::Approx(1.0 / (0.4 - 0.001)).epsilon(1e-12));
        CHECK(omega == doctest::Approx(2.5063).epsilon(1e-4));
    }
    SUBCASE("round-trips through the solver") {
        const double r2 = solve_circular(kCircW1).roots.r_s2;
        const double omega = omega_for_radius(kCircW1, r2);
        CHECK(omega == doctest::Approx(1.0).epsilon(1e-6));
        PursuitParams p = kCircW1;
        for (double target : {0.2, 0.1, 0.05, 0.01}) {
            p.omega = omega_for_radius(p, target);
            const double back = solve_circular(p).roots.r_s2;
            CHECK(std::abs(back - target) <= 1e-9 * target);
        }
    }
    SUBCASE("smaller targets need faster rotation") {
        CHECK(omega_for_radius(kCircW1, 0.05) > omega_for_radius(kCircW1, 0.1));
    }
    SUBCASE("spiral inversion round-trips too") {
        const Equilibrium eq = solve_spiral(kSpiralW2).roots.front();
        const double omega = omega_for_radius(kSpiralW2, eq.r_star);
        CHECK(omega == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("targets outside the stable branch are rejected") {
        CHECK_THROWS_AS(omega_for_radius(kCircW1, 1.5), RangeError);   // beyond R/sqrt(3)
        CHECK_THROWS_AS(omega_for_radius(kCircW1, -0.1), RangeError);
    }
    SUBCASE("spiral denominator can go non-positive for large kappa") {
        // kappa = 5 suppresses the exponential at moderate radii, so
        // R^2 e^{2 k1 (t - kappa)} t - t^3 < 0 at t = 2.
        PursuitParams p{1.0, 1.0, 2.0, 2.0, 5.0, PursuitMode::Spiral};
        CHECK_THROWS_AS(omega_for_radius(p, 2.0), RangeError);
    }
}

TEST_CASE("multi-evader equilibrium is the single-evader one") {
    const Equilibrium multi = multi_evader_equilibrium(kSpiralW2);
    const Equilibrium single = solve_spiral(kSpiralW2).roots.front();
    CHECK(multi.r_star == single.r_star);  // exact: same root
    CHECK(multi.psi_star == single.psi_star);
    CHECK(std::abs(multi.r_star - 0.4458) < 1e-3);
    CHECK(std::abs(multi.psi_star - 1.1728) < 1e-3);

    // Residual of the radial equilibrium condition r* = R* cos(psi*).
    CHECK(std::abs(multi.r_star - multi.R_star * std::cos(multi.psi_star)) < 1e-9);

    PursuitParams inadmissible = kSpiralW2;
    inadmissible.kappa = 1.2;  // above ln(8)/2
    CHECK_THROWS_AS(multi_evader_equilibrium(inadmissible), DomainError);
}

TEST_CASE("substitution residuals on random admissible draws") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.2, 2.5);
    int spiral_checked = 0;
    while (spiral_checked < 200) {
        PursuitParams p{u(rng), u(rng), u(rng), u(rng), u(rng), PursuitMode::Spiral};
        if (!check_admissibility(p).spiral_ok) continue;
        const Equilibrium eq = solve_spiral(p).roots.front();
        CHECK(eq.cubic_residual < 1e-9);
        CHECK(eq.angle_residual < 1e-9);
        CHECK(eq.r_star < eq.R_star);
        CHECK(eq.psi_star > 0.0);
        CHECK(eq.psi_star < kPi / 2.0);
        ++spiral_checked;
    }
}

TEST_CASE("spiral uniqueness matches the sign condition") {
    // Exactly one positive root whenever 1 - 2 k1^2 R^2 e^{-2 k1 kappa} < 0,
    // which is the admissibility condition.
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.2, 2.5);
    int admissible_seen = 0;
    for (int i = 0; i < 600; ++i) {
        PursuitParams p{u(rng), u(rng), u(rng), u(rng), u(rng), PursuitMode::Spiral};
        const bool ok = check_admissibility(p).spiral_ok;
        const double descartes =
            1.0 - 2.0 * p.k1 * p.k1 * p.R * p.R * std::exp(-2.0 * p.k1 * p.kappa);
        CHECK(ok == (descartes < 0.0));
        if (ok) {
            CHECK(solve_spiral(p).roots.size() == 1);
            ++admissible_seen;
        }
    }
    CHECK(admissible_seen > 50);
}

TEST_CASE("non-admissible parameters can carry three roots with a warning") {
    // kappa above the bound with a small k/omega: the cubic dips through zero
    // near the origin, recovers, and crosses again where the exponential wins
    // (roots near 0.063, 0.378, 2.0).
    PursuitParams p{0.01, 1.0, 2.0, 2.0, 2.0, PursuitMode::Spiral};
    REQUIRE_FALSE(check_admissibility(p).spiral_ok);
    const SpiralSolution sol = solve_spiral(p);
    REQUIRE(sol.roots.size() == 3);
    CHECK(sol.admissibility_warning);
    for (const auto& eq : sol.roots) {
        CHECK(eq.cubic_residual < 1e-8);
        CHECK(eq.r_star > 0.0);
    }
    CHECK(std::abs(sol.roots[0].r_star - 0.0632) < 1e-3);
    CHECK(std::abs(sol.roots[1].r_star - 0.3778) < 1e-3);
    CHECK(std::abs(sol.roots[2].r_star - 2.0005) < 1e-3);

    // A single root outside the admissible range carries no warning.
    PursuitParams single{1.0, 1.0, 2.0, 2.0, 3.0, PursuitMode::Spiral};
    REQUIRE_FALSE(check_admissibility(single).spiral_ok);
    const SpiralSolution one = solve_spiral(single);
    CHECK(one.roots.size() == 1);
    CHECK_FALSE(one.admissibility_warning);
}
