#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "herdlab/errors.hpp"
#include "herdlab/model.hpp"

using namespace herdlab;

TEST_CASE("rotating-frame conversion") {
    SUBCASE("zero rotation is the identity") {
        const RotatingCartesian p = to_rotating({1.0, 0.0}, 0.0, 2.0);
        CHECK(p.u == doctest::Approx(1.0));
        CHECK(p.v == doctest::Approx(0.0));
    }
    SUBCASE("quarter turn maps (0,1) onto the u-axis") {
        // omega*t = pi/2: hand evaluation of the rotation matrix.
        const RotatingCartesian p = to_rotating({0.0, 1.0}, kPi / 2.0, 1.0);
        CHECK(p.u == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.v) < 1e-12);
    }
    SUBCASE("roundtrip composes to the identity") {
        const double t = 1.234;
        const RotatingCartesian r = to_rotating({0.3, -0.7}, t, 1.0);
        const FixedCartesian back = from_rotating(r, t, 1.0);
        CHECK(back.x == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(-0.7).epsilon(1e-12));
    }
}

TEST_CASE("polar conversions") {
    const FixedCartesian a = to_cartesian(FixedPolar{2.0, 0.0});
    CHECK(a.x == doctest::Approx(2.0));
    CHECK(a.y == doctest::Approx(0.0));

    const FixedCartesian b = to_cartesian(FixedPolar{1.0, kPi / 2.0});
    CHECK(std::abs(b.x) < 1e-15);
    CHECK(b.y == doctest::Approx(1.0));

    const FixedPolar c = to_polar(FixedCartesian{1.0, 1.0});
    CHECK(c.r == doctest::Approx(std::sqrt(2.0)));
    CHECK(c.phi == doctest::Approx(kPi / 4.0));

    SUBCASE("the target point maps to (0, 0) so the conversion is total") {
        const FixedPolar o = to_polar(FixedCartesian{0.0, 0.0});
        CHECK(o.r == 0.0);
        CHECK(o.phi == 0.0);
    }
}

TEST_CASE("angle normalization lands in (-pi, pi]") {
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi + 0.1) == doctest::Approx(-kPi + 0.1));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double w = wrap_angle(dist(rng));
        CHECK(w > -kPi);
        CHECK(w <= kPi);
    }
}

TEST_CASE("frame conversions preserve radius") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coord(-1e6, 1e6);
    std::uniform_real_distribution<double> time(0.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const FixedCartesian p{coord(rng), coord(rng)};
        const double t = time(rng);
        const double omega = 2.0;
        const RotatingCartesian q = to_rotating(p, t, omega);
        const double r_fixed = std::hypot(p.x, p.y);
        const double r_rot = std::hypot(q.u, q.v);
        CHECK(std::abs(r_fixed - r_rot) <= 1e-12 * std::max(1.0, r_fixed));

        // psi + omega*t == phi (mod 2 pi)
        const double phi = to_polar(p).phi;
        const double psi = to_polar(q).psi;
        if (r_fixed > 1e-9)
            CHECK(std::abs(wrap_angle(psi + omega * t - phi)) < 1e-9);
    }
}

TEST_CASE("admissibility report") {
    SUBCASE("spiral bound: k1=1, R=2, kappa=1") {
        PursuitParams p{1.0, 1.0, 2.0, 2.0, 1.0, PursuitMode::Spiral};
        const AdmissibilityReport rep = check_admissibility(p);
        CHECK(rep.spiral_ok);
        REQUIRE(rep.kappa_bound.has_value());
        // ln(2 k1^2 R^2)/(2 k1) = ln(8)/2
        CHECK(*rep.kappa_bound == doctest::Approx(std::log(8.0) / 2.0).epsilon(1e-12));
        CHECK(*rep.kappa_bound == doctest::Approx(1.0397207708399179));
    }
    SUBCASE("circular ratio: k=1, omega=2, R=2") {
        PursuitParams p{1.0, 0.0, 2.0, 2.0, 1.0, PursuitMode::Circular};
        const AdmissibilityReport rep = check_admissibility(p);
        CHECK(rep.ratio == doctest::Approx(0.0625));
        CHECK(rep.circular_ok);
        CHECK(kCircularRatioBound == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-15));
    }
    SUBCASE("weak feedback leaves the bound undefined") {
        PursuitParams p{1.0, 0.1, 2.0, 2.0, 1.0, PursuitMode::Spiral};
        const AdmissibilityReport rep = check_admissibility(p);
        CHECK_FALSE(rep.spiral_ok);  // 2 k1^2 R^2 = 0.08 <= 1
        CHECK_FALSE(rep.kappa_bound.has_value());
    }
    SUBCASE("k1 = 0 leaves the bound undefined") {
        PursuitParams p{1.0, 0.0, 2.0, 2.0, 1.0, PursuitMode::Circular};
        CHECK_FALSE(check_admissibility(p).kappa_bound.has_value());
    }
    SUBCASE("monotone in kappa: growing kappa never re-enables spiral_ok") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(0.1, 3.0);
        for (int i = 0; i < 500; ++i) {
            PursuitParams p{u(rng), u(rng), u(rng), u(rng), u(rng), PursuitMode::Spiral};
            PursuitParams q = p;
            q.kappa = p.kappa + u(rng);
            const bool ok_small = check_admissibility(p).spiral_ok;
            const bool ok_large = check_admissibility(q).spiral_ok;
            if (!ok_small) CHECK_FALSE(ok_large);
        }
    }
}

TEST_CASE("parameter validation") {
    PursuitParams good{1.0, 1.0, 2.0, 2.0, 1.0, PursuitMode::Spiral};
    CHECK_NOTHROW(good.validate());

    PursuitParams bad = good;
    bad.omega = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);

    bad = good;
    bad.k = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);

    bad = good;
    bad.mode = PursuitMode::Circular;  // k1 still 1
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
