#include "polyreg/fields.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace polyreg;
using std::numbers::pi;

namespace {

double fd_nested(const std::function<double(Vec3)>& f, Vec3 p, std::array<int, 3> a, double h)
{
    for (int k = 0; k < 3; ++k) {
        if (a[k] > 0) {
            auto b = a;
            b[k] -= 1;
            Vec3 hp = Vec3::Zero();
            hp[k] = h;
            return (fd_nested(f, p + hp, b, h) - fd_nested(f, p - hp, b, h)) / (2 * h);
        }
    }
    return f(p);
}

// two-level Richardson extrapolation of nested central differences; accurate to
// O(h^6) truncation which reaches ~1e-7 relative at these scales
double fd(const std::function<double(Vec3)>& f, Vec3 p, std::array<int, 3> a, double h = 0.02)
{
    auto R1 = [&](double hh) {
        return (4.0 * fd_nested(f, p, a, hh / 2) - fd_nested(f, p, a, hh)) / 3.0;
    };
    return (16.0 * R1(h / 2) - R1(h)) / 15.0;
}

double eval(const Field& u, const Vec3& p) { return u.jet(p, 0).value(); }

} // namespace

TEST_CASE("corner singular field: values, harmonicity, homogeneity")
{
    auto g = PolytopeGeometry::builtin("lshape");
    int origin_corner = -1;
    for (const Corner& c : g.corners)
        if (g.vertices[c.vertex].head<2>().norm() < 1e-12) origin_corner = c.id;
    auto u = corner_singular(g, origin_corner, 1, ProblemSpec::dirichlet());
    REQUIRE(u->singular_exponent().has_value());
    const double lam = *u->singular_exponent();
    CHECK(lam == doctest::Approx(2.0 / 3).epsilon(1e-15));

    SUBCASE("u(r=1, theta'=3pi/4) = sin(pi/2) = 1")
    {
        // the L-shape sector starts on the +x ray, so theta' is the plain polar angle
        const double th = 3 * pi / 4;
        CHECK(eval(*u, Vec3(std::cos(th), std::sin(th), 0)) == doctest::Approx(1.0).epsilon(1e-13));
        // boundary rays: u vanishes on theta' = 0 and theta' = 3pi/2
        CHECK(eval(*u, Vec3(0.7, 0, 0)) == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(eval(*u, Vec3(0, -0.7, 0)) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("harmonic: Laplacian residual <= 1e-10 at sample points")
    {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> U(-0.9, 0.9);
        int tested = 0;
        while (tested < 50) {
            Vec3 p(U(rng), U(rng), 0);
            if (!g.contains(p) || p.head<2>().norm() < 0.05) continue;
            ++tested;
            Jet j = u->jet(p, 2);
            CHECK(std::abs(j.laplacian().value()) < 1e-10);
        }
    }
    SUBCASE("homogeneity u(t x) = t^lambda u(x) to 1e-12")
    {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> U(0.05, 1.0);
        for (int i = 0; i < 50; ++i) {
            const double th = U(rng) * 1.5 * pi;
            const Vec3 x(std::cos(th), std::sin(th), 0);
            const double t = U(rng);
            const double a = eval(*u, Vec3(t * x.x(), t * x.y(), 0));
            const double b = std::pow(t, lam) * eval(*u, x);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
    SUBCASE("derivative magnitude scales like r^(lambda-2) at order 2")
    {
        // |d^a u| with |a| = 2 is proportional to r^(lambda-2): check the ratio law
        const double th = 0.8;
        const Vec3 x(std::cos(th), std::sin(th), 0);
        auto mag2 = [&](double r) {
            Jet j = u->jet(Vec3(r * x.x(), r * x.y(), 0), 2);
            double s = 0.0;
            for (auto a : {std::array<int, 3>{2, 0, 0}, {1, 1, 0}, {0, 2, 0}})
                s += j.deriv(a) * j.deriv(a);
            return std::sqrt(s);
        };
        const double q = mag2(0.2) / mag2(0.4);
        CHECK(q == doctest::Approx(std::pow(0.5, lam - 2)).epsilon(1e-10));
    }
    SUBCASE("jets agree with finite differences up to order 4")
    {
        auto f = [&](Vec3 p) { return eval(*u, p); };
        const Vec3 p(0.31, 0.47, 0);
        Jet j = u->jet(p, 4);
        for (int ax = 0; ax <= 4; ++ax)
            for (int ay = 0; ay + ax <= 4; ++ay) {
                const double want = fd(f, p, {ax, ay, 0});
                const double got = j.deriv({ax, ay, 0});
                CHECK(got == doctest::Approx(want).epsilon(1e-6));
            }
    }
    SUBCASE("critical integer exponent is rejected")
    {
        CHECK_THROWS_WITH_AS((void)corner_singular(Vec2(0, 0), 0.0, pi / 2, 1,
                                                   ProblemSpec::dirichlet()),
                             doctest::Contains("logarithmic"), std::invalid_argument);
    }
    SUBCASE("rotated evaluation frame transforms derivatives correctly")
    {
        Mat3 R = Mat3::Identity();
        const double a = 0.73;
        R(0, 0) = std::cos(a); R(0, 1) = -std::sin(a);
        R(1, 0) = std::sin(a); R(1, 1) = std::cos(a);
        const Vec3 p(0.4, 0.2, 0);
        Jet j = u->jet(p, 1, R);
        // directional derivative along column 0 == gradient dot direction
        Jet ji = u->jet(p, 1);
        const double want = ji.deriv({1, 0, 0}) * R(0, 0) + ji.deriv({0, 1, 0}) * R(1, 0);
        CHECK(j.deriv({1, 0, 0}) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("Neumann corner singular uses cosine")
{
    auto u = corner_singular(Vec2(0, 0), 0.0, 3 * pi / 2, 1, ProblemSpec::neumann());
    // u = r^(2/3) cos(2 theta / 3): normal derivative vanishes on theta = 0
    CHECK(eval(*u, Vec3(0.5, 0, 0)) == doctest::Approx(std::pow(0.5, 2.0 / 3)).epsilon(1e-13));
    Jet j = u->jet(Vec3(0.5, 0, 0), 1);
    CHECK(std::abs(j.deriv({0, 1, 0})) < 1e-12);  // d/dtheta at theta=0
}

TEST_CASE("edge singular field: transverse-parallel structure")
{
    const Vec3 anchor(0, 0, 0), tangent(0, 0, 1), side(1, 0, 0);
    const double omega = 3 * pi / 2;

    SUBCASE("g = 1: parallel derivatives vanish")
    {
        auto u = edge_singular_3d(anchor, tangent, side, omega, 1, ProblemSpec::dirichlet(),
                                  AxialProfile::One);
        Jet j = u->jet(Vec3(0.3, 0.2, 0.7), 3);
        CHECK(std::abs(j.deriv({0, 0, 1})) < 1e-13);
        CHECK(std::abs(j.deriv({1, 0, 2})) < 1e-12);
        CHECK(std::abs(j.deriv({0, 0, 3})) < 1e-12);
        // and the value is independent of the axial position
        CHECK(eval(*u, Vec3(0.3, 0.2, -2.0)) == doctest::Approx(eval(*u, Vec3(0.3, 0.2, 5.0))).epsilon(1e-13));
    }
    SUBCASE("g = sin: d2/dz2 u = -u")
    {
        auto u = edge_singular_3d(anchor, tangent, side, omega, 1, ProblemSpec::dirichlet(),
                                  AxialProfile::Sin);
        Jet j = u->jet(Vec3(0.3, 0.2, 0.7), 2);
        CHECK(j.deriv({0, 0, 2}) == doctest::Approx(-j.value()).epsilon(1e-12));
    }
    SUBCASE("transverse derivative magnitudes independent of axial position")
    {
        auto u = edge_singular_3d(anchor, tangent, side, omega, 1, ProblemSpec::dirichlet(),
                                  AxialProfile::One);
        auto mag = [&](double z) {
            Jet j = u->jet(Vec3(0.25, 0.15, z), 2);
            double s = 0.0;
            for (auto a : {std::array<int, 3>{2, 0, 0}, {1, 1, 0}, {0, 2, 0}})
                s += j.deriv(a) * j.deriv(a);
            return std::sqrt(s);
        };
        CHECK(mag(0.1) == doctest::Approx(mag(0.9)).epsilon(1e-12));
        // and they scale like r^(lambda - 2) transversally
        auto magr = [&](double r) {
            Jet j = u->jet(Vec3(r * 0.6, r * 0.8, 0.4), 2);
            double s = 0.0;
            for (auto a : {std::array<int, 3>{2, 0, 0}, {1, 1, 0}, {0, 2, 0}})
                s += j.deriv(a) * j.deriv(a);
            return std::sqrt(s);
        };
        CHECK(magr(0.2) / magr(0.4) == doctest::Approx(std::pow(0.5, 2.0 / 3 - 2)).epsilon(1e-10));
    }
}

TEST_CASE("radial cutoff: plateau, support, derivative bound regression")
{
    const double r0 = 0.3, r1 = 0.8;
    for (auto profile : {CutoffProfile::ExpSmoothstep, CutoffProfile::PolySmoothstep}) {
        auto chi = radial_cutoff(Vec3::Zero(), r0, r1, 2, profile);
        CHECK(eval(*chi, Vec3(r0 / 2, 0, 0)) == 1.0);
        CHECK(eval(*chi, Vec3(2 * r1, 0, 0)) == 0.0);
        CHECK(eval(*chi, Vec3(0, r0 / 2, 0)) == 1.0);
        // derivatives vanish outside the transition shell
        Jet inside = chi->jet(Vec3(0.1, 0.05, 0), 3);
        Jet outside = chi->jet(Vec3(0.9, 0.2, 0), 3);
        for (int i = 1; i < inside.size(); ++i) {
            CHECK(inside.raw()[i] == 0.0);
            CHECK(outside.raw()[i] == 0.0);
        }
        // jets match finite differences in the transition region
        auto f = [&](Vec3 p) { return eval(*chi, p); };
        const Vec3 p(0.45, 0.3, 0);
        Jet j = chi->jet(p, 3);
        for (int ax = 0; ax <= 2; ++ax)
            for (int ay = 0; ay + ax <= 2; ++ay)
                CHECK(j.deriv({ax, ay, 0}) ==
                      doctest::Approx(fd(f, p, {ax, ay, 0}, 0.01)).epsilon(1e-6));
    }
    SUBCASE("sup |chi'| <= D / (r1 - r0), D frozen by measurement")
    {
        auto chi = radial_cutoff(Vec3::Zero(), r0, r1, 2, CutoffProfile::ExpSmoothstep);
        double sup = 0.0;
        for (int i = 1; i < 4000; ++i) {
            const double r = r0 + (r1 - r0) * i / 4000.0;
            Jet j = chi->jet(Vec3(r, 0, 0), 1);
            sup = std::max(sup, std::abs(j.deriv({1, 0, 0})));
        }
        // measured once: sup |H'| is 2.0 for the exp smoothstep on [0,1]
        CHECK(sup <= 2.0001 / (r1 - r0));
        CHECK(sup >= 1.8 / (r1 - r0));
    }
}

TEST_CASE("manufactured pair: supports and Laplacian consistency")
{
    auto g = PolytopeGeometry::builtin("lshape");
    int oc = -1;
    for (const Corner& c : g.corners)
        if (g.vertices[c.vertex].head<2>().norm() < 1e-12) oc = c.id;
    auto us = corner_singular(g, oc, 1, ProblemSpec::dirichlet());
    auto chi = radial_cutoff(Vec3::Zero(), 0.3, 0.8, 2);
    auto pair = manufactured_pair(us, chi);

    SUBCASE("f vanishes near the corner and outside the shell")
    {
        CHECK(eval(*pair.f, Vec3(0.05, 0.08, 0)) == 0.0);
        CHECK(eval(*pair.f, Vec3(-0.85, 0.3, 0)) == 0.0);
        CHECK(eval(*pair.u, Vec3(0.05, 0.08, 0)) ==
              doctest::Approx(eval(*us, Vec3(0.05, 0.08, 0))).epsilon(1e-14));
    }
    SUBCASE("Laplacian(u_tilde) - f = 0 and matches the FD Laplacian to 1e-9")
    {
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> U(-0.99, 0.99);
        auto fu = [&](Vec3 p) { return eval(*pair.u, p); };
        int tested = 0;
        while (tested < 25) {
            Vec3 p(U(rng), U(rng), 0);
            if (!g.contains(p)) continue;
            ++tested;
            const double f_val = eval(*pair.f, p);
            const double h = 2e-4;
            const double lap_fd = (fu(p + Vec3(h, 0, 0)) + fu(p - Vec3(h, 0, 0)) +
                                   fu(p + Vec3(0, h, 0)) + fu(p - Vec3(0, h, 0)) - 4 * fu(p)) /
                                  (h * h);
            CHECK(f_val == doctest::Approx(lap_fd).epsilon(1e-4).scale(1.0));
            // identity f = u Delta(chi) + 2 grad(chi).grad(u), exact since Delta u = 0
            Jet jc = chi->jet(p, 2);
            Jet ju = us->jet(p, 2);
            const double rhs = ju.value() * jc.laplacian().value() +
                               2.0 * (jc.deriv({1, 0, 0}) * ju.deriv({1, 0, 0}) +
                                      jc.deriv({0, 1, 0}) * ju.deriv({0, 1, 0}));
            CHECK(f_val == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
        }
    }
    SUBCASE("rejects non-harmonic input")
    {
        auto bad = monomial(2, {2, 0, 0});
        CHECK_THROWS(manufactured_pair(bad, chi));
    }
}

TEST_CASE("membership oracle")
{
    CHECK(membership_oracle(2.0 / 3, -1.5, SpaceKind::K, 3));
    CHECK(!membership_oracle(2.0 / 3, -1.8, SpaceKind::K, 3));
    CHECK(membership_oracle(0.5, -1.4, SpaceKind::A, 0));
    CHECK_THROWS_WITH_AS((void)membership_oracle(2.0, -1.5, SpaceKind::K, 0),
                         doctest::Contains("critical"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)membership_oracle(0.5, -2.0, SpaceKind::K, 0),
                         doctest::Contains("critical"), std::invalid_argument);
    // constant 1 at beta = -1.5: in B, not in A
    CHECK(membership_oracle_polynomial(-1.5, SpaceKind::B, 2));
    CHECK(!membership_oracle_polynomial(-1.5, SpaceKind::A, 2));
    CHECK(membership_oracle_polynomial(-1.5, SpaceKind::J, 2));   // m = 2 > 0.5
    CHECK(!membership_oracle_polynomial(-1.5, SpaceKind::J, 0));  // weight r^-1.5 on the value
    CHECK(membership_oracle_polynomial(-0.5, SpaceKind::K, 4));
}

TEST_CASE("mixed partial symmetry spot checks on composite fields")
{
    auto us = corner_singular(Vec2(0, 0), 0.0, 3 * pi / 2, 2, ProblemSpec::dirichlet());
    auto chi = radial_cutoff(Vec3::Zero(), 0.2, 0.9, 2);
    auto w = product(chi, us);
    Jet j = w->jet(Vec3(0.4, 0.33, 0), 5);
    // coefficients are stored per multi-index, so equality of mixed partials is
    // structural; verify via two extraction orders of the partial() operation
    Jet a = j.partial(0).partial(1);
    Jet b = j.partial(1).partial(0);
    for (int i = 0; i < a.size(); ++i) CHECK(a.raw()[i] == doctest::Approx(b.raw()[i]).epsilon(1e-12));
}
