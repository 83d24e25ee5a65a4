#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tbp/convexity.hpp"
#include "tbp/errors.hpp"
#include "tbp/index.hpp"
#include "tbp/orbits.hpp"

using namespace tbp;

namespace {

constexpr double kPi = std::numbers::pi;

KeplerOracleResult kepler(int k, int l, Orientation o, double c, bool circular = false)
{
    KeplerOrbitSpec sp;
    sp.k = k;
    sp.l = l;
    sp.orientation = o;
    sp.c = c;
    sp.circular = circular;
    return kepler_oracle(sp);
}

}  // namespace

TEST_CASE("round sphere and ellipsoid are strictly convex, the dumbbell is not")
{
    CoverSurface sph = round_sphere(1.0);
    ConvexityReport r = strict_convexity_check(sph, 200, 3);
    CHECK(r.pass);
    CHECK(r.min_eigenvalue == doctest::Approx(2.0).epsilon(1e-10));

    CHECK(strict_convexity_check(ellipsoid_surface(1.0, 2.3), 300, 4).pass);

    CoverSurface db = dumbbell_surface(0.1);
    ConvexityReport d = strict_convexity_check(db, 400, 5);
    CHECK_FALSE(d.pass);
    CHECK(d.certified);
    CHECK(d.min_eigenvalue < 0);
    // the waist sits near x1 = 0
    CHECK(std::abs(d.location[0]) < 0.5);
    // still starshaped
    std::mt19937_64 rng(9);
    std::normal_distribution<double> N(0, 1);
    for (int k = 0; k < 200; ++k) {
        Vec4 z = db.point_on_ray(Vec4(N(rng), N(rng), N(rng), N(rng)));
        CHECK(z.dot(db.jet(z).grad) > 0);
    }
}

TEST_CASE("Reeb field: alpha(R) = 1 and R spans ker(d alpha) on S")
{
    CoverSurface e = ellipsoid_surface(1.0, 1.7);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N(0, 1);
    for (int k = 0; k < 50; ++k) {
        Vec4 z = e.point_on_ray(Vec4(N(rng), N(rng), N(rng), N(rng)));
        Vec4 R = e.reeb(z);
        CHECK(alpha_form(z, R) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(e.jet(z).grad.dot(R)) < 1e-12);
        // Jacobian against central differences
        Mat4 J = e.reeb_jacobian(z), Jn;
        for (int i = 0; i < 4; ++i) {
            Vec4 h = Vec4::Unit(i) * 1e-6;
            Jn.col(i) = (e.reeb(z + h) - e.reeb(z - h)) / 2e-6;
        }
        CHECK((J - Jn).norm() < 1e-7);
    }
}

TEST_CASE("ellipsoid oracle: closed form flow, census and indices")
{
    EllipsoidOracle o = ellipsoid_oracle(2.0, 1.0);
    CHECK(o.r1 == 1.0);
    CHECK(o.T1() == doctest::Approx(kPi));
    CHECK(o.T2() == doctest::Approx(2 * kPi));
    EllipsoidCensus c = o.census();
    CHECK(c.rational);
    CHECK(c.p == 1);
    CHECK(c.q == 2);
    CHECK(c.common_period == doctest::Approx(2 * kPi));

    EllipsoidCensus irr = ellipsoid_oracle(1.0, std::sqrt(2.0)).census();
    CHECK_FALSE(irr.rational);
    REQUIRE(irr.closed_orbit_periods.size() == 2);
    CHECK(irr.closed_orbit_periods[0] == doctest::Approx(kPi));
    CHECK(irr.closed_orbit_periods[1] == doctest::Approx(kPi * std::sqrt(2.0)));

    auto pq = rational_approximation(0.375, 1000000);
    REQUIRE(pq);
    CHECK(pq->first == 3);
    CHECK(pq->second == 8);
    CHECK_FALSE(rational_approximation(kPi, 1000));

    // numerical Reeb flow against the closed form
    const double r1 = 1.0, r2 = std::sqrt(2.0);
    CoverSurface e = ellipsoid_surface(r1, r2);
    EllipsoidOracle eo = ellipsoid_oracle(r1, r2);
    double a1 = std::sqrt(r1 * 0.3), a2 = std::sqrt(r2 * 0.7);
    Vec4 z0 = eo.flow(a1, a2, 0);
    CHECK(std::abs(e.G(z0)) < 1e-14);

    TransitionSeries shortT = reeb_transition(e, eo.flow(std::sqrt(r1), 0, 0), eo.T1());
    TransitionSeries longT = reeb_transition(e, eo.flow(0, std::sqrt(r2), 0), eo.T2());
    CHECK(cz_index_of(shortT).value() == 3);
    // rotation 2 pi (1 + sqrt 2) lies in (4 pi, 6 pi)
    CHECK(cz_index_of(longT).value() == 5);
    // the frame angle matches the oracle rotation
    Mat2 m = shortT.psi.back();
    double ang = std::atan2(m(1, 0), m(0, 0));
    double expect = std::remainder(eo.short_orbit_rotation(), 2 * kPi);
    CHECK(std::abs(std::remainder(ang - expect, 2 * kPi)) < 1e-7);

    DynamicalConvexityReport dc = dynamical_convexity_spot_check(
        e, {ReebOrbit{eo.flow(std::sqrt(r1), 0, 0), eo.T1(), "short"}, ReebOrbit{eo.flow(0, std::sqrt(r2), 0), eo.T2(), "long"}});
    CHECK(dc.pass);
    CHECK(dc.min_cz == 3);
}

TEST_CASE("brake maps")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> N(0, 1);
    for (int k = 0; k < 30; ++k) {
        Vec4 z(N(rng), N(rng), N(rng), N(rng)), v(N(rng), N(rng), N(rng), N(rng));
        CHECK(alpha_form(brake_psi(z), brake_psi(v)) == doctest::Approx(alpha_form(z, v)));
        CHECK((brake_psi_inverse(brake_psi(z)) - z).norm() < 1e-15);
        CHECK((n_tilde(n_tilde(z)) - z).norm() == 0);
        CHECK((brake_n(brake_n(z)) - z).norm() < 1e-15);
        // anti-symplectic
        CHECK(alpha_form(brake_n(z), brake_n(v)) == doctest::Approx(-alpha_form(z, v)));
    }
    Mat4 n = brake_n_matrix();
    CHECK((n - Vec4(-1, -1, 1, 1).asDiagonal().toDenseMatrix()).norm() == 0);
    BrakeImages b = brake_maps(Vec4(0, 0, 1, 2));
    CHECK((b.n - Vec4(0, 0, 1, 2)).norm() == 0);
}

TEST_CASE("Levi-Civita cover of the moon component")
{
    const double mu = 0.1;
    const double c = lagrange_points(mu)[1].energy - 0.2;
    RegularizedSurface base(Problem::pcrtbp(mu), Primary::Moon, c);
    CoverSurface s = levi_civita_cover(base, 60, 7);
    CoverContractReport rep = check_cover_contract(s, 60, 8);
    CHECK(rep.ok());
    CHECK(rep.symmetry_error < 1e-14);
    CHECK(rep.flow_deviation < 1e-6);

    // two preimages, swapped by -Id, both on S
    SpherePhasePoint w = fixed_locus_point(base, +1, 0.7);
    auto pre = s.preimages(w);
    CHECK((pre[0] + pre[1]).norm() == 0);
    CHECK(pre[0].norm() > 0.01);
    for (const Vec4& z : pre) {
        CHECK(std::abs(s.G(z)) < 1e-10);
        CHECK((s.project(z).vec() - w.vec()).norm() < 1e-10);
    }
    // equivariance of the two involutions
    CHECK((s.project(n_tilde(pre[0])).vec() - regularized_involution(w).vec()).norm() < 1e-12);

    // the collision fiber lifts to v = 0
    SpherePhasePoint pole = fixed_locus_point(base, +1, 0.0);
    if (1 - pole.xi[0] < 1e-12) {
        auto pp = s.preimages(pole);
        CHECK(pp[0].head<2>().norm() == 0);
        CHECK((s.project(pp[0]).vec() - pole.vec()).norm() < 1e-10);
    }
}

TEST_CASE("the cover contract rejects a mismatched surface")
{
    const double mu = 0.1;
    RegularizedSurface base(Problem::pcrtbp(mu), Primary::Moon, lagrange_points(mu)[1].energy - 0.2);
    CoverSurface s = levi_civita_cover(base, 0);
    CoverSurface bad = s;
    bad.jet = round_sphere(1.0).jet;
    CoverContractReport rep = check_cover_contract(bad, 20, 3);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.clause[0]);
}

TEST_CASE("lifts of doubled Kepler orbits")
{
    // energies below the critical value -3/2, where the cover is starshaped
    for (auto [k, l, o, c] : {std::tuple{1, 1, Orientation::Retrograde, -1.8}, std::tuple{2, 1, Orientation::Direct, -1.55},
                              std::tuple{3, 1, Orientation::Direct, -1.6}}) {
        KeplerOracleResult r = kepler(k, l, o, c, k == 1 && l == 1 && o == Orientation::Retrograde);
        const SymmetricOrbit& orb = *r.orbit;
        CoverSurface s = levi_civita_cover(orb.surface(), 0);
        OrbitLift lift = lift_orbit(s, orb);
        CAPTURE(k);
        CAPTURE(l);
        CHECK(lift.closing_error < 1e-8);
        // x^2 winds an odd number of times about the primary exactly when the ends lie on opposite sides
        CHECK(lift.centrally_symmetric == (classify(orb) == OrbitType::I));
    }
}

TEST_CASE("lifted Kepler circles are dynamically convex on the cover")
{
    for (auto [o, c, cz] : {std::tuple{Orientation::Retrograde, -1.8, 3}, std::tuple{Orientation::Direct, -2.5, 5}}) {
        KeplerOracleResult r = kepler(1, 1, o, c, true);
        CoverSurface s = levi_civita_cover(r.orbit->surface(), 0);
        OrbitLift lift = lift_orbit(s, *r.orbit);
        DynamicalConvexityReport dc = dynamical_convexity_spot_check(s, {lift.orbit});
        CHECK(dc.pass);
        REQUIRE(dc.orbits.size() == 1);
        CHECK(dc.orbits[0].cz.value() == cz);
        CHECK_FALSE(dc.orbits[0].doubled);
        MeanIndexReport mi = mean_indices(orbit_transition(*r.orbit), 16);
        CHECK(mi.mean_rs > 0.5);
    }
    // Kepler ellipses are degenerate: the spot check reports instead of guessing
    KeplerOracleResult e = kepler(2, 1, Orientation::Direct, -1.55);
    CoverSurface s = levi_civita_cover(e.orbit->surface(), 0);
    DynamicalConvexityReport dc = dynamical_convexity_spot_check(s, {lift_orbit(s, *e.orbit).orbit});
    CHECK_FALSE(dc.pass);
    CHECK(dc.note.find("degenerate") != std::string::npos);
}

TEST_CASE("cover along the retrograde circle and the energy precondition")
{
    KeplerOracleResult r = kepler(1, 1, Orientation::Retrograde, -1.8, true);
    RegularizedSurface base = r.orbit->surface();
    CoverSurface s = levi_civita_cover(base, 40, 2);
    Vec4 z0 = s.preimages(r.orbit->start())[0];
    CHECK(cover_flow_deviation(s, z0, 2 * r.orbit->T) <= 1e-6);

    RegularizedSurface critical(Problem::rotating_kepler(), Primary::Earth, -1.5);
    CHECK_THROWS_AS(levi_civita_cover(critical, 0), std::invalid_argument);
    CHECK_THROWS_AS(levi_civita_cover(0.1, lagrange_points(0.1)[1].energy + 0.01, Primary::Moon), std::invalid_argument);
}
