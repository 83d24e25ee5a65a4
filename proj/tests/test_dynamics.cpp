#include "doctest.h"

#include <cmath>
#include <random>

#include "tbp/dynamics.hpp"
#include "tbp/errors.hpp"

using namespace tbp;

namespace {
PlanePhasePoint random_point(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    return {u(rng), u(rng), u(rng), u(rng)};
}
}  // namespace

TEST_CASE("hamiltonian at hand-evaluated points")
{
    CHECK(hamiltonian(Problem::pcrtbp(0.5), {0, 1, 0, 0}) == doctest::Approx(-2.0 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(hamiltonian(Problem::rotating_kepler(), {0.25, 0, 0, -2}) == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK_THROWS_AS(hamiltonian(Problem::pcrtbp(0.3), {0.3, 0, 1, 1}), CollisionError);
}

TEST_CASE("vector field against finite differences")
{
    std::mt19937_64 rng(7);
    for (auto pb : {Problem::pcrtbp(0.1), Problem::hill_lunar(), Problem::rotating_kepler()}) {
        for (int k = 0; k < 100; ++k) {
            PlanePhasePoint z = random_point(rng);
            Vec4 x = z.vec();
            Vec4 f = hamiltonian_vector_field(pb, z);
            CHECK(f[0] == doctest::Approx(z.p1 + z.q2).epsilon(1e-14));
            const double h = 1e-6;
            Vec4 grad;
            for (int i = 0; i < 4; ++i) {
                Vec4 a = x, b = x;
                a[i] += h;
                b[i] -= h;
                grad[i] = (hamiltonian(pb, PlanePhasePoint(a)) - hamiltonian(pb, PlanePhasePoint(b))) / (2 * h);
            }
            Vec4 expect(grad[2], grad[3], -grad[0], -grad[1]);
            CHECK((f - expect).norm() <= 1e-6 * (1 + f.norm()));

            Mat4 j = vector_field_jacobian(pb, z);
            for (int i = 0; i < 4; ++i) {
                Vec4 a = x, b = x;
                a[i] += h;
                b[i] -= h;
                Vec4 col = (hamiltonian_vector_field(pb, PlanePhasePoint(a)) -
                            hamiltonian_vector_field(pb, PlanePhasePoint(b))) / (2 * h);
                CHECK((j.col(i) - col).norm() <= 1e-5 * (1 + col.norm()));
            }
        }
    }
    // perpendicular crossing of the axis
    Vec4 f = hamiltonian_vector_field(Problem::pcrtbp(0.2), {0.5, 0, 0, 1.3});
    CHECK(std::abs(f[0]) < 1e-15);
}

TEST_CASE("involutions")
{
    auto pb = Problem::hill_lunar();
    PlanePhasePoint r = involution(pb, Involution::R, {1, 2, 3, 4});
    CHECK(r.q1 == 1);
    CHECK(r.q2 == -2);
    CHECK(r.p1 == -3);
    CHECK(r.p2 == 4);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        PlanePhasePoint z = random_point(rng);
        PlanePhasePoint rr = involution(pb, Involution::R, involution(pb, Involution::R, z));
        CHECK((rr.vec() - z.vec()).norm() == 0);
        double h = hamiltonian(pb, z);
        CHECK(hamiltonian(pb, involution(pb, Involution::Rprime, z)) == doctest::Approx(h).epsilon(1e-13));
        CHECK(hamiltonian(pb, involution(pb, Involution::R, z)) == doctest::Approx(h).epsilon(1e-13));
    }
    CHECK_THROWS_AS(involution(Problem::pcrtbp(0.1), Involution::Rprime, {1, 2, 3, 4}), UnsupportedInvolution);
}

TEST_CASE("Lagrange points")
{
    for (double mu : {0.01, 0.1, 0.3, 0.5}) {
        auto L = lagrange_points(mu);
        CHECK(L.ordering_holds());
        CHECK(std::abs(L[4].energy - L[5].energy) <= 1e-12);
        CHECK(L[4].position.x() == doctest::Approx(mu - 0.5).epsilon(1e-12));
        CHECK(L[4].position.y() == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
        for (int i = 1; i <= 5; ++i)
            CHECK(effective_potential_gradient(Problem::pcrtbp(mu), L[i].position).norm() < 1e-10);
        // L1 sits between the primaries
        CHECK(L[1].position.x() < mu);
        CHECK(L[1].position.x() > mu - 1);
    }
    CHECK(std::abs(lagrange_points(0.5)[1].position.x()) < 1e-12);
    CHECK(hill_critical_energy() == doctest::Approx(-0.5 * std::cbrt(81.0)).epsilon(1e-14));
}

TEST_CASE("Hill region at mu = 0, c = -2")
{
    auto pb = Problem::rotating_kepler();
    CHECK(effective_potential(pb, Vec2(0.5, 0)) == doctest::Approx(-2.125).epsilon(1e-14));
    CHECK(effective_potential(pb, Vec2(0.6, 0)) > -2.0);
    // boundary radius: root of r^3 - 4r + 2 = 0 near 0.54, by bisection
    double lo = 0.3, hi = 0.7;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        (mid * mid * mid - 4 * mid + 2 > 0 ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(0.5392).epsilon(1e-4));
    GridSpec spec;
    spec.nx = spec.ny = 301;
    auto grid = hill_region(pb, -2.0, spec);
    int earth = grid.component_at(Vec2(0.2, 0.1));
    REQUIRE(earth >= 0);
    CHECK(grid.component_at(Vec2(lo - 0.02, 0)) == earth);
    CHECK(grid.component_at(Vec2(lo + 0.02, 0)) != earth);
    CHECK(grid.component_at(Vec2(1.4, 0)) < 0);    // gap before the outer part at r ~ 1.675
    CHECK(grid.component_at(Vec2(1.45, 1.45)) >= 0);
}

TEST_CASE("two bounded components below the first critical value")
{
    double mu = 0.1;
    double c = lagrange_points(mu)[1].energy - 0.2;
    GridSpec spec;
    spec.nx = spec.ny = 257;
    auto grid = hill_region(Problem::pcrtbp(mu), c, spec);
    auto rep = check_two_bounded_components(grid);
    CHECK(rep.two_bounded);
    CHECK(rep.bounded == 2);
    CHECK(grid.component_of(ComponentKind::Moon).has_value());
    CHECK(grid.component_of(ComponentKind::Earth).has_value());
}
