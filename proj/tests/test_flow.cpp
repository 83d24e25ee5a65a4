#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tbp/errors.hpp"
#include "tbp/flow.hpp"

using namespace tbp;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("circular rotating Kepler orbit in the plane chart")
{
    auto pb = Problem::rotating_kepler();
    IntegratorConfig cfg;
    auto ret = event_return_to_axis(pb, {0.25, 0, 0, -2}, cfg, 2.0);
    REQUIRE(ret.returned);
    CHECK(ret.T == doctest::Approx(pi / 9).epsilon(1e-10));
    CHECK(std::abs(ret.z.q2) <= 1e-8);
    CHECK(std::abs(ret.z.p1) <= 1e-8);
    CHECK(ret.z.q1 == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK(ret.traj.max_drift() < 1e-10);
}

TEST_CASE("equilibrium stays put")
{
    double mu = 0.1;
    auto L = lagrange_points(mu);
    Vec2 q = L[4].position;
    PlanePhasePoint z(q.x(), q.y(), -q.y(), q.x());  // p = A(q): zero velocity
    auto r = integrate_plane(Problem::pcrtbp(mu), z, 5.0, IntegratorConfig{});
    CHECK((r.traj.x.back() - z.vec()).norm() < 1e-10);
}

TEST_CASE("sphere chart return to the fixed locus")
{
    auto pb = Problem::rotating_kepler();
    RegularizedSurface s(pb, Primary::Earth, -1.5);
    SpherePhasePoint w0 = inverse_moser_map(s, {0.25, 0, 0, -2});
    CHECK(on_fixed_locus(w0, 1e-15));
    IntegratorConfig cfg;
    auto ret = event_return_to_fixed_locus(s, w0, cfg, 10.0);
    REQUIRE(ret.returned);
    // dt/dtau = |q| = 0.25 along the circle
    CHECK(ret.T == doctest::Approx(4 * pi / 9).epsilon(1e-9));
    CHECK(std::abs(ret.residual) <= 1e-8);
    CHECK(ret.defects.norm() <= 1e-8);

    // perturbed start: residual depends smoothly on the fiber angle
    double th0 = std::atan2(w0.xi[2], w0.xi[0]);
    auto res = [&](double th) {
        SpherePhasePoint w = fixed_locus_point(s, w0.eta[1] > 0 ? 1 : -1, th);
        return event_return_to_fixed_locus(s, w, cfg, 10.0).residual;
    };
    double h = 1e-3;
    double fd = (res(th0 + 0.1 + h) - res(th0 + 0.1 - h)) / (2 * h);
    double secant = (res(th0 + 0.15) - res(th0 + 0.05)) / 0.1;
    CHECK(std::abs(fd - secant) <= 0.1 * std::abs(secant));
}

TEST_CASE("time reversal symmetry")
{
    double mu = 0.1;
    RegularizedSurface s(Problem::pcrtbp(mu), Primary::Moon, lagrange_points(mu)[1].energy - 0.2);
    SpherePhasePoint w0 = fixed_locus_point(s, +1, 2.0);
    IntegratorConfig cfg;
    auto fwd = integrate_sphere(s, w0, 0.7, cfg);
    auto bwd = integrate_sphere(s, w0, -0.7, cfg);
    SpherePhasePoint a = regularized_involution(SpherePhasePoint(Vec6(fwd.traj.x.back())));
    SpherePhasePoint b(Vec6(bwd.traj.x.back()));
    CHECK((a.vec() - b.vec()).norm() < 1e-8);
}

TEST_CASE("regularized flow projects to the plane flow")
{
    double mu = 0.1;
    auto pb = Problem::pcrtbp(mu);
    RegularizedSurface s(pb, Primary::Moon, lagrange_points(mu)[1].energy - 0.2);
    IntegratorConfig cfg;
    SpherePhasePoint w0 = fixed_locus_point(s, -1, 2.5);
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = 1e-9;
    auto sph = integrate_sphere(s, w0, 50.0, cfg, FlowMode::Clock, &ev);
    REQUIRE(sph.terminated_by_event);
    PlanePhasePoint z0 = moser_map(s, w0);
    double t_end = sph.traj.x.back()[6];
    auto pl = integrate_plane(pb, z0, t_end, cfg);
    double dev = 0;
    for (std::size_t i = 0; i < sph.traj.size(); ++i) {
        const VecX& st = sph.traj.x[i];
        PlanePhasePoint zs = moser_map(s, SpherePhasePoint(Vec6(st.head<6>())));
        dev = std::max(dev, (pl.traj.at(st[6]) - zs.vec()).norm());
    }
    CHECK(dev <= 1e-6);
}

TEST_CASE("energy drift over many axis returns")
{
    auto pb = Problem::rotating_kepler();
    RegularizedSurface s(pb, Primary::Earth, -1.8);
    SpherePhasePoint w0 = fixed_locus_point(s, +1, 1.0);
    IntegratorConfig cfg;
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = 1e-9;
    ev.stop_at = 100;
    auto r = integrate_sphere(s, w0, 1e4, cfg, FlowMode::Plain, &ev);
    CHECK(r.hits.size() == 100);
    CHECK(r.traj.max_drift() <= 1e-8);
}

TEST_CASE("plane chart refuses to approach a collision")
{
    auto pb = Problem::rotating_kepler();
    // zero angular momentum q1 p2 - q2 p1: radial fall into the earth
    PlanePhasePoint z(0.5, 0, 0, 0);
    CHECK_THROWS_AS(integrate_plane(pb, z, 3.0, IntegratorConfig{}), CollisionError);
}
