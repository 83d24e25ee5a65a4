#include "tbp/regularization.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "tbp/errors.hpp"

namespace tbp {

double SpherePhasePoint::constraint_defect() const
{
    return std::max(std::abs(xi.squaredNorm() - 1.0), std::abs(xi.dot(eta)));
}

SpherePhasePoint SpherePhasePoint::projected() const
{
    Vec3 x = xi.normalized();
    return {x, eta - x.dot(eta) * x};
}

PlaneChartPoint stereographic(const SpherePhasePoint& w)
{
    const double om = 1.0 - w.xi[0];
    if (!(om > 0) || om < 1e-300) throw PoleError("stereographic projection undefined at the north pole (collision)");
    PlaneChartPoint r;
    r.x = Vec2(w.xi[1], w.xi[2]) / om;
    r.y = Vec2(w.eta[1] * om + w.xi[1] * w.eta[0], w.eta[2] * om + w.xi[2] * w.eta[0]);
    return r;
}

SpherePhasePoint inverse_stereographic(const PlaneChartPoint& xy)
{
    const double x2 = xy.x.squaredNorm();
    const double s = x2 + 1.0;
    const double xy_dot = xy.x.dot(xy.y);
    SpherePhasePoint w;
    w.xi = Vec3((x2 - 1.0) / s, 2.0 * xy.x.x() / s, 2.0 * xy.x.y() / s);
    Vec2 ep = 0.5 * s * xy.y - xy_dot * xy.x;
    w.eta = Vec3(xy_dot, ep.x(), ep.y());
    return w;
}

RegularizedSurface::RegularizedSurface(const Problem& pb, Primary primary, double c, bool check_energy)
    : pb_(pb), primary_(primary), c_(c), mass_(0), qp_(0, 0), d_(0, 0), other_mass_(0)
{
    switch (pb.kind()) {
    case ProblemKind::HillLunar:
        mass_ = 1.0;
        break;
    case ProblemKind::RotatingKepler:
        if (primary != Primary::Earth)
            throw std::invalid_argument("the rotating Kepler problem has only the earth component");
        mass_ = 1.0;
        qp_ = pb.earth();
        break;
    case ProblemKind::PCRTBP:
        mass_ = pb.mass(primary);
        qp_ = pb.position(primary);
        {
            Primary other = primary == Primary::Earth ? Primary::Moon : Primary::Earth;
            d_ = qp_ - pb.position(other);
            other_mass_ = pb.mass(other);
        }
        break;
    }
    if (!std::isfinite(c)) throw std::invalid_argument("energy must be finite");
    if (check_energy) {
        double crit = critical_energy();
        bool ok = pb.kind() == ProblemKind::RotatingKepler ? c <= crit : c < crit;
        if (!ok) {
            std::ostringstream os;
            os.precision(12);
            os << "energy c = " << c << " is not below the first critical value " << crit;
            throw std::invalid_argument(os.str());
        }
    }
}

double RegularizedSurface::critical_energy() const
{
    switch (pb_.kind()) {
    case ProblemKind::HillLunar: return hill_critical_energy();
    case ProblemKind::RotatingKepler: return -1.5;
    case ProblemKind::PCRTBP: break;
    }
    return lagrange_points(pb_.mu())[1].energy;
}

PlanePhasePoint moser_map(const RegularizedSurface& s, const SpherePhasePoint& w)
{
    PlaneChartPoint xy;
    try {
        xy = stereographic(w);
    } catch (const PoleError&) {
        throw CollisionError(to_string(s.primary()), "Moser map undefined at the north pole: collision with the " +
                                                         to_string(s.primary()));
    }
    Vec2 q = xy.y + s.primary_position();
    return {q.x(), q.y(), -xy.x.x(), -xy.x.y()};
}

SpherePhasePoint inverse_moser_map(const RegularizedSurface& s, const PlanePhasePoint& z)
{
    PlaneChartPoint xy{-z.p(), z.q() - s.primary_position()};
    return inverse_stereographic(xy);
}

double k_hamiltonian(const RegularizedSurface& s, const PlanePhasePoint& z)
{
    double r = (z.q() - s.primary_position()).norm();
    if (r == 0) throw CollisionError(to_string(s.primary()), "K evaluated at the primary");
    return (hamiltonian(s.problem(), z) - s.energy()) * r;
}

namespace {
std::array<double, 6> as_array(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

using D1 = Dual<double, 6>;
using D2 = Dual<D1, 6>;

template <typename T>
std::array<T, 6> constrained_field(const RegularizedSurface& s, const std::array<T, 6>& w)
{
    using DT = Dual<T, 6>;
    std::array<DT, 6> wd;
    for (std::size_t i = 0; i < 6; ++i) wd[i] = DT::variable(w[i], i);
    DT q = s.q_function(wd);
    const auto& g = q.d;  // gradient: g[0..2] wrt xi, g[3..5] wrt eta

    T xi2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    T xi_ge = w[0] * g[3] + w[1] * g[4] + w[2] * g[5];
    T xi_gx = w[0] * g[0] + w[1] * g[1] + w[2] * g[2];
    T eta_ge = w[3] * g[3] + w[4] * g[4] + w[5] * g[5];
    T b = -xi_ge / xi2;
    T a = (eta_ge - xi_gx) / xi2;
    std::array<T, 6> out;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = g[3 + i] + b * w[i];
        out[3 + i] = -g[i] - a * w[i] - b * w[3 + i];
    }
    return out;
}
}  // namespace

double q_hamiltonian(const RegularizedSurface& s, const SpherePhasePoint& w) { return s.q_function(as_array(w.vec())); }

Vec6 q_gradient(const RegularizedSurface& s, const SpherePhasePoint& w)
{
    std::array<D1, 6> wd;
    Vec6 v = w.vec();
    for (std::size_t i = 0; i < 6; ++i) wd[i] = D1::variable(v[static_cast<int>(i)], i);
    D1 q = s.q_function(wd);
    Vec6 g;
    for (int i = 0; i < 6; ++i) g[i] = q.d[static_cast<std::size_t>(i)];
    return g;
}

Vec6 sphere_vector_field(const RegularizedSurface& s, const Vec6& w)
{
    auto f = constrained_field<double>(s, as_array(w));
    Vec6 r;
    for (int i = 0; i < 6; ++i) r[i] = f[static_cast<std::size_t>(i)];
    return r;
}

Mat6 sphere_vector_field_jacobian(const RegularizedSurface& s, const Vec6& w)
{
    std::array<D1, 6> wd;
    for (std::size_t i = 0; i < 6; ++i) wd[i] = D1::variable(w[static_cast<int>(i)], i);
    auto f = constrained_field<D1>(s, wd);
    Mat6 j;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) j(r, c) = f[static_cast<std::size_t>(r)].d[static_cast<std::size_t>(c)];
    return j;
}

double time_scale(const RegularizedSurface& s, const SpherePhasePoint& w)
{
    return s.mass() * w.eta.norm() * (1.0 - w.xi[0]);
}

SpherePhasePoint regularized_involution(const SpherePhasePoint& w)
{
    return {Vec3(w.xi[0], -w.xi[1], w.xi[2]), Vec3(-w.eta[0], w.eta[1], -w.eta[2])};
}

SpherePhasePoint fiber_reversal(const SpherePhasePoint& w) { return {w.xi, -w.eta}; }

SpherePhasePoint reflection_lift(const SpherePhasePoint& w)
{
    return {Vec3(w.xi[0], -w.xi[1], w.xi[2]), Vec3(w.eta[0], -w.eta[1], w.eta[2])};
}

SpherePhasePoint regularized_involution_prime(const SpherePhasePoint& w)
{
    return {Vec3(w.xi[0], w.xi[1], -w.xi[2]), Vec3(-w.eta[0], -w.eta[1], w.eta[2])};
}

bool on_fixed_locus(const SpherePhasePoint& w, double tol)
{
    return std::abs(w.xi[1]) <= tol && std::abs(w.eta[0]) <= tol && std::abs(w.eta[2]) <= tol;
}

// --- fiber rays --------------------------------------------------------------

namespace {

// Ray parameter at which q = q^P + t v leaves the Hill region {U <= c}.
double fiber_exit(const RegularizedSurface& s, const Vec3& xi, const Vec3& e)
{
    Vec2 v(e[1] * (1.0 - xi[0]) + xi[1] * e[0], e[2] * (1.0 - xi[0]) + xi[2] * e[0]);
    double speed = v.norm();
    const double far = 1e3 * s.mass() + 10.0;
    if (speed < 1e-12) return far;
    const Problem& pb = s.problem();
    // U = c counts as outside: at a critical level the component closes there
    const double cut = s.energy() - 1e-12 * (1.0 + std::abs(s.energy()));
    auto outside = [&](double t) { return effective_potential(pb, s.primary_position() + t * v) > cut; };
    // Hill components have diameter < 2 in these units
    const double dt = 2e-3 / speed;
    double t = dt;
    while (t * speed < 3.0) {
        if (outside(t)) {
            double lo = t - dt, hi = t;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (lo + hi);
                (outside(mid) ? hi : lo) = mid;
            }
            return lo;
        }
        t += dt;
    }
    return t;
}

double fiber_defect(const RegularizedSurface& s, double t, const Vec3& xi, const Vec3& e)
{
    Vec3 eta = t * e;
    std::array<double, 6> w{xi[0], xi[1], xi[2], eta[0], eta[1], eta[2]};
    return t * s.factor(w) - s.mass();
}

struct RayRoots {
    int count = 0;
    bool tangential = false;
    double first = std::numeric_limits<double>::quiet_NaN();
};

RayRoots scan_ray(const std::function<double(double)>& g, double tmax, int resolution)
{
    RayRoots r;
    const double h = tmax / resolution;
    double last_t = 0, last = g(0.0);  // last sample with nonzero value
    double prev = last, prev2 = last;
    for (int i = 1; i <= resolution; ++i) {
        double t = i * h;
        double val = g(t);
        if (val != 0 && last != 0 && (val < 0) != (last < 0)) {
            ++r.count;
            if (r.count == 1) {
                double lo = last_t, hi = t, flo = last;
                for (int k = 0; k < 200 && hi - lo > 1e-15 * (1 + hi); ++k) {
                    double mid = 0.5 * (lo + hi);
                    double fm = g(mid);
                    if (fm != 0 && (fm < 0) == (flo < 0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                r.first = 0.5 * (lo + hi);
            }
        }
        // near-zero interior extremum: possible tangency
        if (i >= 2 && std::abs(prev) < 1e-9 && (prev - prev2) * (val - prev) < 0) r.tangential = true;
        if (val != 0) {
            last = val;
            last_t = t;
        }
        prev2 = prev;
        prev = val;
    }
    return r;
}

}  // namespace

SpherePhasePoint fixed_locus_point(const RegularizedSurface& s, int sign, double theta)
{
    double f = fixed_locus_value(s, sign, theta);
    return {Vec3(std::cos(theta), 0.0, std::sin(theta)), Vec3(0.0, f, 0.0)};
}

double fixed_locus_value(const RegularizedSurface& s, int sign, double theta, int* root_count)
{
    Vec3 xi(std::cos(theta), 0.0, std::sin(theta));
    Vec3 e(0.0, sign > 0 ? 1.0 : -1.0, 0.0);
    const double m = s.mass();
    auto g = [&](double t) { return fiber_defect(s, t, xi, e); };

    // geometric growth of the bracket [0, fmax]
    const double limit = fiber_exit(s, xi, e);
    double fmax = std::min(0.25 * m, limit);
    while (g(fmax) < 0) {
        // at a critical level the root can sit on the equilibrium where the ray leaves;
        // the exit rule stops about sqrt(1e-12) short of it
        if (fmax >= limit && g(limit) > -1e-5 * m) {
            if (root_count) *root_count = 1;
            return sign > 0 ? limit : -limit;
        }
        if (fmax >= limit) {
            std::ostringstream os;
            os << "no fiber root of sign " << sign << " at theta = " << theta << " inside the Hill region";
            throw NumericalError(os.str());
        }
        fmax = std::min(1.5 * fmax, limit);
    }
    double lo = 0, hi = fmax;
    while (hi - lo > 1e-13 * (1.0 + hi)) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);
    if (root_count) *root_count = scan_ray(g, limit, 1000).count;
    return sign > 0 ? root : -root;
}

SpherePhasePoint FixedLocusCircle::point(std::size_t i) const
{
    return {Vec3(std::cos(theta[i]), 0.0, std::sin(theta[i])), Vec3(0.0, f[i], 0.0)};
}

std::pair<FixedLocusCircle, FixedLocusCircle> fixed_locus_circles(const RegularizedSurface& s, int samples)
{
    if (samples < 3) throw std::invalid_argument("need at least three samples per circle");
    auto build = [&](int sign) {
        FixedLocusCircle c;
        c.sign = sign;
        c.q1_min = c.q1_max = s.primary_position().x();
        std::ostringstream diag;
        for (int i = 0; i < samples; ++i) {
            double th = 2.0 * std::numbers::pi * i / samples;
            int count = 0;
            double f = fixed_locus_value(s, sign, th, &count);
            c.theta.push_back(th);
            c.f.push_back(f);
            c.root_count.push_back(count);
            if (count > 1) {
                c.violation = true;
                diag << "theta=" << th << " roots=" << count << "; ";
            }
            double q1 = s.primary_position().x() + f * (1.0 - std::cos(th));
            c.q1_min = std::min(c.q1_min, q1);
            c.q1_max = std::max(c.q1_max, q1);
        }
        c.diagnostics = c.violation ? "starshapedness violation: " + diag.str() : "";
        return c;
    };
    return {build(+1), build(-1)};
}

// --- starshapedness ----------------------------------------------------------

StarshapeReport starshape_check(const FiberDefect& defect, const FiberLimit& limit, int base_samples, int direction_samples,
                                std::uint64_t seed, int ray_resolution)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    StarshapeReport rep;
    for (int b = 0; b < base_samples; ++b) {
        Vec3 xi(gauss(rng), gauss(rng), gauss(rng));
        xi.normalize();
        Vec3 u = xi.unitOrthogonal();
        Vec3 v = xi.cross(u);
        for (int k = 0; k < direction_samples; ++k) {
            double a = 2.0 * std::numbers::pi * (k + 0.5) / direction_samples;
            Vec3 e = std::cos(a) * u + std::sin(a) * v;
            double tmax = limit(xi, e);
            auto g = [&](double t) { return defect(t, xi, e); };
            RayRoots r = scan_ray(g, tmax, ray_resolution);
            ++rep.samples;
            if (r.tangential) ++rep.tangential;
            rep.max_count = std::max(rep.max_count, r.count);
            if (r.count != 1) {
                rep.pass = false;
                rep.failures.push_back({xi, e, r.count});
            }
        }
    }
    return rep;
}

StarshapeReport starshape_check(const RegularizedSurface& s, int base_samples, int direction_samples, std::uint64_t seed)
{
    auto defect = [&s](double t, const Vec3& xi, const Vec3& e) { return fiber_defect(s, t, xi, e); };
    auto lim = [&s](const Vec3& xi, const Vec3& e) { return fiber_exit(s, xi, e); };
    return starshape_check(defect, lim, base_samples, direction_samples, seed, 1000);
}

}  // namespace tbp
