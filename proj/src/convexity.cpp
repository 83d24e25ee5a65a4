#include "tbp/convexity.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tbp/dual.hpp"
#include "tbp/errors.hpp"
#include "tbp/flow.hpp"
#include "tbp/log.hpp"

namespace tbp {

namespace {

constexpr double kPi = std::numbers::pi;

using D1 = Dual<double, 4>;
using D2 = Dual<D1, 4>;

template <typename F>
std::function<Jet4(const Vec4&)> make_jet(F f)
{
    return [f](const Vec4& z) {
        std::array<D2, 4> a;
        for (std::size_t i = 0; i < 4; ++i) a[i] = D2::variable(D1::variable(z[static_cast<int>(i)], i), i);
        D2 g = f(a);
        Jet4 j;
        j.value = g.v.v;
        for (int i = 0; i < 4; ++i) {
            j.grad[i] = g.v.d[static_cast<std::size_t>(i)];
            for (int k = 0; k < 4; ++k) j.hess(i, k) = g.d[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(k)];
        }
        return j;
    };
}

// Omega v for u^T Omega v = dx ^ dy
Vec4 omega_times(const Vec4& g) { return Vec4(g[2], g[3], -g[0], -g[1]); }

double omega4(const Vec4& a, const Vec4& b) { return a[0] * b[2] + a[1] * b[3] - a[2] * b[0] - a[3] * b[1]; }

Vec4 gaussian_direction(std::mt19937_64& rng)
{
    std::normal_distribution<double> N(0, 1);
    Vec4 d(N(rng), N(rng), N(rng), N(rng));
    return d.normalized();
}

// G for the complex-squaring chart: q - q^P = v^2, p = -u / (2 conj v), G = |v|^2 (H - c).
// The sign of u makes the Reeb flow run forward along X_Q.
struct LeviCivitaG {
    double m, m_other, c;
    Vec2 qp, d;
    bool hill;

    template <typename T>
    T operator()(const std::array<T, 4>& z) const
    {
        const T &v1 = z[0], &v2 = z[1], &u1 = z[2], &u2 = z[3];
        T uu = u1 * u1 + u2 * u2;
        T vv = v1 * v1 + v2 * v2;
        T w1 = v1 * v1 - v2 * v2;
        T w2 = 2.0 * v1 * v2;
        T inner = T(-c);
        if (m_other > 0) {
            using std::sqrt;
            T a = w1 + d.x(), b = w2 + d.y();
            inner = inner - m_other / sqrt(a * a + b * b);
        }
        if (hill) inner = inner - w1 * w1 + 0.5 * w2 * w2;
        // 1/2 Im(conj(u v) (v^2 + q^P)): the rotating term times |v|^2
        T A = u1 * v1 - u2 * v2, B = u1 * v2 + u2 * v1;
        T rot = -0.5 * (A * (w2 + qp.y()) - B * (w1 + qp.x()));
        return uu / 8.0 - m + vv * inner + rot;
    }
};

// Pi in closed form; smooth through v = 0 (the collision fiber).
template <typename T>
std::array<T, 6> lc_project(const std::array<T, 4>& z)
{
    const T &v1 = z[0], &v2 = z[1], &u1 = z[2], &u2 = z[3];
    T uu = u1 * u1 + u2 * u2;
    T vv = v1 * v1 + v2 * v2;
    T D = uu + 4.0 * vv;
    T re = u1 * v1 - u2 * v2, im = u1 * v2 + u2 * v1;
    std::array<T, 6> w;
    w[0] = (uu - 4.0 * vv) / D;
    w[1] = 4.0 * re / D;
    w[2] = 4.0 * im / D;
    w[3] = 0.5 * (u1 * v1 + u2 * v2);
    w[4] = -(u1 * u1 - u2 * u2) / 8.0 + 0.5 * (v1 * v1 - v2 * v2);
    w[5] = -(2.0 * u1 * u2) / 8.0 + v1 * v2;
    return w;
}

struct SphereG {
    double r;
    template <typename T>
    T operator()(const std::array<T, 4>& z) const
    {
        return z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3] - r * r;
    }
};

struct EllipsoidG {
    double r1, r2;
    template <typename T>
    T operator()(const std::array<T, 4>& z) const
    {
        return (z[0] * z[0] + z[2] * z[2]) / r1 + (z[1] * z[1] + z[3] * z[3]) / r2 - 1.0;
    }
};

struct DumbbellG {
    double b;
    template <typename T>
    T operator()(const std::array<T, 4>& z) const
    {
        T rr = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3];
        return rr * rr - z[0] * z[0] - b * rr - b * b;
    }
};

}  // namespace

double alpha_form(const Vec4& z, const Vec4& v) { return 0.5 * omega4(z, v); }

Vec4 n_tilde(const Vec4& z) { return Vec4(-z[0], z[1], z[2], -z[3]); }

// ---------------------------------------------------------------- surfaces

Vec4 CoverSurface::point_on_ray(const Vec4& dir) const
{
    Vec4 d = dir.normalized();
    double g0 = G(Vec4::Zero());
    if (!(g0 < 0)) throw NumericalError("the origin is not inside the surface");
    const double h = 0.004 * scale;
    double t0 = 0, t1 = h;
    while (G(t1 * d) < 0) {
        t0 = t1;
        t1 += h;
        if (t1 > 200 * scale) throw NumericalError("sampling failure: ray does not reach the surface");
    }
    for (int k = 0; k < 200 && t1 - t0 > 1e-15 * scale; ++k) {
        double tm = 0.5 * (t0 + t1);
        (G(tm * d) < 0 ? t0 : t1) = tm;
    }
    return 0.5 * (t0 + t1) * d;
}

Vec4 CoverSurface::project_to_surface(const Vec4& z) const
{
    Vec4 x = z;
    for (int k = 0; k < 6; ++k) {
        Jet4 j = jet(x);
        double gg = j.grad.squaredNorm();
        if (gg == 0) break;
        x -= j.value / gg * j.grad;
        if (std::abs(j.value) < 1e-15) break;
    }
    return x;
}

Vec4 CoverSurface::reeb(const Vec4& z) const
{
    Jet4 j = jet(z);
    double zg = z.dot(j.grad);
    if (!(std::abs(zg) > 0)) throw NumericalError("surface is not transverse to the radial field here");
    return -2.0 * omega_times(j.grad) / zg;
}

Mat4 CoverSurface::reeb_jacobian(const Vec4& z) const
{
    Jet4 j = jet(z);
    double zg = z.dot(j.grad);
    Mat4 OmH;
    for (int k = 0; k < 4; ++k) OmH.col(k) = omega_times(j.hess.col(k));
    Vec4 Og = omega_times(j.grad);
    Vec4 dzg = j.grad + j.hess * z;
    return -2.0 * (OmH * zg - Og * dzg.transpose()) / (zg * zg);
}

SpherePhasePoint CoverSurface::project(const Vec4& z) const
{
    if (!base) throw std::logic_error("surface has no covering map");
    std::array<double, 4> a{z[0], z[1], z[2], z[3]};
    auto w = lc_project(a);
    return SpherePhasePoint(Vec3(w[0], w[1], w[2]), Vec3(w[3], w[4], w[5]));
}

Eigen::Matrix<double, 6, 4> CoverSurface::project_jacobian(const Vec4& z) const
{
    if (!base) throw std::logic_error("surface has no covering map");
    std::array<D1, 4> a;
    for (std::size_t i = 0; i < 4; ++i) a[i] = D1::variable(z[static_cast<int>(i)], i);
    auto w = lc_project(a);
    Eigen::Matrix<double, 6, 4> J;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 4; ++c) J(r, c) = w[static_cast<std::size_t>(r)].d[static_cast<std::size_t>(c)];
    return J;
}

std::array<Vec4, 2> CoverSurface::preimages(const SpherePhasePoint& w) const
{
    if (!base) throw std::logic_error("surface has no covering map");
    using C = std::complex<double>;
    Vec4 z;
    if (1.0 - w.xi[0] < 1e-12) {
        // collision fiber: v = 0 and eta' = -u^2 / 8
        C u = std::sqrt(C(-8.0 * w.eta[1], -8.0 * w.eta[2]));
        z << 0, 0, u.real(), u.imag();
    } else {
        PlanePhasePoint pz = moser_map(*base, w);
        Vec2 y = pz.q() - base->primary_position();
        C v = std::sqrt(C(y.x(), y.y()));
        C u = -2.0 * std::conj(v) * C(pz.p1, pz.p2);
        z << v.real(), v.imag(), u.real(), u.imag();
    }
    return {z, Vec4(-z)};
}

CoverSurface round_sphere(double radius)
{
    CoverSurface s;
    s.name = "sphere";
    s.jet = make_jet(SphereG{radius});
    s.scale = radius;
    return s;
}

CoverSurface ellipsoid_surface(double r1, double r2)
{
    if (!(r1 > 0) || !(r2 > 0)) throw std::invalid_argument("ellipsoid radii must be positive");
    CoverSurface s;
    std::ostringstream os;
    os << "ellipsoid(" << r1 << "," << r2 << ")";
    s.name = os.str();
    s.jet = make_jet(EllipsoidG{r1, r2});
    s.scale = std::sqrt(std::max(r1, r2));
    return s;
}

CoverSurface dumbbell_surface(double b)
{
    if (!(b > 0)) throw std::invalid_argument("dumbbell waist parameter must be positive");
    CoverSurface s;
    s.name = "dumbbell";
    s.jet = make_jet(DumbbellG{b});
    s.scale = std::sqrt(1 + b);
    return s;
}

// ---------------------------------------------------------------- Reeb flow

namespace {

OdeSystem reeb_system(const CoverSurface& s, bool clock, bool variational)
{
    OdeSystem sys;
    sys.dim = 4 + (clock ? 1 : 0) + (variational ? 16 : 0);
    sys.error_dim = 4 + (clock ? 1 : 0);
    const int off = 4 + (clock ? 1 : 0);
    sys.rhs = [s, clock, variational, off](const VecX& x, VecX& dx) {
        Vec4 z = x.head<4>();
        Vec4 R = s.reeb(z);
        dx.head<4>() = R;
        if (clock) {
            SpherePhasePoint w = s.project(z);
            Vec6 push = s.project_jacobian(z) * R;
            Vec6 XQ = sphere_vector_field(*s.base, w.vec());
            dx[4] = push.dot(XQ) / XQ.squaredNorm();
        }
        if (variational) {
            Mat4 J = s.reeb_jacobian(z);
            Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> phi(x.data() + off);
            Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> dphi(dx.data() + off);
            dphi = J * phi;
        }
    };
    sys.project = [s](VecX& x) { x.head<4>() = s.project_to_surface(Vec4(x.head<4>())); };
    sys.constraint = [s](const VecX& x) { return std::abs(s.G(Vec4(x.head<4>()))); };
    sys.energy = [s](const VecX& x) { return s.G(Vec4(x.head<4>())); };
    return sys;
}

VecX reeb_state(const Vec4& z0, bool clock, bool variational)
{
    const int off = 4 + (clock ? 1 : 0);
    VecX x = VecX::Zero(off + (variational ? 16 : 0));
    x.head<4>() = z0;
    if (variational)
        for (int i = 0; i < 4; ++i) x[off + 5 * i] = 1.0;
    return x;
}

IntegratorConfig cover_config(const CoverSurface& s, IntegratorConfig cfg)
{
    cfg.max_step = std::min(cfg.max_step, 0.05 * s.scale * s.scale);
    return cfg;
}

// Integrates the Reeb flow with the Q-time clock until the clock reaches q_time.
IntegrationResult reeb_until_clock(const CoverSurface& s, const Vec4& z0, double q_time, const IntegratorConfig& cfg)
{
    OdeSystem sys = reeb_system(s, true, false);
    EventSpec ev;
    ev.g = [q_time](const VecX& x) { return x[4] - q_time; };
    ev.direction = +1;
    ev.stop_at = 1;
    // a generous Reeb-time horizon: the clock rate is bounded below on S
    double horizon = 1e3 * std::max(1.0, q_time);
    IntegrationResult r = integrate(sys, reeb_state(z0, true, false), horizon, cover_config(s, cfg), &ev, Chart::Cover);
    if (!r.terminated_by_event) throw NumericalError("Reeb flow did not reach the requested Q-time");
    return r;
}

}  // namespace

double cover_flow_deviation(const CoverSurface& s, const Vec4& z0, double q_time, const IntegratorConfig& cfg)
{
    IntegrationResult up = reeb_until_clock(s, z0, q_time, cfg);
    IntegratorConfig c = cfg;
    c.max_step = cfg.max_step / std::min(1.0, s.base->mass());
    IntegrationResult down = integrate_sphere(*s.base, s.project(z0), q_time, c);
    double dev = 0;
    for (std::size_t i = 0; i < up.traj.size(); ++i) {
        double qt = std::min(up.traj.x[i][4], q_time);
        SpherePhasePoint a = s.project(Vec4(up.traj.x[i].head<4>()));
        VecX b = down.traj.at(qt);
        dev = std::max(dev, (a.vec() - b.head<6>()).norm());
    }
    return dev;
}

// ---------------------------------------------------------------- contract

CoverContractReport check_cover_contract(const CoverSurface& s, std::size_t samples, std::uint64_t seed)
{
    if (!s.base) throw std::logic_error("contract needs a covering map");
    const RegularizedSurface& base = *s.base;
    CoverContractReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::ostringstream detail;

    // (iv) starshaped: the radial field points outward at the first zero on every ray
    std::vector<Vec4> pts;
    rep.min_radial_derivative = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        Vec4 z = s.point_on_ray(gaussian_direction(rng));
        Jet4 j = s.jet(z);
        rep.min_radial_derivative = std::min(rep.min_radial_derivative, z.dot(j.grad) / (z.norm() * j.grad.norm()));
        rep.symmetry_error = std::max(rep.symmetry_error, std::abs(s.G(Vec4(-z))));
        pts.push_back(z);
    }
    rep.clause[3] = rep.min_radial_derivative > 1e-8;

    // (i) Pi lands on Sigma, and points of Sigma have two preimages on S
    double onto = 0;
    for (const Vec4& z : pts) {
        SpherePhasePoint w = s.project(z);
        onto = std::max(onto, w.constraint_defect());
        onto = std::max(onto, std::abs(q_hamiltonian(base, w) - base.level()) / base.level());
    }
    const Problem& pb = base.problem();
    Vec2 qp = base.primary_position();
    // targets: random plane points of the component, drawn along rays from the primary
    // up to the first exit from the Hill region
    auto inside = [&](const Vec2& q) {
        try {
            return effective_potential(pb, q) < base.energy();
        } catch (const CollisionError&) {
            return true;
        }
    };
    std::uniform_real_distribution<double> U(0, 1);
    std::size_t targets = 0;
    for (std::size_t tries = 0; targets < samples && tries < 50 * samples; ++tries) {
        double ang = 2 * kPi * U(rng), psi = 2 * kPi * U(rng);
        Vec2 e(std::cos(ang), std::sin(ang));
        double h = 1e-3, rb = h;
        while (rb < 10 && inside(qp + rb * e)) rb += h;
        for (double lo = rb - h, hi = rb; hi - lo > 1e-13;) {
            double mid = 0.5 * (lo + hi);
            (inside(qp + mid * e) ? lo : hi) = mid;
            rb = lo;
        }
        Vec2 q = qp + rb * U(rng) * e;
        double Uq;
        try {
            Uq = effective_potential(pb, q);
        } catch (const CollisionError&) {
            continue;
        }
        if (!(Uq < base.energy())) continue;
        double sp = std::sqrt(2 * (base.energy() - Uq));
        Vec2 A(-q.y(), q.x());
        Vec2 p = A + sp * Vec2(std::cos(psi), std::sin(psi));
        SpherePhasePoint w = inverse_moser_map(base, PlanePhasePoint(q.x(), q.y(), p.x(), p.y()));
        auto pre = s.preimages(w);
        for (const Vec4& z : pre) {
            onto = std::max(onto, std::abs(s.G(z)) / std::max(1.0, s.jet(z).grad.norm()));
            onto = std::max(onto, (s.project(z).vec() - w.vec()).norm());
        }
        if ((pre[0] - pre[1]).norm() < 1e-8) onto = std::max(onto, 1.0);  // not two distinct points
        ++targets;
    }
    rep.onto_error = onto;
    rep.clause[0] = onto <= 1e-8 && targets == samples;
    if (targets < samples) detail << "only " << targets << " plane targets sampled; ";

    // (ii) Pi o N~ = R o Pi
    for (const Vec4& z : pts) {
        Vec6 a = s.project(n_tilde(z)).vec();
        Vec6 b = regularized_involution(s.project(z)).vec();
        rep.equivariance_error = std::max(rep.equivariance_error, (a - b).norm());
    }
    rep.clause[1] = rep.equivariance_error <= 1e-8;

    // (iii) Reeb trajectories push forward to X_Q trajectories
    double qt = 5.0 / std::min(1.0, base.mass());
    for (int k = 0; k < 3 && rep.clause[0]; ++k) {
        try {
            rep.flow_deviation = std::max(rep.flow_deviation, cover_flow_deviation(s, pts[k % pts.size()], qt));
        } catch (const std::exception& e) {
            rep.flow_deviation = std::numeric_limits<double>::infinity();
            detail << "flow comparison failed: " << e.what() << "; ";
        }
    }
    rep.clause[2] = rep.flow_deviation <= 1e-6;
    rep.detail = detail.str();
    return rep;
}

CoverSurface levi_civita_cover(const RegularizedSurface& base, std::size_t samples, std::uint64_t seed)
{
    double crit = -1.5;
    if (base.problem().kind() == ProblemKind::PCRTBP) crit = lagrange_points(base.problem().mu()).points[0].energy;
    if (base.problem().kind() == ProblemKind::HillLunar) crit = hill_critical_energy();
    if (!(base.energy() < crit)) throw std::invalid_argument("the cover needs an energy below the first critical value");
    CoverSurface s;
    s.name = "levi-civita(" + to_string(base.problem().kind()) + "," + to_string(base.primary()) + ")";
    LeviCivitaG g{base.mass(), base.other_mass(), base.energy(), base.primary_position(), base.other_offset(),
                  base.problem().kind() == ProblemKind::HillLunar};
    s.jet = make_jet(g);
    s.scale = std::sqrt(base.mass());
    s.base = std::make_shared<RegularizedSurface>(base);
    if (samples == 0) return s;
    CoverContractReport rep = check_cover_contract(s, samples, seed);
    static const char* names[] = {"(i) onto", "(ii) equivariance", "(iii) flow correspondence", "(iv) starshaped"};
    for (int k = 0; k < 4; ++k) {
        if (!rep.clause[static_cast<std::size_t>(k)]) {
            std::ostringstream os;
            os << "cover contract clause " << names[k] << " failed: onto " << rep.onto_error << ", equivariance "
               << rep.equivariance_error << ", flow " << rep.flow_deviation << ", radial " << rep.min_radial_derivative
               << (rep.detail.empty() ? "" : "; " + rep.detail);
            throw ContractError(names[k], os.str());
        }
    }
    return s;
}

CoverSurface levi_civita_cover(double mu, double c, Primary primary)
{
    Problem pb = mu == 0 ? Problem::rotating_kepler() : Problem::pcrtbp(mu);
    return levi_civita_cover(RegularizedSurface(pb, primary, c));
}

// ---------------------------------------------------------------- convexity

ConvexityReport strict_convexity_check(const CoverSurface& s, std::size_t samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    ConvexityReport rep;
    rep.samples = samples;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    double worst_ratio = std::numeric_limits<double>::infinity();
    double err_at_min = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        Vec4 dir;
        if (k < 8) {
            dir = Vec4::Zero();
            dir[static_cast<int>(k % 4)] = k < 4 ? 1.0 : -1.0;
        } else {
            dir = gaussian_direction(rng);
        }
        Vec4 z = s.point_on_ray(dir);
        Jet4 j = s.jet(z);
        Vec4 n = j.grad.normalized();
        // orthonormal basis of T_z S
        Eigen::Matrix4d P = Eigen::Matrix4d::Identity() - n * n.transpose();
        Eigen::JacobiSVD<Eigen::Matrix4d> svd(P, Eigen::ComputeFullU);
        Eigen::Matrix<double, 4, 3> B = svd.matrixU().leftCols<3>();
        Eigen::Matrix3d Hr = B.transpose() * j.hess * B;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Hr);
        double lmin = es.eigenvalues()(0);
        double hn = j.hess.norm();
        double ratio = lmin / std::max(hn, 1e-300);
        if (ratio < worst_ratio) {
            worst_ratio = ratio;
            rep.min_eigenvalue = lmin;
            rep.location = z;
            rep.margin = 1e-8 * hn;
            err_at_min = std::abs(j.value);
        }
    }
    rep.pass = rep.min_eigenvalue > rep.margin;
    rep.certified = !rep.pass && rep.min_eigenvalue < -1e3 * rep.margin && err_at_min < 1e-12;
    std::ostringstream os;
    os << (rep.pass ? "strictly convex on all " : "not strictly convex: ") << samples << " samples, min restricted eigenvalue "
       << rep.min_eigenvalue;
    rep.message = os.str();
    return rep;
}

// ---------------------------------------------------------------- indices on S

TransitionSeries reeb_transition(const CoverSurface& s, const Vec4& z0, double T, const IntegratorConfig& cfg)
{
    OdeSystem sys = reeb_system(s, false, true);
    IntegrationResult run = integrate(sys, reeb_state(z0, false, true), T, cover_config(s, cfg), nullptr, Chart::Cover);
    const Trajectory& tr = run.traj;

    auto frame = [&](const Vec4& z) {
        Jet4 j = s.jet(z);
        double gz = j.grad.dot(z);
        auto P = [&](const Vec4& v) { return Vec4(v - j.grad.dot(v) / gz * z); };
        Vec4 f1 = P(Vec4(-z[1], z[0], z[3], -z[2]));
        Vec4 f2 = P(Vec4(-z[3], z[2], -z[1], z[0]));
        double w = omega4(f1, f2);
        if (!(w > 1e-14)) throw NumericalError("global frame of ker(alpha) degenerates");
        return std::pair<Vec4, Vec4>(f1, f2 / w);
    };
    auto stm = [](const VecX& x) { return Mat4(Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(x.data() + 4)); };

    // refine like the orbit transition: the frame must not turn too far between samples
    std::vector<double> ts{tr.t[0]};
    std::vector<VecX> xs{tr.x[0]};
    for (std::size_t i = 1; i < tr.size(); ++i) {
        Mat4 a = stm(tr.x[i - 1]), b = stm(tr.x[i]);
        double turn = (b * a.inverse() - Mat4::Identity()).norm();
        int k = std::clamp(static_cast<int>(std::ceil(turn / 0.05)), 1, 64);
        for (int m = 1; m < k; ++m) {
            double t = tr.t[i - 1] + (tr.t[i] - tr.t[i - 1]) * m / k;
            ts.push_back(t);
            xs.push_back(tr.at(t));
        }
        ts.push_back(tr.t[i]);
        xs.push_back(tr.x[i]);
    }

    auto [a0, b0] = frame(z0);
    TransitionSeries out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        Vec4 z = xs[i].head<4>();
        Mat4 phi = stm(xs[i]);
        auto [e1, e2] = frame(z);
        Vec4 R = s.reeb(z);
        Mat2 m;
        for (int c = 0; c < 2; ++c) {
            Vec4 w = phi * (c == 0 ? a0 : b0);
            w -= alpha_form(z, w) * R;
            m.col(c) = Vec2(omega4(w, e2), omega4(e1, w));
        }
        double det = m.determinant();
        if (!(det > 0)) throw NumericalError("linearized Reeb flow lost orientation");
        out.max_correction = std::max(out.max_correction, std::abs(det - 1));
        out.t.push_back(ts[i]);
        out.psi.push_back(m / std::sqrt(det));
    }
    return out;
}

DynamicalConvexityReport dynamical_convexity_spot_check(const CoverSurface& s, const std::vector<ReebOrbit>& orbits,
                                                        const IntegratorConfig& cfg)
{
    DynamicalConvexityReport rep;
    rep.min_cz = std::numeric_limits<double>::infinity();
    std::ostringstream note;
    bool all = !orbits.empty();
    for (const ReebOrbit& o : orbits) {
        ReebIndexRecord rec;
        rec.label = o.label;
        rec.period = o.period;
        OdeSystem sys = reeb_system(s, false, false);
        IntegrationResult run = integrate(sys, reeb_state(o.start, false, false), o.period, cover_config(s, cfg), nullptr,
                                          Chart::Cover);
        Vec4 end = run.traj.x.back().head<4>();
        double plus = (end - o.start).norm(), minus = (end + o.start).norm();
        if (minus < plus) {
            rec.doubled = true;
            rec.period = 2 * o.period;
            rec.closing_error = minus;
            note << o.label << ": closes only after doubling; ";
        } else {
            rec.closing_error = plus;
        }
        try {
            rec.cz = cz_index_of(reeb_transition(s, o.start, rec.period, cfg));
            rep.min_cz = std::min(rep.min_cz, rec.cz.value());
            if (rec.cz.value() < 3) all = false;
        } catch (const NumericalError& e) {
            note << o.label << ": " << e.what() << "; ";
            all = false;
        }
        rep.orbits.push_back(rec);
    }
    rep.pass = all;
    rep.note = note.str();
    return rep;
}

OrbitLift lift_orbit(const CoverSurface& s, const SymmetricOrbit& orbit, const IntegratorConfig& cfg)
{
    if (!s.base) throw std::logic_error("lifting needs a covering map");
    Vec4 z0 = s.preimages(orbit.start())[0];
    z0 = s.project_to_surface(z0);
    IntegrationResult a = reeb_until_clock(s, z0, 2 * orbit.T, cfg);
    Vec4 z1 = a.hits.back().x.head<4>();
    OrbitLift out;
    out.orbit.start = z0;
    out.orbit.label = "lift";
    if ((z1 - z0).norm() <= (z1 + z0).norm()) {
        out.orbit.period = a.hits.back().t;
        out.closing_error = (z1 - z0).norm();
        out.centrally_symmetric = false;
    } else {
        IntegrationResult b = reeb_until_clock(s, z0, 4 * orbit.T, cfg);
        Vec4 z2 = b.hits.back().x.head<4>();
        out.orbit.period = b.hits.back().t;
        out.closing_error = (z2 - z0).norm();
        out.centrally_symmetric = true;
    }
    return out;
}

// ---------------------------------------------------------------- ellipsoid

double EllipsoidOracle::T1() const { return kPi * r1; }
double EllipsoidOracle::T2() const { return kPi * r2; }

Vec4 EllipsoidOracle::flow(double a1, double a2, double t) const
{
    double p1 = 2 * t / r1, p2 = 2 * t / r2;
    return Vec4(a1 * std::cos(p1), a2 * std::cos(p2), a1 * std::sin(p1), a2 * std::sin(p2));
}

std::optional<std::pair<long, long>> rational_approximation(double x, long max_denominator)
{
    if (!(x > 0)) throw std::invalid_argument("rational_approximation expects x > 0");
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_denominator) return std::nullopt;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= 4 * std::numeric_limits<double>::epsilon() * x)
            return std::make_pair(h1, k1);
        double frac = r - a;
        if (frac <= 0) return std::make_pair(h1, k1);
        r = 1.0 / frac;
    }
    return std::nullopt;
}

EllipsoidCensus EllipsoidOracle::census(long max_denominator) const
{
    EllipsoidCensus c;
    auto pq = rational_approximation(r1 / r2, max_denominator);
    std::ostringstream os;
    if (pq) {
        c.rational = true;
        c.p = pq->first;
        c.q = pq->second;
        long l = std::lcm(c.p, c.q);
        c.common_period = static_cast<double>(l) * T1() / static_cast<double>(c.p);
        os << "all periodic, minimal common period " << c.common_period;
        double k = c.common_period / kPi;
        if (std::abs(k - std::round(k)) < 1e-12) os << " = " << std::round(k) << "π";
        os << " (r1/r2 = " << c.p << "/" << c.q << ")";
    } else {
        c.rational = false;
        c.closed_orbit_periods = {T1(), T2()};
        os << "two closed orbits, periods " << T1() << " and " << T2() << " (r1/r2 irrational within denominator bound "
           << max_denominator << ")";
    }
    c.summary = os.str();
    return c;
}

// The global frame turns with conj(z1) along the short orbit; the transverse
// direction z2 turns with e^{2it/r2}.
double EllipsoidOracle::short_orbit_rotation() const { return 2 * kPi * (1 + r1 / r2); }
double EllipsoidOracle::long_orbit_rotation() const { return 2 * kPi * (1 + r2 / r1); }

EllipsoidOracle ellipsoid_oracle(double r1, double r2)
{
    if (!(r1 > 0) || !(r2 > 0)) throw std::invalid_argument("ellipsoid radii must be positive");
    EllipsoidOracle e;
    e.r1 = std::min(r1, r2);
    e.r2 = std::max(r1, r2);
    return e;
}

// ---------------------------------------------------------------- brake maps

Vec4 brake_psi(const Vec4& z) { return Vec4(z[0], -z[3], z[2], z[1]); }
Vec4 brake_psi_inverse(const Vec4& z) { return Vec4(z[0], z[3], z[2], -z[1]); }
Vec4 brake_n(const Vec4& z) { return brake_psi(n_tilde(brake_psi_inverse(z))); }

BrakeImages brake_maps(const Vec4& z) { return {brake_psi(z), brake_psi_inverse(z), n_tilde(z), brake_n(z)}; }

Mat4 brake_n_matrix()
{
    Mat4 m;
    for (int i = 0; i < 4; ++i) m.col(i) = brake_n(Vec4::Unit(i));
    return m;
}

}  // namespace tbp
