#include "tbp/flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tbp/errors.hpp"

namespace tbp {

namespace {

void plane_guard(const Problem& pb, const VecX& x)
{
    Vec2 q(x[0], x[1]);
    auto check = [&](const Vec2& body, const char* name) {
        double r = (q - body).norm();
        if (r < kPlaneCollisionGuard) {
            std::ostringstream os;
            os << "plane chart within " << r << " of the " << name
               << "; continue in the regularized (sphere) chart";
            throw CollisionError(name, os.str());
        }
    };
    switch (pb.kind()) {
    case ProblemKind::HillLunar: check(Vec2(0, 0), "origin"); break;
    case ProblemKind::RotatingKepler: check(pb.earth(), "earth"); break;
    case ProblemKind::PCRTBP:
        check(pb.earth(), "earth");
        check(pb.moon(), "moon");
        break;
    }
}

}  // namespace

OdeSystem plane_system(const Problem& pb, FlowMode mode)
{
    if (mode == FlowMode::Clock) throw std::invalid_argument("the plane chart runs in physical time already");
    OdeSystem sys;
    const bool var = mode == FlowMode::Variational;
    sys.dim = var ? 20 : 4;
    sys.error_dim = 4;
    sys.rhs = [pb, var](const VecX& x, VecX& dx) {
        PlanePhasePoint z(x[0], x[1], x[2], x[3]);
        Vec4 f = hamiltonian_vector_field(pb, z);
        dx.head<4>() = f;
        if (var) {
            Mat4 j = vector_field_jacobian(pb, z);
            Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> phi(x.data() + 4);
            Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> dphi(dx.data() + 4);
            dphi = j * phi;
        }
    };
    sys.energy = [pb](const VecX& x) { return hamiltonian(pb, PlanePhasePoint(x[0], x[1], x[2], x[3])); };
    sys.guard = [pb](const VecX& x) { plane_guard(pb, x); };
    return sys;
}

OdeSystem sphere_system(const RegularizedSurface& s, FlowMode mode)
{
    OdeSystem sys;
    sys.dim = mode == FlowMode::Plain ? 6 : (mode == FlowMode::Clock ? 7 : 42);
    sys.error_dim = mode == FlowMode::Variational ? 6 : sys.dim;
    sys.rhs = [s, mode](const VecX& x, VecX& dx) {
        Vec6 w = x.head<6>();
        dx.head<6>() = sphere_vector_field(s, w);
        if (mode == FlowMode::Clock) {
            SpherePhasePoint p(w);
            dx[6] = time_scale(s, p);
        } else if (mode == FlowMode::Variational) {
            Mat6 j = sphere_vector_field_jacobian(s, w);
            Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>> phi(x.data() + 6);
            Eigen::Map<Eigen::Matrix<double, 6, 6, Eigen::RowMajor>> dphi(dx.data() + 6);
            dphi = j * phi;
        }
    };
    sys.project = [](VecX& x) {
        Vec3 xi = x.head<3>().normalized();
        Vec3 eta = x.segment<3>(3);
        x.head<3>() = xi;
        x.segment<3>(3) = eta - xi.dot(eta) * xi;
    };
    sys.constraint = [](const VecX& x) {
        SpherePhasePoint p(Vec6(x.head<6>()));
        return p.constraint_defect();
    };
    sys.energy = [s](const VecX& x) { return q_hamiltonian(s, SpherePhasePoint(Vec6(x.head<6>()))) - s.level(); };
    return sys;
}

namespace {
VecX with_identity(const VecX& base, int n)
{
    VecX x(base.size() + n * n);
    x.head(base.size()) = base;
    Eigen::Map<Eigen::MatrixXd>(x.data() + base.size(), n, n).setIdentity();
    return x;
}
}  // namespace

IntegrationResult integrate_plane(const Problem& pb, const PlanePhasePoint& z0, double t_end,
                                  const IntegratorConfig& cfg, FlowMode mode, const EventSpec* ev)
{
    OdeSystem sys = plane_system(pb, mode);
    VecX x0 = z0.vec();
    if (mode == FlowMode::Variational) x0 = with_identity(x0, 4);
    return integrate(sys, x0, t_end, cfg, ev, Chart::Plane);
}

IntegrationResult integrate_sphere(const RegularizedSurface& s, const SpherePhasePoint& w0, double t_end,
                                   const IntegratorConfig& cfg, FlowMode mode, const EventSpec* ev)
{
    if (w0.constraint_defect() > 1e-8) throw std::invalid_argument("initial point violates |xi| = 1, xi.eta = 0");
    OdeSystem sys = sphere_system(s, mode);
    VecX x0 = w0.vec();
    if (mode == FlowMode::Clock) {
        x0.conservativeResize(7);
        x0[6] = 0;
    } else if (mode == FlowMode::Variational) {
        x0 = with_identity(x0, 6);
    }
    return integrate(sys, x0, t_end, cfg, ev, Chart::Sphere);
}

Mat6 sphere_stm(const VecX& state)
{
    return Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(state.data() + 6);
}

Mat4 plane_stm(const VecX& state)
{
    return Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(state.data() + 4);
}

Vec3 fixed_locus_defects(const SpherePhasePoint& w) { return Vec3(w.xi[1], w.eta[0], w.eta[2]); }

double section_residual(const SpherePhasePoint& w) { return w.xi[0] * w.eta[2] - w.xi[2] * w.eta[0]; }

FixedLocusReturn event_return_to_fixed_locus(const RegularizedSurface& s, const SpherePhasePoint& w0,
                                             const IntegratorConfig& cfg, double t_max, int n, double t_min)
{
    if (fixed_locus_defects(w0).norm() > 1e-10) throw std::invalid_argument("start point is not on Fix R");
    if (n < 1) throw std::invalid_argument("crossing count must be positive");
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = t_min;
    ev.stop_at = n;
    FixedLocusReturn out;
    IntegrationResult r = integrate_sphere(s, w0, t_max, cfg, FlowMode::Plain, &ev);
    out.traj = std::move(r.traj);
    if (r.terminated_by_event) {
        const auto& hit = r.hits.back();
        out.returned = true;
        out.T = hit.t;
        out.z = SpherePhasePoint(Vec6(hit.x.head<6>()));
        out.defects = fixed_locus_defects(out.z);
        out.residual = section_residual(out.z);
        out.closest_t = out.T;
        out.closest_defect = std::abs(out.residual);
        return out;
    }
    out.closest_defect = std::numeric_limits<double>::infinity();
    for (const auto& hit : r.hits) {
        double d = std::abs(section_residual(SpherePhasePoint(Vec6(hit.x.head<6>()))));
        if (d < out.closest_defect) {
            out.closest_defect = d;
            out.closest_t = hit.t;
        }
    }
    return out;
}

AxisReturn event_return_to_axis(const Problem& pb, const PlanePhasePoint& z0, const IntegratorConfig& cfg, double t_max,
                                int n)
{
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = 1e-9;
    ev.stop_at = n;
    AxisReturn out;
    IntegrationResult r = integrate_plane(pb, z0, t_max, cfg, FlowMode::Plain, &ev);
    out.traj = std::move(r.traj);
    if (r.terminated_by_event) {
        const auto& hit = r.hits.back();
        out.returned = true;
        out.T = hit.t;
        out.z = PlanePhasePoint(Vec4(hit.x.head<4>()));
        out.residual = out.z.p1;
    }
    return out;
}

// d(lambda) = d eta ^ d xi, the form for which xi' = Q_eta, eta' = -Q_xi is Hamiltonian
double omega6(const Vec6& u, const Vec6& v)
{
    return u.tail<3>().dot(v.head<3>()) - u.head<3>().dot(v.tail<3>());
}

Vec6 project_to_contact(const RegularizedSurface& s, const SpherePhasePoint& w, const Vec6& v)
{
    Vec6 x = sphere_vector_field(s, w.vec());
    auto lambda = [&](const Vec6& u) { return w.eta.dot(u.head<3>()); };
    double lx = lambda(x);
    if (std::abs(lx) < 1e-14) throw NumericalError("lambda(X_Q) vanishes: surface not starshaped here");
    return v - (lambda(v) / lx) * x;
}

Vec2 frame_coordinates(const ContactFrame& f, const Vec6& w) { return Vec2(omega6(w, f.e2), omega6(f.e1, w)); }

TransitionSeries linearized_flow(const RegularizedSurface& s, const Trajectory& variational,
                                 const std::vector<ContactFrame>& frames)
{
    if (variational.size() != frames.size()) throw std::invalid_argument("one frame per sample is required");
    if (variational.x.front().size() != 42) throw std::invalid_argument("variational sphere trajectory expected");
    TransitionSeries out;
    const ContactFrame& f0 = frames.front();
    for (std::size_t i = 0; i < variational.size(); ++i) {
        const VecX& st = variational.x[i];
        SpherePhasePoint w(Vec6(st.head<6>()));
        Mat6 phi = sphere_stm(st);
        const ContactFrame& f = frames[i];
        double pair = omega6(f.e1, f.e2);
        if (std::abs(pair - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "frame degeneracy at t = " << variational.t[i] << " (pairing " << pair << ")";
            throw NumericalError(os.str());
        }
        Mat2 m;
        for (int j = 0; j < 2; ++j) {
            Vec6 v = phi * (j == 0 ? f0.e1 : f0.e2);
            m.col(j) = frame_coordinates(f, project_to_contact(s, w, v));
        }
        double det = m.determinant();
        if (!(det > 0)) {
            std::ostringstream os;
            os << "linearized flow lost orientation at t = " << variational.t[i];
            throw NumericalError(os.str());
        }
        out.max_correction = std::max(out.max_correction, std::abs(det - 1.0));
        m /= std::sqrt(det);
        out.t.push_back(variational.t[i]);
        out.psi.push_back(m);
    }
    return out;
}

}  // namespace tbp
