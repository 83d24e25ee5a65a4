#include "tbp/dynamics.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "tbp/errors.hpp"

namespace tbp {

namespace {

constexpr double kCollisionRadius = 0.0;  // exact coincidence only; flow code applies its own guard

struct Body {
    Vec2 pos;
    double mass;
    const char* name;
};

// Massive bodies of the problem (the massless moon of rotating Kepler is dropped).
std::vector<Body> bodies(const Problem& pb)
{
    switch (pb.kind()) {
    case ProblemKind::HillLunar:
        return {{Vec2(0, 0), 1.0, "origin"}};
    case ProblemKind::RotatingKepler:
        return {{pb.earth(), 1.0, "earth"}};
    case ProblemKind::PCRTBP:
        break;
    }
    return {{pb.earth(), 1.0 - pb.mu(), "earth"}, {pb.moon(), pb.mu(), "moon"}};
}

void check_collision(const Problem& pb, const Vec2& q)
{
    for (const auto& b : bodies(pb)) {
        if ((q - b.pos).norm() <= kCollisionRadius) {
            std::ostringstream os;
            os << "evaluation at the position of the " << b.name << " (" << b.pos.x() << ", " << b.pos.y() << ")";
            throw CollisionError(b.name, os.str());
        }
    }
}

}  // namespace

std::string to_string(ProblemKind kind)
{
    switch (kind) {
    case ProblemKind::PCRTBP: return "pcrtbp";
    case ProblemKind::HillLunar: return "hill";
    case ProblemKind::RotatingKepler: return "kepler";
    }
    return "?";
}

ProblemKind problem_kind_from_string(const std::string& name)
{
    if (name == "pcrtbp") return ProblemKind::PCRTBP;
    if (name == "hill") return ProblemKind::HillLunar;
    if (name == "kepler") return ProblemKind::RotatingKepler;
    throw std::invalid_argument("unknown problem kind '" + name + "'");
}

std::string to_string(Primary p) { return p == Primary::Earth ? "earth" : "moon"; }

MassRatio::MassRatio(double mu, bool allow_zero) : mu_(mu)
{
    if (!std::isfinite(mu) || mu >= 1.0 || mu < 0.0 || (mu == 0.0 && !allow_zero))
        throw std::invalid_argument("mass ratio must lie in (0,1) (0 only for rotating Kepler)");
}

Problem Problem::pcrtbp(double mu) { return Problem(ProblemKind::PCRTBP, MassRatio(mu).value()); }
Problem Problem::rotating_kepler() { return Problem(ProblemKind::RotatingKepler, 0.0); }
Problem Problem::hill_lunar() { return Problem(ProblemKind::HillLunar, 0.0); }

Vec2 Problem::earth() const
{
    if (kind_ == ProblemKind::HillLunar) return {0, 0};
    return {mu_, 0};
}

Vec2 Problem::moon() const
{
    if (kind_ == ProblemKind::HillLunar) return {0, 0};
    return {-(1.0 - mu_), 0};
}

double Problem::mass(Primary p) const
{
    if (kind_ == ProblemKind::HillLunar) return 1.0;
    return p == Primary::Earth ? 1.0 - mu_ : mu_;
}

double effective_potential(const Problem& pb, const Vec2& q)
{
    check_collision(pb, q);
    double u = 0;
    for (const auto& b : bodies(pb)) u -= b.mass / (q - b.pos).norm();
    if (pb.kind() == ProblemKind::HillLunar)
        u -= 1.5 * q.x() * q.x();
    else
        u -= 0.5 * q.squaredNorm();
    return u;
}

Vec2 effective_potential_gradient(const Problem& pb, const Vec2& q)
{
    check_collision(pb, q);
    Vec2 g = Vec2::Zero();
    for (const auto& b : bodies(pb)) {
        Vec2 d = q - b.pos;
        double r = d.norm();
        g += b.mass * d / (r * r * r);
    }
    if (pb.kind() == ProblemKind::HillLunar)
        g.x() -= 3.0 * q.x();
    else
        g -= q;
    return g;
}

std::pair<double, std::string> nearest_body(const Problem& pb, const Vec2& q)
{
    double best = std::numeric_limits<double>::infinity();
    std::string name;
    for (const auto& b : bodies(pb)) {
        double r = (q - b.pos).norm();
        if (r < best) {
            best = r;
            name = b.name;
        }
    }
    return {best, name};
}

double hamiltonian(const Problem& pb, const PlanePhasePoint& z)
{
    check_collision(pb, z.q());
    double h = 0.5 * (z.p1 * z.p1 + z.p2 * z.p2) + z.q2 * z.p1 - z.q1 * z.p2;
    for (const auto& b : bodies(pb)) h -= b.mass / (z.q() - b.pos).norm();
    if (pb.kind() == ProblemKind::HillLunar) h += -z.q1 * z.q1 + 0.5 * z.q2 * z.q2;
    return h;
}

// gradient of the potential part V(q) (everything but the kinetic and rotating terms)
static Vec2 potential_gradient(const Problem& pb, const Vec2& q)
{
    Vec2 g = Vec2::Zero();
    for (const auto& b : bodies(pb)) {
        Vec2 d = q - b.pos;
        double r = d.norm();
        g += b.mass * d / (r * r * r);
    }
    if (pb.kind() == ProblemKind::HillLunar) g += Vec2(-2.0 * q.x(), q.y());
    return g;
}

Vec4 hamiltonian_vector_field(const Problem& pb, const PlanePhasePoint& z)
{
    check_collision(pb, z.q());
    Vec2 gv = potential_gradient(pb, z.q());
    return {z.p1 + z.q2, z.p2 - z.q1, z.p2 - gv.x(), -z.p1 - gv.y()};
}

Mat4 vector_field_jacobian(const Problem& pb, const PlanePhasePoint& z)
{
    check_collision(pb, z.q());
    Eigen::Matrix2d hv = Eigen::Matrix2d::Zero();
    for (const auto& b : bodies(pb)) {
        Vec2 d = z.q() - b.pos;
        double r = d.norm();
        double r3 = r * r * r;
        hv += b.mass * (Eigen::Matrix2d::Identity() / r3 - 3.0 * d * d.transpose() / (r3 * r * r));
    }
    if (pb.kind() == ProblemKind::HillLunar) {
        hv(0, 0) -= 2.0;
        hv(1, 1) += 1.0;
    }
    Mat4 a = Mat4::Zero();
    // d(q1dot) = dp1 + dq2, d(q2dot) = dp2 - dq1
    a(0, 2) = 1;
    a(0, 1) = 1;
    a(1, 3) = 1;
    a(1, 0) = -1;
    // d(p1dot) = dp2 - Vqq row 0, d(p2dot) = -dp1 - Vqq row 1
    a(2, 3) = 1;
    a(3, 2) = -1;
    a.block<2, 2>(2, 0) = -hv;
    return a;
}

PlanePhasePoint involution(const Problem& pb, Involution which, const PlanePhasePoint& z)
{
    if (which == Involution::R) return {z.q1, -z.q2, -z.p1, z.p2};
    if (pb.kind() != ProblemKind::HillLunar)
        throw UnsupportedInvolution("R' is a symmetry of Hill's lunar problem only, not of " + to_string(pb.kind()));
    return {-z.q1, z.q2, z.p1, -z.p2};
}

// --- Lagrange points -------------------------------------------------------

namespace {

// dU/dq1 restricted to the q1-axis
double collinear_residual(double mu, double x)
{
    double de = x - mu;
    double dm = x - mu + 1.0;
    return -x + (1.0 - mu) * de / std::abs(de * de * de) + mu * dm / std::abs(dm * dm * dm);
}

double collinear_slope(double mu, double x)
{
    double de = std::abs(x - mu);
    double dm = std::abs(x - mu + 1.0);
    return -1.0 - 2.0 * (1.0 - mu) / (de * de * de) - 2.0 * mu / (dm * dm * dm);
}

double solve_collinear(double mu, double lo, double hi)
{
    double flo = collinear_residual(mu, lo), fhi = collinear_residual(mu, hi);
    if (!(flo * fhi < 0)) {
        std::ostringstream os;
        os.precision(17);
        os << "collinear Lagrange point not bracketed in [" << lo << ", " << hi << "]: f = " << flo << ", " << fhi;
        throw NumericalError(os.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = collinear_residual(mu, mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        double step = collinear_residual(mu, x) / collinear_slope(mu, x);
        if (!std::isfinite(step) || std::abs(step) > hi - lo + 1e-14) break;
        x -= step;
    }
    return x;
}

}  // namespace

LagrangePointSet lagrange_points(double mu)
{
    MassRatio check(mu);
    Problem pb = Problem::pcrtbp(mu);
    const double xe = mu, xm = mu - 1.0;
    const double eps = 1e-9;
    double inner = solve_collinear(mu, xm + eps, xe - eps);
    double left = solve_collinear(mu, xm - 2.0, xm - eps);
    double right = solve_collinear(mu, xe + eps, xe + 2.0);

    auto energy = [&](const Vec2& q) { return effective_potential(pb, q); };

    LagrangePointSet set;
    Vec2 l1(inner, 0), a(left, 0), b(right, 0);
    double ea = energy(a), eb = energy(b);
    if (eb < ea) {
        std::swap(a, b);
        std::swap(ea, eb);
    }
    Vec2 l4(mu - 0.5, std::sqrt(3.0) / 2.0), l5(mu - 0.5, -std::sqrt(3.0) / 2.0);
    set.points[0] = {"L1", l1, energy(l1)};
    set.points[1] = {"L2", a, ea};
    set.points[2] = {"L3", b, eb};
    set.points[3] = {"L4", l4, energy(l4)};
    set.points[4] = {"L5", l5, energy(l5)};
    return set;
}

bool LagrangePointSet::ordering_holds(double tol) const
{
    const auto& p = points;
    return p[0].energy < p[1].energy && p[1].energy <= p[2].energy + tol && p[2].energy < p[3].energy &&
           std::abs(p[3].energy - p[4].energy) <= tol;
}

double hill_critical_energy()
{
    // U = -1/|q| - 1.5 q1^2 is critical at q1 = 3^(-1/3)
    return -0.5 * std::cbrt(81.0);
}

// --- Hill's region -----------------------------------------------------------

std::string to_string(ComponentKind k)
{
    switch (k) {
    case ComponentKind::Earth: return "earth";
    case ComponentKind::Moon: return "moon";
    case ComponentKind::Primary: return "primary";
    case ComponentKind::Unbounded: return "unbounded";
    case ComponentKind::OtherBounded: return "other";
    }
    return "?";
}

Vec2 HillRegionGrid::center(int i, int j) const
{
    double dx = (spec.xmax - spec.xmin) / spec.nx;
    double dy = (spec.ymax - spec.ymin) / spec.ny;
    return {spec.xmin + (i + 0.5) * dx, spec.ymin + (j + 0.5) * dy};
}

int HillRegionGrid::bounded_count() const
{
    int n = 0;
    for (const auto& c : components)
        if (c.kind != ComponentKind::Unbounded) ++n;
    return n;
}

std::optional<HillComponent> HillRegionGrid::component_of(ComponentKind k) const
{
    for (const auto& c : components)
        if (c.kind == k) return c;
    return std::nullopt;
}

int HillRegionGrid::component_at(const Vec2& q) const
{
    double dx = (spec.xmax - spec.xmin) / spec.nx;
    double dy = (spec.ymax - spec.ymin) / spec.ny;
    int i = static_cast<int>(std::floor((q.x() - spec.xmin) / dx));
    int j = static_cast<int>(std::floor((q.y() - spec.ymin) / dy));
    if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) return -1;
    return component[index(i, j)];
}

HillRegionGrid hill_region(const Problem& pb, double c, const GridSpec& spec)
{
    if (spec.nx < 2 || spec.ny < 2 || !(spec.xmax > spec.xmin) || !(spec.ymax > spec.ymin))
        throw std::invalid_argument("degenerate Hill region grid");
    HillRegionGrid g;
    g.spec = spec;
    g.c = c;
    g.kind = to_string(pb.kind());
    g.mu = pb.mu();
    const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
    g.potential.assign(n, 0.0);
    g.inside.assign(n, 0);
    g.singular.assign(n, 0);
    g.component.assign(n, -1);

    const double dx = (spec.xmax - spec.xmin) / spec.nx;
    const double dy = (spec.ymax - spec.ymin) / spec.ny;
    auto cell_of = [&](const Vec2& q) -> std::optional<std::pair<int, int>> {
        int i = static_cast<int>(std::floor((q.x() - spec.xmin) / dx));
        int j = static_cast<int>(std::floor((q.y() - spec.ymin) / dy));
        if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) return std::nullopt;
        return std::make_pair(i, j);
    };

    struct Seed {
        ComponentKind kind;
        std::optional<std::pair<int, int>> cell;
    };
    std::vector<Seed> seeds;
    if (pb.kind() == ProblemKind::HillLunar) {
        seeds.push_back({ComponentKind::Primary, cell_of(Vec2(0, 0))});
    } else {
        seeds.push_back({ComponentKind::Earth, cell_of(pb.earth())});
        if (pb.kind() == ProblemKind::PCRTBP) seeds.push_back({ComponentKind::Moon, cell_of(pb.moon())});
    }
    for (const auto& s : seeds)
        if (s.cell) g.singular[g.index(s.cell->first, s.cell->second)] = 1;

    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            std::size_t k = g.index(i, j);
            if (g.singular[k]) {
                g.potential[k] = -std::numeric_limits<double>::infinity();
                g.inside[k] = 1;
                continue;
            }
            double u = effective_potential(pb, g.center(i, j));
            g.potential[k] = u;
            g.inside[k] = u <= c ? 1 : 0;
        }
    }

    // 4-connected flood fill
    int next = 0;
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            std::size_t k0 = g.index(i, j);
            if (!g.inside[k0] || g.component[k0] >= 0) continue;
            HillComponent comp;
            comp.label = next;
            bool touches_edge = false;
            std::queue<std::pair<int, int>> todo;
            todo.emplace(i, j);
            g.component[k0] = next;
            while (!todo.empty()) {
                auto [a, b] = todo.front();
                todo.pop();
                ++comp.cells;
                if (a == 0 || b == 0 || a == spec.nx - 1 || b == spec.ny - 1) touches_edge = true;
                const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (const auto& d : nb) {
                    int x = a + d[0], y = b + d[1];
                    if (x < 0 || y < 0 || x >= spec.nx || y >= spec.ny) continue;
                    std::size_t kk = g.index(x, y);
                    if (g.inside[kk] && g.component[kk] < 0) {
                        g.component[kk] = next;
                        todo.emplace(x, y);
                    }
                }
            }
            comp.kind = touches_edge ? ComponentKind::Unbounded : ComponentKind::OtherBounded;
            g.components.push_back(comp);
            ++next;
        }
    }
    for (const auto& s : seeds) {
        if (!s.cell) continue;
        int lab = g.component[g.index(s.cell->first, s.cell->second)];
        auto& comp = g.components[static_cast<std::size_t>(lab)];
        if (comp.kind == ComponentKind::OtherBounded) comp.kind = s.kind;
    }
    return g;
}

ComponentCountReport check_two_bounded_components(const HillRegionGrid& grid)
{
    ComponentCountReport r;
    r.bounded = grid.bounded_count();
    r.two_bounded = r.bounded == 2 && grid.component_of(ComponentKind::Earth) && grid.component_of(ComponentKind::Moon);
    std::ostringstream os;
    os << "c = " << grid.c << ": " << r.bounded << " bounded component(s)";
    if (!r.two_bounded) os << " (expected earth + moon)";
    r.message = os.str();
    return r;
}

}  // namespace tbp
