#include "tbp/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "tbp/errors.hpp"

namespace tbp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-6;

Problem problem_of(ProblemKind kind, double mu)
{
    switch (kind) {
    case ProblemKind::HillLunar: return Problem::hill_lunar();
    case ProblemKind::RotatingKepler: return Problem::rotating_kepler();
    case ProblemKind::PCRTBP: break;
    }
    return Problem::pcrtbp(mu);
}

int sign_of(double v) { return v >= 0 ? +1 : -1; }
}  // namespace

std::string to_string(OrbitType t) { return t == OrbitType::I ? "I" : "II"; }
std::string to_string(Orientation o) { return o == Orientation::Direct ? "direct" : "retrograde"; }

void SolverConfig::validate() const
{
    integ.validate();
    if (scan < 4) throw std::invalid_argument("scan resolution must be at least 4");
    if (crossings.empty()) throw std::invalid_argument("at least one crossing count is required");
    for (int n : crossings)
        if (n < 1) throw std::invalid_argument("crossing counts must be positive");
    if (t_max < 0 || !(root_tol > 0) || !(residual_tol > 0) || !(dedup_tol > 0))
        throw std::invalid_argument("solver tolerances must be positive");
}

// --- curves ------------------------------------------------------------------

namespace {

double refine_near(const VecX& p, const Curve& b, double tc, double h)
{
    // sub-sample the two neighbouring intervals, then golden section around the best
    double lo = std::max(b.t0, tc - h);
    double hi = std::min(b.t1, tc + h);
    constexpr int kSub = 16;
    const double sub = (hi - lo) / kSub;
    int kbest = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kSub; ++k) {
        double d = (b.eval(lo + k * sub) - p).squaredNorm();
        if (d < bd) {
            bd = d;
            kbest = k;
        }
    }
    const double mid = lo + kbest * sub;
    lo = std::max(lo, mid - sub);
    hi = std::min(hi, mid + sub);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = (b.eval(x1) - p).squaredNorm(), f2 = (b.eval(x2) - p).squaredNorm();
    for (int it = 0; it < 60 && hi - lo > 1e-14 * (1 + std::abs(hi)); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = (b.eval(x1) - p).squaredNorm();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = (b.eval(x2) - p).squaredNorm();
        }
    }
    return std::min({bd, f1, f2});
}

// Refines around the few nearest samples: closed curves repeat their junction
// point, and the nearest sample can sit on the wrong side of it.
double point_curve_distance(const VecX& p, const Curve& b, const std::vector<VecX>& bs, double h)
{
    constexpr std::size_t kCandidates = 4;
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < bs.size(); ++j) {
        double d = (bs[j] - p).squaredNorm();
        if (near.size() < kCandidates || d < near.back().first) {
            near.emplace_back(d, j);
            std::sort(near.begin(), near.end());
            if (near.size() > kCandidates) near.pop_back();
        }
    }
    double best = near.front().first;
    for (const auto& [d, j] : near) best = std::min(best, refine_near(p, b, b.t0 + double(j) * h, h));
    return std::sqrt(best);
}

std::vector<VecX> sample_curve(const Curve& c, int n)
{
    std::vector<VecX> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) out.push_back(c.eval(c.t0 + (c.t1 - c.t0) * i / n));
    return out;
}

double directed(const std::vector<VecX>& as, const Curve& b, const std::vector<VecX>& bs, int n)
{
    double h = (b.t1 - b.t0) / n;
    if (bs.empty()) return 0;
    double m = 0;
    for (const auto& p : as) m = std::max(m, point_curve_distance(p, b, bs, h));
    return m;
}

}  // namespace

double directed_distance(const Curve& a, const Curve& b, int samples, int a_samples)
{
    auto as = sample_curve(a, a_samples > 0 ? a_samples : samples);
    auto bs = sample_curve(b, samples);
    return directed(as, b, bs, samples);
}

double hausdorff(const Curve& a, const Curve& b, int samples)
{
    auto as = sample_curve(a, samples);
    auto bs = sample_curve(b, samples);
    return std::max(directed(as, b, bs, samples), directed(bs, a, as, samples));
}

bool invariant_under(const Curve& closed, const std::function<VecX(const VecX&)>& map, double tol)
{
    Curve image{[&](double t) { return map(closed.eval(t)); }, closed.t0, closed.t1};
    return hausdorff(closed, image, 800) <= tol;
}

// --- orbits --------------------------------------------------------------------

SpherePhasePoint SymmetricOrbit::at(double t) const
{
    if (analytic) return SpherePhasePoint(Vec6(analytic(t).head<6>()));
    return SpherePhasePoint(Vec6(chord.at(t).head<6>()));
}

RegularizedSurface SymmetricOrbit::surface() const
{
    return RegularizedSurface(problem_of(kind, mu), primary, c, false);
}

double default_horizon(const RegularizedSurface& s)
{
    // Q-time speeds scale like the primary's mass
    return 60.0 / std::min(1.0, s.mass());
}

namespace {

// Q-time runs slower by the factor 1/m; keep the step cap proportional.
IntegratorConfig scaled(const IntegratorConfig& c, const RegularizedSurface& s)
{
    IntegratorConfig out = c;
    out.max_step = c.max_step / std::min(1.0, s.mass());
    return out;
}

struct MultiShot {
    std::vector<ShootingResult> by_crossing;  // index n - 1
};

MultiShot shoot(const RegularizedSurface& s, int sign, double theta0, const SolverConfig& cfg, int nmax)
{
    SpherePhasePoint w0 = fixed_locus_point(s, sign, theta0);
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = 1e-9;
    ev.stop_at = nmax;
    double tmax = cfg.t_max > 0 ? cfg.t_max : default_horizon(s);
    MultiShot out;
    IntegrationResult r;
    try {
        r = integrate_sphere(s, w0, tmax, scaled(cfg.integ, s), FlowMode::Clock, &ev);
    } catch (const NumericalError&) {
        return out;
    }
    for (const auto& hit : r.hits) {
        ShootingResult sr;
        sr.returned = true;
        sr.T = hit.t;
        sr.T_phys = hit.x[6];
        sr.end = SpherePhasePoint(Vec6(hit.x.head<6>()));
        sr.residual = section_residual(sr.end);
        sr.end_sign = sign_of(sr.end.eta[1]);
        out.by_crossing.push_back(sr);
    }
    return out;
}

}  // namespace

ShootingResult shooting_residual(const RegularizedSurface& s, int sign, double theta0, const SolverConfig& cfg, int n)
{
    MultiShot m = shoot(s, sign, theta0, cfg, n);
    if (static_cast<int>(m.by_crossing.size()) >= n) return m.by_crossing[static_cast<std::size_t>(n - 1)];
    ShootingResult r;
    r.closest_defect = std::numeric_limits<double>::infinity();
    for (const auto& h : m.by_crossing) r.closest_defect = std::min(r.closest_defect, std::abs(h.residual));
    return r;
}

std::optional<SymmetricOrbit> refine_orbit(const RegularizedSurface& s, int sign, double a, double b, int n,
                                           const SolverConfig& cfg)
{
    auto res = [&](double th) { return shooting_residual(s, sign, th, cfg, n); };
    ShootingResult ra = res(a), rb = res(b);
    if (!ra.returned || !rb.returned) return std::nullopt;
    double fa = ra.residual, fb = rb.residual;
    if (fa == 0) b = a, fb = 0;
    if ((fa < 0) == (fb < 0) && fa != 0 && fb != 0) return std::nullopt;
    // Illinois variant of regula falsi
    int side = 0;
    for (int it = 0; it < 200 && std::abs(b - a) > cfg.root_tol && fb != 0; ++it) {
        double cth = b - fb * (b - a) / (fb - fa);
        if (!(cth > std::min(a, b) && cth < std::max(a, b))) cth = 0.5 * (a + b);
        ShootingResult rc = res(cth);
        if (!rc.returned) return std::nullopt;
        double fc = rc.residual;
        if ((fc < 0) == (fb < 0)) {
            b = cth;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = b;
            fa = fb;
            b = cth;
            fb = fc;
            side = +1;
        }
        if (fc == 0) break;
    }
    const double th = b;

    SpherePhasePoint w0 = fixed_locus_point(s, sign, th);
    EventSpec ev;
    ev.g = [](const VecX& x) { return x[1]; };
    ev.t_min = 1e-9;
    ev.stop_at = n;
    double tmax = cfg.t_max > 0 ? cfg.t_max : default_horizon(s);
    IntegrationResult run = integrate_sphere(s, w0, tmax, scaled(cfg.integ, s), FlowMode::Clock, &ev);
    if (!run.terminated_by_event) return std::nullopt;

    SymmetricOrbit o;
    o.kind = s.problem().kind();
    o.mu = s.problem().mu();
    o.c = s.energy();
    o.primary = s.primary();
    o.start_sign = sign;
    o.theta0 = th;
    o.crossing = n;
    o.chord = std::move(run.traj);
    o.T = o.chord.t_end();
    o.T_phys = o.chord.x.back()[6];
    SpherePhasePoint end(Vec6(o.chord.x.back().head<6>()));
    o.end_sign = sign_of(end.eta[1]);
    o.residual = std::max(std::abs(section_residual(end)), fixed_locus_defects(end).norm());
    if (o.residual > cfg.residual_tol) return std::nullopt;  // a jump, not a root

    const double h = 1e-6;
    ShootingResult rp = res(th + h), rm = res(th - h);
    if (rp.returned && rm.returned) {
        double d = (rp.residual - rm.residual) / (2 * h);
        o.nondegeneracy = std::abs(d) > cfg.nondegeneracy_tol ? std::abs(d) : 0.0;
    }
    for (const auto& x : o.chord.x) {
        if ((x.head<3>() - Vec3(1, 0, 0)).norm() < kPoleTol) o.near_pole = true;
    }
    Classification cl = classify_detail(o);
    o.type = cl.type;
    o.plane_check_done = cl.plane_type.has_value();
    o.plane_agrees = !cl.plane_type || *cl.plane_type == cl.circle_type;
    return o;
}

std::vector<SymmetricOrbit> find_symmetric_orbits(const RegularizedSurface& s, const SolverConfig& cfg,
                                                  ScanDiagnostics* diag)
{
    cfg.validate();
    ScanDiagnostics local;
    ScanDiagnostics& dg = diag ? *diag : local;
    const int nmax = *std::max_element(cfg.crossings.begin(), cfg.crossings.end());
    std::vector<SymmetricOrbit> candidates;

    for (int sign : {+1, -1}) {
        std::vector<MultiShot> shots;
        std::vector<double> thetas;
        for (int i = 0; i < cfg.scan; ++i) {
            double th = 2 * kPi * i / cfg.scan;
            thetas.push_back(th);
            shots.push_back(shoot(s, sign, th, cfg, nmax));
            ++dg.samples;
            if (static_cast<int>(shots.back().by_crossing.size()) < nmax) ++dg.no_return;
        }
        for (int n : cfg.crossings) {
            auto idx = static_cast<std::size_t>(n - 1);
            for (int i = 0; i < cfg.scan; ++i) {
                int j = (i + 1) % cfg.scan;
                const auto& A = shots[static_cast<std::size_t>(i)].by_crossing;
                const auto& B = shots[static_cast<std::size_t>(j)].by_crossing;
                if (A.size() <= idx || B.size() <= idx) continue;
                double fa = A[idx].residual, fb = B[idx].residual;
                if (fa != 0 && (fa < 0) == (fb < 0)) continue;
                ++dg.brackets;
                double a = thetas[static_cast<std::size_t>(i)];
                double b = j == 0 ? 2 * kPi : thetas[static_cast<std::size_t>(j)];
                auto orb = refine_orbit(s, sign, a, b, n, cfg);
                if (orb)
                    candidates.push_back(std::move(*orb));
                else
                    ++dg.rejected_jumps;
            }
        }
    }

    // deduplicate by the trace of the doubled orbit, smallest half period first
    std::sort(candidates.begin(), candidates.end(), [](const SymmetricOrbit& x, const SymmetricOrbit& y) {
        if (x.T != y.T) return x.T < y.T;
        if (x.start_sign != y.start_sign) return x.start_sign > y.start_sign;
        return x.theta0 < y.theta0;
    });
    std::vector<SymmetricOrbit> out;
    for (auto& cand : candidates) {
        Curve cc = iterate_curve(cand, 2);
        bool dup = false;
        for (const auto& kept : out) {
            // cheap filter first: a few points of the candidate on the kept trace
            Curve kc = iterate_curve(kept, 2);
            if (directed_distance(cc, kc, 300, 6) <= 10 * cfg.dedup_tol && hausdorff(cc, kc, 1200) <= cfg.dedup_tol) {
                dup = true;
                break;
            }
        }
        if (dup)
            ++dg.duplicates;
        else
            out.push_back(std::move(cand));
    }
    // deterministic order by (start circle, theta0)
    std::sort(out.begin(), out.end(), [](const SymmetricOrbit& x, const SymmetricOrbit& y) {
        if (x.start_sign != y.start_sign) return x.start_sign > y.start_sign;
        return x.theta0 < y.theta0;
    });
    if (out.empty()) {
        std::ostringstream os;
        os << "no symmetric orbit found: " << dg.samples << " samples, " << dg.no_return << " without return, "
           << dg.brackets << " brackets, " << dg.rejected_jumps << " rejected";
        dg.message = os.str();
    }
    return out;
}

Classification classify_detail(const SymmetricOrbit& orbit)
{
    Classification c;
    c.circle_type = orbit.start_sign != orbit.end_sign ? OrbitType::I : OrbitType::II;
    c.type = c.circle_type;
    SpherePhasePoint a = orbit.start(), b = orbit.end();
    bool pole = orbit.near_pole || (a.xi - Vec3(1, 0, 0)).norm() < kPoleTol || (b.xi - Vec3(1, 0, 0)).norm() < kPoleTol;
    if (pole) {
        c.flagged = true;
        return c;
    }
    RegularizedSurface s = orbit.surface();
    double qp = s.primary_position().x();
    double prod = (moser_map(s, a).q1 - qp) * (moser_map(s, b).q1 - qp);
    c.plane_type = prod < 0 ? OrbitType::I : OrbitType::II;
    return c;
}

OrbitType classify(const SymmetricOrbit& orbit) { return classify_detail(orbit).type; }

Curve iterate_curve(const SymmetricOrbit& orbit, int m)
{
    if (m < 1) throw std::invalid_argument("iterate count must be positive");
    const SymmetricOrbit* o = &orbit;
    Curve c;
    c.t0 = 0;
    c.t1 = m * orbit.T;
    c.eval = [o, m](double t) -> VecX {
        double T = o->T;
        int j = std::clamp(static_cast<int>(std::floor(t / T)), 0, m - 1);
        double s = std::clamp(t - j * T, 0.0, T);
        SpherePhasePoint p = (j % 2 == 0) ? o->at(s) : regularized_involution(o->at(T - s));
        return p.vec();
    };
    return c;
}

std::vector<std::pair<double, Vec6>> iterate_samples(const SymmetricOrbit& orbit, int m)
{
    std::vector<std::pair<double, Vec6>> out;
    const auto& tt = orbit.chord.t;
    const auto& xx = orbit.chord.x;
    const std::size_t n = tt.size();
    for (int j = 0; j < m; ++j) {
        double base = j * orbit.T;
        for (std::size_t i = 0; i < n; ++i) {
            if (j > 0 && i == 0) continue;  // shared junction point
            if (j % 2 == 0) {
                out.emplace_back(base + tt[i], Vec6(xx[i].head<6>()));
            } else {
                std::size_t k = n - 1 - i;
                out.emplace_back(base + orbit.T - tt[k],
                                 regularized_involution(SpherePhasePoint(Vec6(xx[k].head<6>()))).vec());
            }
        }
    }
    return out;
}

Curve plane_trace(const SymmetricOrbit& orbit, int m)
{
    Curve sph = iterate_curve(orbit, m);
    auto surf = std::make_shared<RegularizedSurface>(orbit.surface());
    return {[sph, surf](double t) -> VecX {
                return moser_map(*surf, SpherePhasePoint(Vec6(sph.eval(t)))).vec();
            },
            sph.t0, sph.t1};
}

// --- rotating Kepler oracle ---------------------------------------------------------

KeplerOracleResult kepler_oracle(const KeplerOrbitSpec& spec)
{
    KeplerOracleResult res;
    const double sgn = spec.orientation == Orientation::Direct ? 1.0 : -1.0;
    double a = 0, e = 0, n = 0, half_t = 0, half_tau = 0;

    if (spec.circular) {
        // c = -1/(2r) - sgn sqrt(r); the direct branch has its maximum -3/2 at r = 1
        auto g = [&](double r) { return -0.5 / r - sgn * std::sqrt(r) - spec.c; };
        double lo = 1e-9, hi = sgn > 0 ? 1.0 : 1e6;
        res.c_min = -std::numeric_limits<double>::infinity();
        res.c_max = sgn > 0 ? -1.5 : std::numeric_limits<double>::infinity();
        if (sgn > 0 && spec.c > -1.5) {
            res.message = "no direct circular orbit above c = -3/2";
            return res;
        }
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (g(mid) < 0 ? lo : hi) = mid;
        }
        a = 0.5 * (lo + hi);
        n = std::pow(a, -1.5);
        half_t = kPi / std::abs(sgn * n - 1.0);
        half_tau = half_t / a;
    } else {
        if (spec.k < 1 || spec.l < 1) throw std::invalid_argument("k and l must be positive");
        n = double(spec.k) / spec.l;  // k ellipse periods = l frame periods
        a = std::pow(n, -2.0 / 3.0);
        double energy = -0.5 / a;
        res.c_min = energy - std::sqrt(a);
        res.c_max = energy + std::sqrt(a);
        double L = energy - spec.c;  // H = E - L
        if (std::abs(L) > std::sqrt(a) || std::abs(L) < 1e-12 || (L > 0) != (sgn > 0)) {
            std::ostringstream os;
            os.precision(12);
            os << "no " << to_string(spec.orientation) << " (" << spec.k << "," << spec.l
               << ") ellipse at c = " << spec.c << "; feasible energies ["
               << (sgn > 0 ? res.c_min : energy) << ", " << (sgn > 0 ? energy : res.c_max) << "]";
            res.message = os.str();
            return res;
        }
        e = std::sqrt(std::max(0.0, 1.0 - L * L / a));
        half_t = spec.l * kPi;
        half_tau = spec.k * kPi / (n * a);
    }
    res.feasible = true;
    res.semi_major = a;
    res.eccentricity = e;
    res.half_period = half_t;
    res.parity_type = (spec.k + spec.l) % 2 == 1 ? OrbitType::II : OrbitType::I;

    const double b = a * std::sqrt(1 - e * e);
    // eccentric anomaly E = n a tau  (dtau = dt / |q|)
    auto state = [=](double E) {
        double cE = std::cos(E), sE = std::sin(E);
        double t = (E - e * sE) / n;
        double Edot = n / (1 - e * cE);
        Vec2 x(a * (cE - e), sgn * b * sE);
        Vec2 v(-a * sE * Edot, sgn * b * cE * Edot);
        double ct = std::cos(t), st = std::sin(t);
        Vec2 q(ct * x.x() + st * x.y(), -st * x.x() + ct * x.y());
        Vec2 p(ct * v.x() + st * v.y(), -st * v.x() + ct * v.y());
        return std::make_pair(t, PlanePhasePoint(q.x(), q.y(), p.x(), p.y()));
    };
    res.plane = [=](double t) {
        // invert Kepler's equation by Newton
        double M = n * t, E = M;
        for (int i = 0; i < 50; ++i) {
            double d = (E - e * std::sin(E) - M) / (1 - e * std::cos(E));
            E -= d;
            if (std::abs(d) < 1e-16) break;
        }
        return state(E).second;
    };

    SymmetricOrbit o;
    o.kind = ProblemKind::RotatingKepler;
    o.mu = 0;
    o.c = spec.c;
    o.primary = Primary::Earth;
    o.T = half_tau;
    o.T_phys = half_t;
    auto surf = std::make_shared<RegularizedSurface>(Problem::rotating_kepler(), Primary::Earth, o.c, false);
    const double rate = n * a;
    o.analytic = [state, surf, rate](double tau) -> VecX {
        return inverse_moser_map(*surf, state(rate * tau).second).vec();
    };
    const int samples = 2000;
    for (int i = 0; i <= samples; ++i) {
        double tau = half_tau * i / samples;
        VecX x(7);
        x.head<6>() = o.analytic(tau);
        x[6] = state(rate * tau).first;
        o.chord.push(tau, x, 0.0);
    }
    o.chord.chart = Chart::Sphere;
    SpherePhasePoint s0 = o.at(0), s1 = o.at(o.T);
    o.start_sign = sign_of(s0.eta[1]);
    o.end_sign = sign_of(s1.eta[1]);
    o.theta0 = std::atan2(s0.xi[2], s0.xi[0]);
    o.residual = std::max(fixed_locus_defects(s0).norm(), fixed_locus_defects(s1).norm());
    Classification cl = classify_detail(o);
    o.type = cl.type;
    o.plane_check_done = cl.plane_type.has_value();
    o.plane_agrees = !cl.plane_type || *cl.plane_type == cl.circle_type;
    res.orbit = std::move(o);
    return res;
}

bool doubly_symmetric_detect(const SymmetricOrbit& orbit, double tol)
{
    if (orbit.kind != ProblemKind::HillLunar) throw UnsupportedInvolution("the second involution exists for Hill's problem only");
    Curve closed = iterate_curve(orbit, 2);
    return invariant_under(
        closed, [](const VecX& v) { return regularized_involution_prime(SpherePhasePoint(Vec6(v))).vec(); }, tol);
}

}  // namespace tbp
