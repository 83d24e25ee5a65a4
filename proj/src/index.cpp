#include "tbp/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "tbp/errors.hpp"
#include "tbp/log.hpp"

namespace tbp {

using Eigen::MatrixXd;

namespace {

constexpr double kPi = std::numbers::pi;

int sgn(double x) { return (x > 0) - (x < 0); }

void merge_records(std::vector<Crossing>& recs)
{
    std::sort(recs.begin(), recs.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    std::vector<Crossing> out;
    for (const Crossing& c : recs) {
        if (!out.empty() && out.back().t == c.t) {
            out.back().twice += c.twice;
            out.back().regular = out.back().regular && c.regular;
            out.back().endpoint = out.back().endpoint || c.endpoint;
        } else {
            out.push_back(c);
        }
    }
    recs.clear();
    for (const Crossing& c : out)
        if (c.twice != 0 || !c.regular) recs.push_back(c);
}

}  // namespace

bool IndexValue::consistent() const
{
    int s = 0;
    for (const Crossing& c : crossings) s += c.twice;
    return s == twice;
}

std::string IndexValue::str() const
{
    std::ostringstream os;
    if (twice % 2 == 0)
        os << twice / 2;
    else
        os << twice << "/2";
    return os.str();
}

// ---------------------------------------------------------------- line paths

void LagrangianLinePath::validate() const
{
    if (t.size() != theta.size() || t.size() < 2) throw std::invalid_argument("line path needs at least two samples");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("line path times must increase");
        if (!(std::abs(theta[i] - theta[i - 1]) < kPi / 4)) {
            std::ostringstream os;
            os << "line path under-sampled near t = " << t[i] << " (angle step " << theta[i] - theta[i - 1] << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

LagrangianLinePath sample_line_path(const std::function<double(double)>& theta, double t0, double t1, int n,
                                    double theta_v)
{
    if (n < 1 || !(t1 > t0)) throw std::invalid_argument("sample_line_path: bad interval");
    std::vector<double> ts, th;
    for (int i = 0; i <= n; ++i) {
        double t = t0 + (t1 - t0) * i / n;
        ts.push_back(t);
        th.push_back(theta(t));
    }
    for (int pass = 0; pass < 40; ++pass) {
        std::vector<double> nt{ts[0]}, nth{th[0]};
        bool changed = false;
        for (std::size_t i = 1; i < ts.size(); ++i) {
            if (std::abs(th[i] - th[i - 1]) >= kPi / 8) {
                double tm = 0.5 * (ts[i - 1] + ts[i]);
                nt.push_back(tm);
                nth.push_back(theta(tm));
                changed = true;
            }
            nt.push_back(ts[i]);
            nth.push_back(th[i]);
        }
        ts.swap(nt);
        th.swap(nth);
        if (!changed) break;
    }
    LagrangianLinePath p;
    p.t = std::move(ts);
    p.theta = std::move(th);
    p.theta_v = theta_v;
    p.validate();
    return p;
}

namespace {

IndexValue line_index_shifted(const LagrangianLinePath& p, double shift, double deriv_tol, std::vector<double>& degenerate)
{
    const std::size_t n = p.t.size();
    const double tv = p.theta_v + shift;
    auto u = [&](std::size_t i) { return (p.theta[i] - tv) / kPi; };
    auto on = [&](std::size_t i) { return std::abs(std::sin(p.theta[i] - tv)) < 1e-9; };
    auto deriv = [&](std::size_t i) {
        if (i == 0) return (p.theta[1] - p.theta[0]) / (p.t[1] - p.t[0]);
        if (i == n - 1) return (p.theta[n - 1] - p.theta[n - 2]) / (p.t[n - 1] - p.t[n - 2]);
        return (p.theta[i + 1] - p.theta[i - 1]) / (p.t[i + 1] - p.t[i - 1]);
    };

    IndexValue out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!on(i)) continue;
        double d = deriv(i);
        bool end = (i == 0 || i == n - 1);
        if (std::abs(d) <= deriv_tol) {
            degenerate.push_back(p.t[i]);
            out.crossings.push_back({p.t[i], 0, end, false});
            continue;
        }
        out.crossings.push_back({p.t[i], end ? sgn(d) : 2 * sgn(d), end, true});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (on(i) || on(i + 1)) continue;
        double a = u(i), b = u(i + 1);
        double fa = std::floor(a), fb = std::floor(b);
        if (fa == fb) continue;
        int s = sgn(b - a);
        double k = s > 0 ? fb : fa;  // the integer crossed
        double r = (k - a) / (b - a);
        out.crossings.push_back({p.t[i] + r * (p.t[i + 1] - p.t[i]), 2 * s, false, true});
    }
    merge_records(out.crossings);
    for (const Crossing& c : out.crossings) out.twice += c.twice;
    return out;
}

}  // namespace

IndexValue rs_index_line(const LagrangianLinePath& path, double deriv_tol)
{
    path.validate();
    std::vector<double> degenerate;
    IndexValue base = line_index_shifted(path, 0.0, deriv_tol, degenerate);
    if (degenerate.empty()) return base;

    // Move V off the tangency both ways; a homotopy-invariant value is the average.
    const double eps = 1e-6;  // well above the 1e-9 crossing threshold
    std::vector<double> d_plus, d_minus;
    IndexValue up = line_index_shifted(path, eps, deriv_tol, d_plus);
    IndexValue dn = line_index_shifted(path, -eps, deriv_tol, d_minus);
    auto fail = [&] {
        std::ostringstream os;
        os << "degenerate crossing at t =";
        for (double t : degenerate) os << ' ' << t;
        throw NumericalError(os.str());
    };
    if (!d_plus.empty() || !d_minus.empty() || (up.twice + dn.twice) % 2 != 0) fail();
    IndexValue out;
    out.twice = (up.twice + dn.twice) / 2;
    int regular_sum = 0;
    for (const Crossing& c : base.crossings) {
        if (c.regular) {
            out.crossings.push_back(c);
            regular_sum += c.twice;
        }
    }
    bool first = true;
    for (const Crossing& c : base.crossings) {
        if (c.regular) continue;
        Crossing r = c;
        r.twice = first ? out.twice - regular_sum : 0;
        first = false;
        out.crossings.push_back(r);
    }
    std::sort(out.crossings.begin(), out.crossings.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    // interior tangencies must not depend on the side we pushed V to
    bool interior = std::any_of(base.crossings.begin(), base.crossings.end(),
                                [](const Crossing& c) { return !c.regular && !c.endpoint; });
    bool ends = std::any_of(base.crossings.begin(), base.crossings.end(),
                            [](const Crossing& c) { return !c.regular && c.endpoint; });
    if (interior && !ends && up.twice != dn.twice) fail();
    return out;
}

// ---------------------------------------------------------------- general paths

MatrixXd standard_omega(int n)
{
    MatrixXd J = MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = MatrixXd::Identity(n, n);
    J.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
    return J;
}

namespace {

MatrixXd orthonormal(const MatrixXd& Z)
{
    Eigen::HouseholderQR<MatrixXd> qr(Z);
    return qr.householderQ() * MatrixXd::Identity(Z.rows(), Z.cols());
}

std::vector<MatrixXd> symmetric_candidates(int n)
{
    std::vector<MatrixXd> out;
    out.push_back(MatrixXd::Zero(n, n));
    for (double s : {1.0, -1.0, 2.0, -2.0, 0.5, -0.5}) {
        out.push_back(s * MatrixXd::Identity(n, n));
        if (n == 2) {
            MatrixXd d(2, 2), o(2, 2);
            d << s, 0, 0, -s;
            o << 0, s, s, 0;
            out.push_back(d);
            out.push_back(o);
            MatrixXd e(2, 2);
            e << s, 0, 0, 0;
            out.push_back(e);
            e << 0, 0, 0, s;
            out.push_back(e);
        }
    }
    return out;
}

// Chart around V: Lagrangian complements W_S = span(K + Zv S), symplectically dual to Zv.
struct Chart {
    MatrixXd Zv, K, Omega;
    std::vector<MatrixXd> S;

    MatrixXd Zw(std::size_t k) const { return K + Zv * S[k]; }

    // Lambda = span(Zv P + Zw Q) with P = -Zw^T Omega Z, Q = Zv^T Omega Z.
    double quality(std::size_t k, const MatrixXd& Z) const
    {
        MatrixXd w = Zw(k);
        MatrixXd P = -w.transpose() * Omega * Z;
        Eigen::JacobiSVD<MatrixXd> svd(P);
        return svd.singularValues().minCoeff() / std::max(1.0, w.norm());
    }

    MatrixXd graph(std::size_t k, const MatrixXd& Z) const
    {
        MatrixXd P = -Zw(k).transpose() * Omega * Z;
        MatrixXd Q = Zv.transpose() * Omega * Z;
        MatrixXd B = Q * P.inverse();
        return 0.5 * (B + B.transpose());
    }
};

struct Sig {
    int sig = 0;
    int nullity = 0;
    MatrixXd kernel;
};

Sig signature(const MatrixXd& B)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Sig s;
    std::vector<int> null_cols;
    for (int i = 0; i < B.rows(); ++i) {
        double l = es.eigenvalues()(i);
        if (std::abs(l) <= 1e-9 * scale) {
            ++s.nullity;
            null_cols.push_back(i);
        } else {
            s.sig += sgn(l);
        }
    }
    s.kernel = MatrixXd(B.rows(), null_cols.size());
    for (std::size_t j = 0; j < null_cols.size(); ++j) s.kernel.col(j) = es.eigenvectors().col(null_cols[j]);
    return s;
}

// Cumulative twice-index at every sample (index over [t0, t_k]) plus crossing records.
std::vector<int> general_cumulative(const LagrangianFramePath& path, const MatrixXd& V, const MatrixXd& Omega,
                                    std::vector<Crossing>* recs)
{
    const std::size_t N = path.t.size();
    if (N < 2 || path.frames.size() != N) throw std::invalid_argument("frame path needs at least two samples");
    const int dim = static_cast<int>(Omega.rows());
    const int n = dim / 2;
    if (V.rows() != dim || V.cols() != n) throw std::invalid_argument("reference Lagrangian has the wrong shape");
    if ((V.transpose() * Omega * V).norm() > 1e-8 * std::max(1.0, V.squaredNorm()))
        throw std::invalid_argument("reference subspace is not Lagrangian");

    Chart ch;
    ch.Omega = Omega;
    ch.Zv = orthonormal(V);
    MatrixXd Y = Omega.transpose() * ch.Zv;
    MatrixXd K0 = Y * (ch.Zv.transpose() * Omega * Y).inverse();
    MatrixXd A = K0.transpose() * Omega * K0;
    ch.K = K0 + 0.5 * ch.Zv * A;
    ch.S = symmetric_candidates(n);

    std::vector<MatrixXd> Z(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (path.frames[i].rows() != dim || path.frames[i].cols() != n)
            throw std::invalid_argument("Lagrangian frame has the wrong shape");
        Z[i] = orthonormal(path.frames[i]);
    }

    const double good = 0.2;
    std::size_t cur = 0;
    {
        double best = -1;
        for (std::size_t k = 0; k < ch.S.size(); ++k) {
            double q = ch.quality(k, Z[0]);
            if (q > best) best = q, cur = k;
        }
    }

    std::vector<int> cum(N, 0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        if (std::min(ch.quality(cur, Z[i]), ch.quality(cur, Z[i + 1])) < good) {
            double best = -1;
            std::size_t pick = cur;
            for (std::size_t k = 0; k < ch.S.size(); ++k) {
                double q = std::min(ch.quality(k, Z[i]), ch.quality(k, Z[i + 1]));
                if (q > best) best = q, pick = k;
            }
            if (best < 1e-3) {
                std::ostringstream os;
                os << "no Lagrangian complement is transverse near t = " << path.t[i];
                throw NumericalError(os.str());
            }
            cur = pick;
        }
        MatrixXd Ba = ch.graph(cur, Z[i]), Bb = ch.graph(cur, Z[i + 1]);
        Sig sa = signature(Ba), sb = signature(Bb);
        int d = sb.sig - sa.sig;
        cum[i + 1] = cum[i] + d;
        if (recs && d != 0) {
            Crossing c;
            c.twice = d;
            if (sa.nullity > 0) {
                c.t = path.t[i];
                c.endpoint = (i == 0);
            } else if (sb.nullity > 0) {
                c.t = path.t[i + 1];
                c.endpoint = (i + 1 == N - 1);
            } else {
                c.t = 0.5 * (path.t[i] + path.t[i + 1]);
            }
            // crossing form restricted to the kernel: degenerate if it has a zero eigenvalue
            const Sig& sk = sa.nullity > 0 ? sa : sb;
            if (sk.nullity > 0) {
                MatrixXd dB = (Bb - Ba) / (path.t[i + 1] - path.t[i]);
                MatrixXd G = sk.kernel.transpose() * dB * sk.kernel;
                Sig sg = signature(G);
                c.regular = sg.nullity == 0;
            }
            recs->push_back(c);
        }
    }
    return cum;
}

}  // namespace

IndexValue rs_index_general(const LagrangianFramePath& path, const MatrixXd& V, const MatrixXd& Omega)
{
    IndexValue out;
    std::vector<int> cum = general_cumulative(path, V, Omega, &out.crossings);
    merge_records(out.crossings);
    out.twice = cum.back();
    return out;
}

// ---------------------------------------------------------------- Conley-Zehnder

double SymplecticPath::symplectic_defect() const
{
    double d = 0;
    for (const MatrixXd& m : psi) {
        MatrixXd J = standard_omega(static_cast<int>(m.rows()) / 2);
        d = std::max(d, (m.transpose() * J * m - J).cwiseAbs().maxCoeff());
    }
    return d;
}

double cz_degeneracy(const SymplecticPath& psi)
{
    const MatrixXd& m = psi.psi.back();
    return std::abs((MatrixXd::Identity(m.rows(), m.cols()) - m).determinant());
}

namespace {

void graph_problem(const SymplecticPath& p, LagrangianFramePath& g, MatrixXd& V, MatrixXd& Om)
{
    if (p.psi.empty() || p.psi.size() != p.t.size()) throw std::invalid_argument("empty symplectic path");
    const int d = static_cast<int>(p.psi.front().rows());
    if (d % 2 != 0 || p.psi.front().cols() != d) throw std::invalid_argument("symplectic path must be 2n x 2n");
    MatrixXd I = MatrixXd::Identity(d, d);
    if ((p.psi.front() - I).cwiseAbs().maxCoeff() > 1e-8) throw std::invalid_argument("symplectic path must start at Id");
    if (p.symplectic_defect() > 1e-8) throw std::invalid_argument("path is not symplectic within 1e-8");
    MatrixXd J = standard_omega(d / 2);
    Om = MatrixXd::Zero(2 * d, 2 * d);
    Om.topLeftCorner(d, d) = -J;
    Om.bottomRightCorner(d, d) = J;
    V = MatrixXd(2 * d, d);
    V << I, I;
    g.t = p.t;
    g.frames.clear();
    for (const MatrixXd& m : p.psi) {
        MatrixXd z(2 * d, d);
        z << I, m;
        g.frames.push_back(z);
    }
}

}  // namespace

IndexValue cz_index(const SymplecticPath& psi, double degeneracy_tol)
{
    double deg = cz_degeneracy(psi);
    if (deg < degeneracy_tol) {
        std::ostringstream os;
        os << "degenerate endpoint: |det(Id - Psi(T))| = " << deg;
        throw NumericalError(os.str());
    }
    LagrangianFramePath g;
    MatrixXd V, Om;
    graph_problem(psi, g, V, Om);
    return rs_index_general(g, V, Om);
}

// ---------------------------------------------------------------- contact frames

ContactFrame contact_frame(const RegularizedSurface& s, const SpherePhasePoint& w)
{
    Vec6 g = q_gradient(s, w);
    Vec3 v = w.xi.cross(Vec3(g.tail<3>()));
    double nv = v.norm();
    if (nv < 1e-10 * std::max(1.0, g.norm())) throw NumericalError("vertical part of ker(lambda) is not a line here");
    ContactFrame f;
    f.e2 << Vec3::Zero(), v / nv;

    // ker(lambda) on T Sigma inside T(T*S^2): xi.a = 0, xi.b + eta.a = 0, eta.a = 0, dQ = 0
    Eigen::Matrix<double, 4, 6> C;
    C.row(0) << w.xi.transpose(), Vec3::Zero().transpose();
    C.row(1) << w.eta.transpose(), w.xi.transpose();
    C.row(2) << w.eta.transpose(), Vec3::Zero().transpose();
    C.row(3) = g.transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> svd(C, Eigen::ComputeFullV);
    if (svd.singularValues()(3) < 1e-10 * std::max(1.0, svd.singularValues()(0)))
        throw NumericalError("contact plane is not 2-dimensional here");
    Vec6 best = Vec6::Zero();
    for (int j = 4; j < 6; ++j) {
        Vec6 u = svd.matrixV().col(j);
        u -= u.dot(f.e2) * f.e2;
        if (u.norm() > best.norm()) best = u;
    }
    double pair = omega6(best, f.e2);
    if (std::abs(pair) < 1e-12) throw NumericalError("contact frame vectors nearly parallel");
    f.e1 = best / pair;
    return f;
}

std::vector<ContactFrame> contact_trivialization(const RegularizedSurface& s, const Trajectory& traj)
{
    std::vector<ContactFrame> out;
    out.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        SpherePhasePoint w(Vec6(traj.x[i].head<6>()));
        ContactFrame f;
        try {
            f = contact_frame(s, w);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << e.what() << " (t = " << traj.t[i] << ")";
            throw NumericalError(os.str());
        }
        if (!out.empty() && f.e2.dot(out.back().e2) < 0) {
            f.e2 = -f.e2;
            f.e1 = -f.e1;
        }
        out.push_back(f);
    }
    return out;
}

// ---------------------------------------------------------------- orbit paths

namespace {

double line_angle(const Mat2& m) { return std::atan2(m(1, 0), m(0, 0)); }

}  // namespace

TransitionSeries orbit_transition(const SymmetricOrbit& orbit, const IntegratorConfig& cfg)
{
    RegularizedSurface s = orbit.surface();
    IntegratorConfig c = cfg;
    c.max_step = cfg.max_step / std::min(1.0, s.mass());
    IntegrationResult run = integrate_sphere(s, orbit.start(), orbit.T, c, FlowMode::Variational);
    const Trajectory& tr = run.traj;

    Trajectory fine;
    fine.chart = tr.chart;
    auto add = [&](double t, const VecX& x) {
        fine.t.push_back(t);
        fine.x.push_back(x);
        fine.drift.push_back(0);
    };
    add(tr.t[0], tr.x[0]);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        // subdivide steps where the contact map turns too fast for crossing detection
        Mat6 a = sphere_stm(tr.x[i - 1]), b = sphere_stm(tr.x[i]);
        double turn = (b * a.inverse() - Mat6::Identity()).norm();
        int k = std::clamp(static_cast<int>(std::ceil(turn / 0.05)), 1, 64);
        for (int j = 1; j < k; ++j) {
            double t = tr.t[i - 1] + (tr.t[i] - tr.t[i - 1]) * j / k;
            add(t, tr.at(t));
        }
        add(tr.t[i], tr.x[i]);
    }
    TransitionSeries out = linearized_flow(s, fine, contact_trivialization(s, fine));
    log_debug("orbit transition: " + std::to_string(out.t.size()) + " samples, det correction " +
              std::to_string(out.max_correction));
    return out;
}

LagrangianLinePath line_path_of(const TransitionSeries& psi)
{
    LagrangianLinePath p;
    p.theta_v = 0;
    double prev = 0;
    for (std::size_t i = 0; i < psi.t.size(); ++i) {
        double a = line_angle(psi.psi[i]);
        if (i == 0) {
            prev = a;
        } else {
            double d = std::remainder(a - prev, 2 * kPi);
            prev += d;
        }
        p.t.push_back(psi.t[i]);
        p.theta.push_back(prev);
    }
    return p;
}

TransitionSeries partner_transition(const TransitionSeries& half)
{
    const std::size_t N = half.t.size();
    const double T = half.t.back();
    Mat2 R = Mat2::Identity();
    R(1, 1) = -1;
    Mat2 inv_end = half.psi.back().inverse();
    TransitionSeries out;
    out.max_correction = half.max_correction;
    for (std::size_t j = 0; j < N; ++j) {
        std::size_t i = N - 1 - j;
        out.t.push_back(T - half.t[i]);
        out.psi.push_back(R * half.psi[i] * inv_end * R);
    }
    out.t.front() = 0;
    return out;
}

namespace {

TransitionSeries build_iterate(const TransitionSeries& half, int m, std::vector<std::size_t>* junctions)
{
    if (m < 1) throw std::invalid_argument("iterate count must be positive");
    TransitionSeries part = partner_transition(half);
    const double T = half.t.back();
    TransitionSeries out;
    out.max_correction = half.max_correction;
    Mat2 acc = Mat2::Identity();
    out.t.push_back(0);
    out.psi.push_back(acc);
    if (junctions) junctions->assign(1, 0);
    for (int j = 0; j < m; ++j) {
        const TransitionSeries& seg = (j % 2 == 0) ? half : part;
        for (std::size_t i = 1; i < seg.t.size(); ++i) {
            out.t.push_back(j * T + seg.t[i]);
            out.psi.push_back(seg.psi[i] * acc);
        }
        acc = out.psi.back();
        if (junctions) junctions->push_back(out.t.size() - 1);
    }
    return out;
}

}  // namespace

TransitionSeries iterate_transition(const TransitionSeries& half, int m) { return build_iterate(half, m, nullptr); }

IndexValue rs_index_of(const TransitionSeries& psi) { return rs_index_line(line_path_of(psi)); }

namespace {

SymplecticPath as_symplectic(const TransitionSeries& psi, std::size_t upto)
{
    SymplecticPath p;
    for (std::size_t i = 0; i <= upto; ++i) {
        p.t.push_back(psi.t[i]);
        p.psi.push_back(MatrixXd(psi.psi[i]));
    }
    return p;
}

}  // namespace

IndexValue cz_index_of(const TransitionSeries& psi) { return cz_index(as_symplectic(psi, psi.t.size() - 1)); }

IndexValue orbit_rs_index(const SymmetricOrbit& orbit, const IntegratorConfig& cfg)
{
    IndexValue v = rs_index_of(orbit_transition(orbit, cfg));
    for (const Crossing& c : v.crossings)
        if (c.endpoint && !c.regular && c.t > 0) log_warn("degenerate crossing at T: the chord is degenerate");
    return v;
}

namespace {

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double n = static_cast<double>(x.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

MeanIndexReport mean_indices(const TransitionSeries& half, int m_max)
{
    if (m_max < 8) throw std::invalid_argument("mean_indices needs m_max >= 8");
    std::vector<std::size_t> junc;
    TransitionSeries full = build_iterate(half, 2 * m_max, &junc);

    MeanIndexReport rep;
    LagrangianLinePath line = line_path_of(full);
    for (int m = 1; m <= m_max; ++m) {
        LagrangianLinePath pre;
        pre.theta_v = line.theta_v;
        pre.t.assign(line.t.begin(), line.t.begin() + junc[m] + 1);
        pre.theta.assign(line.theta.begin(), line.theta.begin() + junc[m] + 1);
        rep.rs.push_back(rs_index_line(pre).value());
    }

    // CZ of every prefix at once: chart contributions are additive along the path
    LagrangianFramePath g;
    MatrixXd V, Om;
    graph_problem(as_symplectic(full, full.t.size() - 1), g, V, Om);
    std::vector<int> cum = general_cumulative(g, V, Om, nullptr);
    for (int m = 1; m <= m_max; ++m) {
        const Mat2& end = full.psi[junc[2 * m]];
        double deg = std::abs((Mat2::Identity() - end).determinant());
        if (deg < 1e-9) {
            rep.cz.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.skipped.push_back(m);
            log_info("mean_indices: x^" + std::to_string(2 * m) + " is degenerate, skipped");
            continue;
        }
        rep.cz.push_back(0.5 * cum[junc[2 * m]]);
    }

    std::vector<double> xs, yr, xc, yc;
    for (int m = (m_max + 1) / 2; m <= m_max; ++m) {
        xs.push_back(m);
        yr.push_back(rep.rs[m - 1]);
        if (!std::isnan(rep.cz[m - 1])) {
            xc.push_back(m);
            yc.push_back(rep.cz[m - 1]);
        }
    }
    rep.mean_rs = lsq_slope(xs, yr);
    rep.mean_rs_last = rep.rs.back() / m_max;
    rep.mean_cz_double = lsq_slope(xc, yc);
    for (int m = m_max; m >= 1; --m)
        if (!std::isnan(rep.cz[m - 1])) {
            rep.mean_cz_double_last = rep.cz[m - 1] / m;
            break;
        }
    rep.defect = std::abs(rep.mean_rs - 0.5 * rep.mean_cz_double);
    return rep;
}

IndexValue rfh_index(const IndexValue& rs)
{
    IndexValue out = rs;
    out.twice = rs.twice + 1;  // + d - (n - 1)/2 = + 1/2
    return out;
}

}  // namespace tbp
