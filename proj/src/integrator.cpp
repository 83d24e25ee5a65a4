#include "tbp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tbp/errors.hpp"

namespace tbp {

std::string to_string(Chart c)
{
    switch (c) {
    case Chart::Plane:
        return "plane";
    case Chart::Sphere:
        return "sphere";
    case Chart::Cover:
        return "cover";
    }
    return "?";
}

void IntegratorConfig::validate() const
{
    if (!(atol > 0) || !(rtol > 0) || !(max_step > 0) || !(initial_step > 0) || !(event_tol > 0))
        throw std::invalid_argument("integrator tolerances and step sizes must be positive");
}

double Trajectory::max_drift() const
{
    double m = 0;
    for (double d : drift) m = std::max(m, d);
    return m;
}

void Trajectory::push(double tt, const VecX& xx, double dr)
{
    t.push_back(tt);
    x.push_back(xx);
    drift.push_back(dr);
}

std::size_t Trajectory::interval(double tq) const
{
    const bool fwd = t.back() >= t.front();
    auto it = fwd ? std::upper_bound(t.begin(), t.end(), tq)
                  : std::upper_bound(t.begin(), t.end(), tq, std::greater<double>());
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i == 0) return 0;
    return std::min(i - 1, t.size() - 2);
}

VecX Trajectory::at(double tq) const
{
    if (t.empty()) throw std::logic_error("empty trajectory");
    if (t.size() == 1) return x.front();
    std::size_t i = interval(tq);
    double h = t[i + 1] - t[i];
    double s = (tq - t[i]) / h;
    if (has_dense()) {
        const auto& r = dense_[i];
        double s1 = 1.0 - s;
        return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
    }
    return (1.0 - s) * x[i] + s * x[i + 1];
}

std::vector<VecX> Trajectory::resample(std::size_t n) const
{
    std::vector<VecX> out;
    if (n < 2) n = 2;
    for (std::size_t k = 0; k < n; ++k) out.push_back(at(t.front() + (t.back() - t.front()) * double(k) / double(n - 1)));
    return out;
}

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Stepper {
    const OdeSystem& sys;
    VecX k1, k2, k3, k4, k5, k6, k7, y1, tmp;

    explicit Stepper(const OdeSystem& s) : sys(s)
    {
        for (VecX* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &y1, &tmp}) v->resize(s.dim);
    }

    // One trial step from y (with k1 = f(y) already set). Returns the scaled error.
    double step(const VecX& y, double h, double atol, double rtol)
    {
        tmp = y + h * a21 * k1;
        sys.rhs(tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        sys.rhs(tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        sys.rhs(tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        sys.rhs(tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        sys.rhs(tmp, k6);
        y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        sys.rhs(y1, k7);
        const int n = sys.error_dim > 0 ? sys.error_dim : sys.dim;
        double err = 0;
        for (int i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (e / sc) * (e / sc);
        }
        return std::sqrt(err / n);
    }

    std::array<VecX, 5> dense(const VecX& y, double h) const
    {
        VecX ydiff = y1 - y;
        VecX bspl = h * k1 - ydiff;
        return {y, ydiff, bspl, ydiff - h * k7 - bspl,
                h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
    }
};

VecX eval_dense(const std::array<VecX, 5>& r, double s)
{
    double s1 = 1.0 - s;
    return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
}

}  // namespace

IntegrationResult integrate(const OdeSystem& sys, const VecX& x0, double t_end, const IntegratorConfig& cfg,
                            const EventSpec* event, Chart chart)
{
    cfg.validate();
    if (x0.size() != sys.dim) throw std::invalid_argument("initial state has the wrong dimension");
    IntegrationResult res;
    res.traj.chart = chart;
    const double dir = t_end >= 0 ? 1.0 : -1.0;
    const double e0 = sys.energy ? sys.energy(x0) : 0.0;
    auto drift_of = [&](const VecX& y) { return sys.energy ? std::abs(sys.energy(y) - e0) : 0.0; };

    if (sys.guard) sys.guard(x0);
    res.traj.push(0.0, x0, 0.0);
    if (t_end == 0) return res;

    Stepper st(sys);
    VecX y = x0;
    double t = 0;
    double h = dir * std::min(cfg.initial_step, std::abs(t_end));
    sys.rhs(y, st.k1);
    double g_prev = event ? event->g(y) : 0.0;
    int crossings = 0;
    const double tiny = 1e-14 * std::max(1.0, std::abs(t_end));

    while (dir * (t_end - t) > tiny) {
        if (res.steps + res.rejected >= cfg.max_steps) throw NumericalError("integrator step budget exhausted");
        if (dir * (t + h - t_end) > 0) h = t_end - t;
        if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
        double err = st.step(y, h, cfg.atol, cfg.rtol);
        if (!std::isfinite(err)) err = 1e10;
        if (err > 1.0) {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os << "step size underflow at t = " << t;
                if (chart == Chart::Plane) os << " (near a collision: switch to the regularized chart)";
                throw NumericalError(os.str());
            }
            continue;
        }
        ++res.steps;
        const double t_new = t + h;
        auto coeffs = st.dense(y, h);
        VecX y_new = st.y1;

        if (sys.constraint) {
            double defect = sys.constraint(y_new);
            if (defect > 10.0 * cfg.constraint_tol) {
                std::ostringstream os;
                os << "constraint drift " << defect << " at t = " << t_new;
                throw NumericalError(os.str());
            }
        }

        // event detection on the accepted step
        if (event) {
            double g_new = event->g(y_new);
            bool in_window = std::abs(t_new) > event->t_min;
            bool sign_change = (g_prev < 0 && g_new >= 0) || (g_prev > 0 && g_new <= 0);
            int d = g_new > g_prev ? +1 : -1;
            if (in_window && sign_change && (event->direction == 0 || event->direction == d)) {
                double lo = 0, hi = 1;
                double glo = g_prev;
                // start of the window if the step straddles t_min
                if (std::abs(t) < event->t_min) {
                    lo = (dir * event->t_min - t) / h;
                    glo = event->g(eval_dense(coeffs, lo));
                }
                bool real = (glo < 0 && g_new >= 0) || (glo > 0 && g_new <= 0);
                if (real) {
                    while ((hi - lo) * std::abs(h) > cfg.event_tol) {
                        double mid = 0.5 * (lo + hi);
                        double gm = event->g(eval_dense(coeffs, mid));
                        if ((gm < 0) == (glo < 0) && gm != 0) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    const double s_ev = 0.5 * (lo + hi);
                    // exact step to the event time from the step start
                    VecX ysave = st.y1;
                    VecX k1save = st.k1;
                    st.step(y, s_ev * h, cfg.atol, cfg.rtol);
                    VecX y_ev = st.y1;
                    auto coeffs_ev = st.dense(y, s_ev * h);
                    st.y1 = ysave;
                    st.k1 = k1save;
                    if (cfg.project && sys.project) sys.project(y_ev);
                    ++crossings;
                    res.hits.push_back({t + s_ev * h, y_ev});
                    if (event->stop_at > 0 && crossings >= event->stop_at) {
                        res.traj.push_dense(coeffs_ev);
                        res.traj.push(t + s_ev * h, y_ev, drift_of(y_ev));
                        res.terminated_by_event = true;
                        return res;
                    }
                }
            }
            g_prev = g_new;
        }

        if (cfg.project && sys.project) sys.project(y_new);
        if (sys.guard) sys.guard(y_new);
        res.traj.push_dense(coeffs);
        res.traj.push(t_new, y_new, drift_of(y_new));
        t = t_new;
        y = y_new;
        sys.rhs(y, st.k1);
        if (event) g_prev = event->g(y);
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    return res;
}

}  // namespace tbp
