#pragma once

#include <string>
#include <vector>

#include "tbp/orbits.hpp"

namespace tbp {

// One crossing record; `twice` is twice its contribution (endpoints count half).
struct Crossing {
    double t = 0;
    int twice = 0;
    bool endpoint = false;
    bool regular = true;
};

// Half-integer index stored as its double.
struct IndexValue {
    int twice = 0;
    std::vector<Crossing> crossings;

    double value() const { return 0.5 * twice; }
    bool consistent() const;  // records add up to the value
    std::string str() const;
};

// Line path span(cos theta, sin theta) in (R^2, dx ^ dy) with a continuous lift.
struct LagrangianLinePath {
    std::vector<double> t;
    std::vector<double> theta;
    double theta_v = 0;

    void validate() const;  // samples increase, |d theta| < pi/4 per step
};

// Samples theta on [t0, t1], bisecting until consecutive samples differ by < pi/8.
LagrangianLinePath sample_line_path(const std::function<double(double)>& theta, double t0, double t1, int n,
                                    double theta_v = 0);

IndexValue rs_index_line(const LagrangianLinePath& path, double deriv_tol = 1e-9);

// General Lagrangian path, frames Z(t) (2n x n) against V (2n x n) in (R^{2n}, u^T Omega v).
struct LagrangianFramePath {
    std::vector<double> t;
    std::vector<Eigen::MatrixXd> frames;
};
IndexValue rs_index_general(const LagrangianFramePath& path, const Eigen::MatrixXd& V, const Eigen::MatrixXd& Omega);

// Standard form on R^{2n} in (x, y) coordinates: u^T J v = sum dx ^ dy.
Eigen::MatrixXd standard_omega(int n);

struct SymplecticPath {
    std::vector<double> t;
    std::vector<Eigen::MatrixXd> psi;

    double symplectic_defect() const;  // max |Psi^T J Psi - J|
};

// Graph of Psi against the diagonal in (R^{2n} x R^{2n}, -omega + omega).
IndexValue cz_index(const SymplecticPath& psi, double degeneracy_tol = 1e-9);
double cz_degeneracy(const SymplecticPath& psi);  // |det(I - Psi(T))|

// Frame (e1, e2) of ker(lambda) on T Sigma along samples: e2 spans the vertical
// part, e1 is Euclidean-orthogonal to it and d(lambda)(e1, e2) = 1.
ContactFrame contact_frame(const RegularizedSurface& s, const SpherePhasePoint& w);
std::vector<ContactFrame> contact_trivialization(const RegularizedSurface& s, const Trajectory& traj);

// Psi_x on [0, T] for a symmetric orbit, sampled finely enough for line indices.
TransitionSeries orbit_transition(const SymmetricOrbit& orbit, const IntegratorConfig& cfg = {});

// Line path Psi(t) V with V the e1 axis.
LagrangianLinePath line_path_of(const TransitionSeries& psi);

// Psi for x^m (segments alternate x and x_R), built from one half period.
TransitionSeries iterate_transition(const TransitionSeries& half, int m);
// Psi for x_R alone: R Psi(T - t) Psi(T)^{-1} R.
TransitionSeries partner_transition(const TransitionSeries& half);

IndexValue orbit_rs_index(const SymmetricOrbit& orbit, const IntegratorConfig& cfg = {});
IndexValue rs_index_of(const TransitionSeries& psi);
IndexValue cz_index_of(const TransitionSeries& psi);

struct MeanIndexReport {
    double mean_rs = 0;            // least-squares slope over m in [m_max/2, m_max]
    double mean_rs_last = 0;       // mu_RS(x^m_max) / m_max
    double mean_cz_double = 0;     // slope of mu_CZ(x^{2m}) over the same m
    double mean_cz_double_last = 0;
    double defect = 0;             // |mean_rs - mean_cz_double / 2|
    std::vector<double> rs;        // mu_RS(x^m), m = 1..m_max
    std::vector<double> cz;        // mu_CZ(x^{2m}), NaN where degenerate
    std::vector<int> skipped;
};
MeanIndexReport mean_indices(const TransitionSeries& half, int m_max);

// mu_RFH = mu_RS + d - (n - 1)/2 with d = 1, n = 2.
IndexValue rfh_index(const IndexValue& rs);

}  // namespace tbp
