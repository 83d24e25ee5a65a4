#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tbp/flow.hpp"

namespace tbp {

enum class OrbitType { I, II };
std::string to_string(OrbitType t);

struct SolverConfig {
    IntegratorConfig integ;
    int scan = 720;                    // samples per circle
    std::vector<int> crossings{1, 2, 3};
    double t_max = 0;                  // Q-time horizon; 0 picks one from the surface
    double root_tol = 1e-10;           // in theta
    double residual_tol = 1e-8;
    double dedup_tol = 1e-6;
    double nondegeneracy_tol = 1e-8;

    void validate() const;
};

// Parameterized curve on [t0, t1] for trace comparisons.
struct Curve {
    std::function<VecX(double)> eval;
    double t0 = 0, t1 = 0;
};

// Hausdorff distance between the traces; each sample is refined against the
// other curve by a local 1-D minimization.
double hausdorff(const Curve& a, const Curve& b, int samples = 600);
// sup over a of the distance to the trace of b
double directed_distance(const Curve& a, const Curve& b, int samples = 600, int a_samples = 0);

struct SymmetricOrbit {
    ProblemKind kind = ProblemKind::PCRTBP;
    double mu = 0;
    double c = 0;
    Primary primary = Primary::Moon;
    int start_sign = +1;
    int end_sign = +1;
    double theta0 = 0;
    double T = 0;       // half period in the regularized time
    double T_phys = 0;  // half period in physical time (NaN through a collision)
    int crossing = 1;
    double residual = 0;
    double nondegeneracy = 0;
    OrbitType type = OrbitType::II;
    bool near_pole = false;         // passes within 1e-6 of the north pole
    bool plane_check_done = false;
    bool plane_agrees = true;
    Trajectory chord;               // sphere chart, x(t) on [0, T]
    std::function<VecX(double)> analytic;  // overrides chord interpolation when set

    SpherePhasePoint at(double t) const;  // t in [0, T]
    SpherePhasePoint start() const { return at(0); }
    SpherePhasePoint end() const { return at(T); }
    RegularizedSurface surface() const;
};

struct ShootingResult {
    bool returned = false;
    double residual = 0;
    double T = 0;
    double T_phys = 0;
    int end_sign = 0;
    SpherePhasePoint end;
    double closest_defect = 0;  // timeout diagnostics
};

double default_horizon(const RegularizedSurface& s);

ShootingResult shooting_residual(const RegularizedSurface& s, int sign, double theta0, const SolverConfig& cfg,
                                 int n = 1);

struct ScanDiagnostics {
    std::size_t samples = 0;
    std::size_t no_return = 0;
    std::size_t brackets = 0;
    std::size_t rejected_jumps = 0;
    std::size_t duplicates = 0;
    std::string message;
};

std::vector<SymmetricOrbit> find_symmetric_orbits(const RegularizedSurface& s, const SolverConfig& cfg,
                                                  ScanDiagnostics* diag = nullptr);

// Refines a root bracket [a, b] of the n-th crossing residual into an orbit.
std::optional<SymmetricOrbit> refine_orbit(const RegularizedSurface& s, int sign, double a, double b, int n,
                                           const SolverConfig& cfg);

struct Classification {
    OrbitType type = OrbitType::II;
    OrbitType circle_type = OrbitType::II;
    std::optional<OrbitType> plane_type;  // absent near the north pole
    bool flagged = false;
};
Classification classify_detail(const SymmetricOrbit& orbit);
OrbitType classify(const SymmetricOrbit& orbit);

// x^m on [0, mT]: segments alternate x, x_R, x, ... with x_R(t) = R x(T - t).
// The curve refers to the orbit, which must outlive it.
Curve iterate_curve(const SymmetricOrbit& orbit, int m);
// Sample sequence of x^m built from the chord samples (no re-integration).
std::vector<std::pair<double, Vec6>> iterate_samples(const SymmetricOrbit& orbit, int m);

Curve plane_trace(const SymmetricOrbit& orbit, int m = 2);

// Rotating Kepler ellipses closing after k ellipse periods and l frame periods.
enum class Orientation { Direct, Retrograde };
std::string to_string(Orientation o);

struct KeplerOrbitSpec {
    int k = 1;
    int l = 1;
    Orientation orientation = Orientation::Direct;
    double c = -2.0;
    bool circular = false;  // circle at energy c; k and l are ignored
};

struct KeplerOracleResult {
    bool feasible = false;
    double c_min = 0, c_max = 0;  // energies admitting the (k, l) ellipse
    std::string message;
    double semi_major = 0, eccentricity = 0, half_period = 0;
    OrbitType parity_type = OrbitType::II;  // parity rule: II when k + l is odd
    std::optional<SymmetricOrbit> orbit;
    std::function<PlanePhasePoint(double)> plane;  // physical time
};
KeplerOracleResult kepler_oracle(const KeplerOrbitSpec& spec);

bool doubly_symmetric_detect(const SymmetricOrbit& orbit, double tol = 1e-8);
// Generic trace test for a closed curve and a linear involution.
bool invariant_under(const Curve& closed, const std::function<VecX(const VecX&)>& map, double tol);

}  // namespace tbp
