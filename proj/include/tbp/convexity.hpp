#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tbp/index.hpp"
#include "tbp/orbits.hpp"

namespace tbp {

// Coordinates on R^4 are (x1, x2, y1, y2); alpha = 1/2 (x.dy - y.dx), d(alpha) = dx ^ dy.
struct Jet4 {
    double value = 0;
    Vec4 grad = Vec4::Zero();
    Mat4 hess = Mat4::Zero();
};

// Hypersurface S = G^{-1}(0) in R^4, starshaped about the origin.
struct CoverSurface {
    std::string name;
    std::function<Jet4(const Vec4&)> jet;
    double scale = 1.0;  // typical |z| on S; sets the ray-marching step
    std::shared_ptr<const RegularizedSurface> base;  // target of Pi, when S covers some Sigma

    double G(const Vec4& z) const { return jet(z).value; }
    // First zero of G along the ray t * dir, t > 0.
    Vec4 point_on_ray(const Vec4& dir) const;
    Vec4 project_to_surface(const Vec4& z) const;

    Vec4 reeb(const Vec4& z) const;
    Mat4 reeb_jacobian(const Vec4& z) const;

    // Covering map onto Sigma (requires base).
    SpherePhasePoint project(const Vec4& z) const;
    Eigen::Matrix<double, 6, 4> project_jacobian(const Vec4& z) const;
    std::array<Vec4, 2> preimages(const SpherePhasePoint& w) const;
};

double alpha_form(const Vec4& z, const Vec4& v);
Vec4 n_tilde(const Vec4& z);  // (x1, x2, y1, y2) -> (-x1, x2, y1, -y2)

CoverSurface round_sphere(double radius = 1.0);
CoverSurface ellipsoid_surface(double r1, double r2);  // |z1|^2 / r1 + |z2|^2 / r2 = 1
// Peanut |z|^4 - x1^2 - b |z|^2 - b^2 = 0: starshaped, not convex at the waist for small b.
CoverSurface dumbbell_surface(double b = 0.1);

struct CoverContractReport {
    std::array<bool, 4> clause{};  // i onto, ii equivariance, iii flows, iv starshaped
    double onto_error = 0;
    double equivariance_error = 0;
    double flow_deviation = 0;
    double min_radial_derivative = 0;
    double symmetry_error = 0;  // max |G(-z)| over samples of S
    std::size_t samples = 0;
    std::string detail;

    bool ok() const { return clause[0] && clause[1] && clause[2] && clause[3]; }
};
CoverContractReport check_cover_contract(const CoverSurface& s, std::size_t samples, std::uint64_t seed);

// Complex-squaring cover of the regularized surface; throws ContractError naming the failed clause.
CoverSurface levi_civita_cover(const RegularizedSurface& base, std::size_t samples = 200, std::uint64_t seed = 1);
CoverSurface levi_civita_cover(double mu, double c, Primary primary);

struct ConvexityReport {
    bool pass = false;
    std::size_t samples = 0;
    double min_eigenvalue = 0;  // smallest Hessian eigenvalue on T S over the samples
    double margin = 0;
    Vec4 location = Vec4::Zero();
    bool certified = false;  // the minimum is negative beyond any evaluation error at a point on S
    std::string message;
};
ConvexityReport strict_convexity_check(const CoverSurface& s, std::size_t samples, std::uint64_t seed = 1);

// Closed Reeb orbits and their Conley-Zehnder indices in the global frame of ker(alpha) on S.
struct ReebOrbit {
    Vec4 start = Vec4::Zero();
    double period = 0;
    std::string label;
};

struct ReebIndexRecord {
    std::string label;
    double period = 0;
    bool doubled = false;  // the supplied period only closed up to -Id
    double closing_error = 0;
    IndexValue cz;
};

struct DynamicalConvexityReport {
    std::vector<ReebIndexRecord> orbits;
    double min_cz = 0;
    bool pass = false;  // every supplied orbit has index >= 3
    std::string note;
};

TransitionSeries reeb_transition(const CoverSurface& s, const Vec4& z0, double T, const IntegratorConfig& cfg = {});
DynamicalConvexityReport dynamical_convexity_spot_check(const CoverSurface& s, const std::vector<ReebOrbit>& orbits,
                                                        const IntegratorConfig& cfg = {});

// Lift of x^2 through Pi: closes after the Q-time 2T (lift pair z, -z distinct) or only
// after 4T (one centrally symmetric lift).
struct OrbitLift {
    ReebOrbit orbit;
    bool centrally_symmetric = false;
    double closing_error = 0;
};
OrbitLift lift_orbit(const CoverSurface& s, const SymmetricOrbit& orbit, const IntegratorConfig& cfg = {});

// Reeb trajectory pushed to Sigma vs the X_Q flow (time matched along the way).
double cover_flow_deviation(const CoverSurface& s, const Vec4& z0, double q_time, const IntegratorConfig& cfg = {});

// Ellipsoid E(r1, r2) with r1 <= r2: Reeb flow z(t) = (a1 e^{2it/r1}, a2 e^{2it/r2}).
struct EllipsoidCensus {
    bool rational = false;  // r1/r2 = p/q with q within the denominator bound
    long p = 0, q = 0;
    double common_period = 0;
    std::vector<double> closed_orbit_periods;  // the two circles (irrational case)
    std::string summary;
};

struct EllipsoidOracle {
    double r1 = 1, r2 = 1;

    double T1() const;
    double T2() const;
    Vec4 flow(double a1, double a2, double t) const;
    EllipsoidCensus census(long max_denominator = 1000000) const;
    // Linearized flow along the short orbit, as a rotation angle in the global frame.
    double short_orbit_rotation() const;
    double long_orbit_rotation() const;
};
EllipsoidOracle ellipsoid_oracle(double r1, double r2);

std::optional<std::pair<long, long>> rational_approximation(double x, long max_denominator);

struct BrakeImages {
    Vec4 psi, psi_inverse, n_tilde, n;
};
Vec4 brake_psi(const Vec4& z);          // (x1, -y2, y1, x2)
Vec4 brake_psi_inverse(const Vec4& z);
Vec4 brake_n(const Vec4& z);            // Psi o N~ o Psi^{-1}
BrakeImages brake_maps(const Vec4& z);
Mat4 brake_n_matrix();

}  // namespace tbp
