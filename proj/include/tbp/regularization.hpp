#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tbp/dual.hpp"
#include "tbp/dynamics.hpp"

namespace tbp {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// (xi, eta) in T*S^2 embedded in R^6: |xi| = 1, xi.eta = 0.
struct SpherePhasePoint {
    Vec3 xi = Vec3(-1, 0, 0);
    Vec3 eta = Vec3::Zero();

    SpherePhasePoint() = default;
    SpherePhasePoint(const Vec3& x, const Vec3& e) : xi(x), eta(e) {}
    explicit SpherePhasePoint(const Vec6& v) : xi(v.head<3>()), eta(v.tail<3>()) {}

    Vec6 vec() const
    {
        Vec6 v;
        v << xi, eta;
        return v;
    }
    // max(| |xi|^2 - 1 |, |xi.eta|)
    double constraint_defect() const;
    SpherePhasePoint projected() const;
};

struct PlaneChartPoint {
    Vec2 x;
    Vec2 y;
};

// Stereographic projection from the north pole xi = (1,0,0), lifted to the cotangent bundle.
PlaneChartPoint stereographic(const SpherePhasePoint& w);
SpherePhasePoint inverse_stereographic(const PlaneChartPoint& xy);

// Regularized energy surface around one primary. For the rotating Kepler problem
// only the earth component exists; Hill's problem has a single body at the origin.
class RegularizedSurface {
public:
    RegularizedSurface(const Problem& pb, Primary primary, double c, bool check_energy = true);

    const Problem& problem() const { return pb_; }
    Primary primary() const { return primary_; }
    double energy() const { return c_; }
    double mass() const { return mass_; }
    double level() const { return 0.5 * mass_ * mass_; }
    const Vec2& primary_position() const { return qp_; }
    // Offset q^P - q^O to the other body (zero when absent) and its mass.
    const Vec2& other_offset() const { return d_; }
    double other_mass() const { return other_mass_; }

    // Critical energy below which the component is bounded and regularizable.
    double critical_energy() const;

    // Smooth factor F with Q = 0.5 |eta|^2 F^2 (equivalently F = (K~ + m)/|eta|).
    template <typename T>
    T factor(const std::array<T, 6>& w) const;

    template <typename T>
    T q_function(const std::array<T, 6>& w) const
    {
        T f = factor(w);
        T e2 = w[3] * w[3] + w[4] * w[4] + w[5] * w[5];
        return 0.5 * e2 * f * f;
    }

private:
    Problem pb_;
    Primary primary_;
    double c_;
    double mass_;
    Vec2 qp_;
    Vec2 d_;
    double other_mass_;
};

template <typename T>
T RegularizedSurface::factor(const std::array<T, 6>& w) const
{
    const T& x0 = w[0];
    const T& x1 = w[1];
    const T& x2 = w[2];
    T om = 1.0 - x0;
    // y = eta'(1 - xi0) + xi' eta0
    T y1 = w[4] * om + x1 * w[3];
    T y2 = w[5] * om + x2 * w[3];
    T extra = T(-0.5 - c_);
    if (other_mass_ > 0) {
        using std::sqrt;
        T a = y1 + d_.x();
        T b = y2 + d_.y();
        extra = extra - other_mass_ / sqrt(a * a + b * b);
    }
    if (pb_.kind() == ProblemKind::HillLunar) extra = extra - y1 * y1 + 0.5 * y2 * y2;
    // (1 - xi0) times the rotating term q2 p1 - q1 p2
    T rot = -x1 * y2 + x2 * (y1 + qp_.x());
    return 1.0 + om * extra + rot;
}

// (q, p) = (y + q^P, -x), the inverse of Moser's regularization.
PlanePhasePoint moser_map(const RegularizedSurface& s, const SpherePhasePoint& w);
SpherePhasePoint inverse_moser_map(const RegularizedSurface& s, const PlanePhasePoint& z);

// K = (H - c) |q - q^P|
double k_hamiltonian(const RegularizedSurface& s, const PlanePhasePoint& z);
double q_hamiltonian(const RegularizedSurface& s, const SpherePhasePoint& w);
Vec6 q_gradient(const RegularizedSurface& s, const SpherePhasePoint& w);

// Hamiltonian vector field of Q on T*S^2 (constrained form in R^6) and its Jacobian.
Vec6 sphere_vector_field(const RegularizedSurface& s, const Vec6& w);
Mat6 sphere_vector_field_jacobian(const RegularizedSurface& s, const Vec6& w);

// dt/dtau between H-time and Q-time along Sigma: m |q - q^P| = m |eta| (1 - xi0).
double time_scale(const RegularizedSurface& s, const SpherePhasePoint& w);

SpherePhasePoint regularized_involution(const SpherePhasePoint& w);
SpherePhasePoint fiber_reversal(const SpherePhasePoint& w);          // I(xi, eta) = (xi, -eta)
SpherePhasePoint reflection_lift(const SpherePhasePoint& w);         // T*rho
SpherePhasePoint regularized_involution_prime(const SpherePhasePoint& w);  // Hill's second involution
bool on_fixed_locus(const SpherePhasePoint& w, double tol);

struct FixedLocusCircle {
    int sign = +1;
    std::vector<double> theta;
    std::vector<double> f;
    std::vector<int> root_count;
    bool violation = false;
    std::string diagnostics;
    // axis segment [min, max] of q1 covered by the projection
    double q1_min = 0, q1_max = 0;

    SpherePhasePoint point(std::size_t i) const;
};

// Point of L_sign at fiber angle theta, (xi0, xi2) = (cos theta, sin theta).
SpherePhasePoint fixed_locus_point(const RegularizedSurface& s, int sign, double theta);
double fixed_locus_value(const RegularizedSurface& s, int sign, double theta, int* root_count = nullptr);

std::pair<FixedLocusCircle, FixedLocusCircle> fixed_locus_circles(const RegularizedSurface& s, int samples);

struct StarshapeFailure {
    Vec3 xi;
    Vec3 direction;
    int count = 0;
};

struct StarshapeReport {
    bool pass = true;
    std::size_t samples = 0;
    std::size_t tangential = 0;
    int max_count = 0;
    std::vector<StarshapeFailure> failures;
};

// defect(t, xi, e) vanishes where the fiber ray t*e over xi meets the surface;
// limit(xi, e) bounds the ray parameter.
using FiberDefect = std::function<double(double, const Vec3&, const Vec3&)>;
using FiberLimit = std::function<double(const Vec3&, const Vec3&)>;

StarshapeReport starshape_check(const FiberDefect& defect, const FiberLimit& limit, int base_samples, int direction_samples,
                                std::uint64_t seed, int ray_resolution = 2000);
StarshapeReport starshape_check(const RegularizedSurface& s, int base_samples, int direction_samples, std::uint64_t seed);

}  // namespace tbp
