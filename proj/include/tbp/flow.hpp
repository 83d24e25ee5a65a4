#pragma once

#include <vector>

#include "tbp/dynamics.hpp"
#include "tbp/integrator.hpp"
#include "tbp/regularization.hpp"

namespace tbp {

using Mat2 = Eigen::Matrix2d;

constexpr double kPlaneCollisionGuard = 1e-3;

enum class FlowMode {
    Plain,        // state only
    Clock,        // state plus physical time t(tau) as the last component
    Variational,  // state plus the row-major state transition matrix
};

OdeSystem plane_system(const Problem& pb, FlowMode mode = FlowMode::Plain);
OdeSystem sphere_system(const RegularizedSurface& s, FlowMode mode = FlowMode::Plain);

IntegrationResult integrate_plane(const Problem& pb, const PlanePhasePoint& z0, double t_end,
                                  const IntegratorConfig& cfg, FlowMode mode = FlowMode::Plain,
                                  const EventSpec* ev = nullptr);
IntegrationResult integrate_sphere(const RegularizedSurface& s, const SpherePhasePoint& w0, double t_end,
                                   const IntegratorConfig& cfg, FlowMode mode = FlowMode::Plain,
                                   const EventSpec* ev = nullptr);

// State transition matrix stored after the base state.
Mat6 sphere_stm(const VecX& state);
Mat4 plane_stm(const VecX& state);

// Fix R defects (xi1, eta0, eta2); on the section xi1 = 0 only
// xi0*eta2 - xi2*eta0 is independent.
Vec3 fixed_locus_defects(const SpherePhasePoint& w);
double section_residual(const SpherePhasePoint& w);

struct FixedLocusReturn {
    bool returned = false;
    double T = 0;
    SpherePhasePoint z;
    Vec3 defects = Vec3::Zero();
    double residual = 0;
    // closest approach to Fix R seen (timeout diagnostics)
    double closest_t = 0;
    double closest_defect = 0;
    Trajectory traj;
};

// Integrates until the n-th crossing of the section xi1 = 0 after t_min.
FixedLocusReturn event_return_to_fixed_locus(const RegularizedSurface& s, const SpherePhasePoint& w0,
                                             const IntegratorConfig& cfg, double t_max, int n = 1,
                                             double t_min = 1e-9);

struct AxisReturn {
    bool returned = false;
    double T = 0;
    PlanePhasePoint z;
    double residual = 0;  // p1 at the q2 = 0 crossing
    Trajectory traj;
};
AxisReturn event_return_to_axis(const Problem& pb, const PlanePhasePoint& z0, const IntegratorConfig& cfg, double t_max,
                                int n = 1);

// A symplectic basis of ker(lambda) restricted to T Sigma at one point.
struct ContactFrame {
    Vec6 e1;
    Vec6 e2;
};

struct TransitionSeries {
    std::vector<double> t;
    std::vector<Mat2> psi;
    double max_correction = 0;  // largest |det - 1| before renormalization
};

// Projection of v along X_Q onto ker(lambda).
Vec6 project_to_contact(const RegularizedSurface& s, const SpherePhasePoint& w, const Vec6& v);
// Coordinates (a, b) of w = a e1 + b e2 via the symplectic pairing.
Vec2 frame_coordinates(const ContactFrame& f, const Vec6& w);
double omega6(const Vec6& u, const Vec6& v);  // d(lambda) on R^6

// Psi(t) = Phi(x(t)) T phi^t Phi(x(0))^{-1} at every sample of a variational run.
TransitionSeries linearized_flow(const RegularizedSurface& s, const Trajectory& variational,
                                 const std::vector<ContactFrame>& frames);

}  // namespace tbp
