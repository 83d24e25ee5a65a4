#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tbp {

using VecX = Eigen::VectorXd;

enum class Chart { Plane, Sphere, Cover };
std::string to_string(Chart c);

struct IntegratorConfig {
    double atol = 1e-12;
    double rtol = 1e-12;
    double max_step = 0.05;
    double initial_step = 1e-4;
    bool project = true;            // constraint projection after each accepted step
    double event_tol = 1e-12;       // bisection tolerance in t
    double energy_tol = 1e-8;       // per-run drift bound (checked by callers)
    double constraint_tol = 1e-10;  // defect allowed before projection, times 10 is fatal
    std::size_t max_steps = 2000000;

    void validate() const;
};

// Autonomous ODE with optional hooks. error_dim limits step-size control to
// the leading components (the base state when a variational block is appended).
struct OdeSystem {
    int dim = 0;
    int error_dim = 0;
    std::function<void(const VecX&, VecX&)> rhs;
    std::function<void(VecX&)> project;                 // may be empty
    std::function<double(const VecX&)> constraint;      // may be empty
    std::function<double(const VecX&)> energy;          // may be empty
    std::function<void(const VecX&)> guard;             // throws to abort
};

// Piecewise dense output of an integration. Times are monotone in the
// direction of integration (increasing for forward runs).
class Trajectory {
public:
    Chart chart = Chart::Plane;
    std::vector<double> t;
    std::vector<VecX> x;
    std::vector<double> drift;  // |E(x_i) - E(x_0)|

    std::size_t size() const { return t.size(); }
    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }
    double max_drift() const;

    VecX at(double tq) const;
    // Uniform resampling including both endpoints.
    std::vector<VecX> resample(std::size_t n) const;

    void push(double tt, const VecX& xx, double dr);
    void push_dense(const std::array<VecX, 5>& coeffs) { dense_.push_back(coeffs); }
    void drop_dense() { dense_.clear(); }
    bool has_dense() const { return !dense_.empty() && dense_.size() + 1 == t.size(); }

private:
    std::size_t interval(double tq) const;
    std::vector<std::array<VecX, 5>> dense_;
};

struct EventSpec {
    std::function<double(const VecX&)> g;
    double t_min = 0;   // crossings at |t| <= t_min are ignored
    int direction = 0;  // +1 rising, -1 falling, 0 both
    int stop_at = 1;    // terminate at this crossing count (0: never)
};

struct EventHit {
    double t;
    VecX x;
};

struct IntegrationResult {
    Trajectory traj;
    std::vector<EventHit> hits;
    bool terminated_by_event = false;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

// Dormand-Prince 5(4) with the 4th order continuous extension.
IntegrationResult integrate(const OdeSystem& sys, const VecX& x0, double t_end, const IntegratorConfig& cfg,
                            const EventSpec* event = nullptr, Chart chart = Chart::Plane);

}  // namespace tbp
