#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tbp {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

enum class ProblemKind { PCRTBP, HillLunar, RotatingKepler };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

// Normalized mass of the moon. Zero only for the rotating Kepler problem.
class MassRatio {
public:
    explicit MassRatio(double mu, bool allow_zero = false);
    double value() const { return mu_; }

private:
    double mu_;
};

// Point (q1, q2, p1, p2) of T*R^2 in the rotating frame.
struct PlanePhasePoint {
    double q1 = 0, q2 = 0, p1 = 0, p2 = 0;

    PlanePhasePoint() = default;
    PlanePhasePoint(double a, double b, double c, double d) : q1(a), q2(b), p1(c), p2(d) {}
    explicit PlanePhasePoint(const Vec4& v) : q1(v[0]), q2(v[1]), p1(v[2]), p2(v[3]) {}

    Vec4 vec() const { return {q1, q2, p1, p2}; }
    Vec2 q() const { return {q1, q2}; }
    Vec2 p() const { return {p1, p2}; }
};

enum class Primary { Earth, Moon };
std::string to_string(Primary p);

// Problem descriptor. Primary positions are always derived from mu.
class Problem {
public:
    static Problem pcrtbp(double mu);
    static Problem rotating_kepler();
    static Problem hill_lunar();

    ProblemKind kind() const { return kind_; }
    double mu() const { return mu_; }

    // q^E = (mu, 0), q^M = (-(1 - mu), 0); Hill: single body at the origin.
    Vec2 earth() const;
    Vec2 moon() const;
    Vec2 position(Primary p) const { return p == Primary::Earth ? earth() : moon(); }
    double mass(Primary p) const;

private:
    Problem(ProblemKind k, double mu) : kind_(k), mu_(mu) {}
    ProblemKind kind_;
    double mu_;
};

enum class Involution { R, Rprime };

double hamiltonian(const Problem& pb, const PlanePhasePoint& z);
// (dH/dp, -dH/dq)
Vec4 hamiltonian_vector_field(const Problem& pb, const PlanePhasePoint& z);
// Jacobian of the vector field, used by the plane-chart variational equation.
Mat4 vector_field_jacobian(const Problem& pb, const PlanePhasePoint& z);
PlanePhasePoint involution(const Problem& pb, Involution which, const PlanePhasePoint& z);

double effective_potential(const Problem& pb, const Vec2& q);
Vec2 effective_potential_gradient(const Problem& pb, const Vec2& q);

// Distance to the nearest massive body and its name, for collision checks.
std::pair<double, std::string> nearest_body(const Problem& pb, const Vec2& q);

struct LagrangePoint {
    std::string label;
    Vec2 position;
    double energy = 0;
};

struct LagrangePointSet {
    std::array<LagrangePoint, 5> points;
    const LagrangePoint& operator[](int i) const { return points[static_cast<std::size_t>(i - 1)]; }
    bool ordering_holds(double tol = 1e-12) const;
};

LagrangePointSet lagrange_points(double mu);

// H_Hill at its two collinear equilibria (both equal).
double hill_critical_energy();

struct GridSpec {
    int nx = 512;
    int ny = 512;
    double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
};

enum class ComponentKind { Earth, Moon, Primary, Unbounded, OtherBounded };
std::string to_string(ComponentKind k);

struct HillComponent {
    int label = 0;
    ComponentKind kind = ComponentKind::OtherBounded;
    std::size_t cells = 0;
};

struct HillRegionGrid {
    GridSpec spec;
    double c = 0;
    std::string kind;
    double mu = 0;
    std::vector<double> potential;       // row-major, -inf at singular cells
    std::vector<unsigned char> inside;
    std::vector<unsigned char> singular;
    std::vector<int> component;          // -1 outside
    std::vector<HillComponent> components;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * spec.nx + i; }
    Vec2 center(int i, int j) const;
    int bounded_count() const;
    std::optional<HillComponent> component_of(ComponentKind k) const;
    // Label of the component containing q, or -1.
    int component_at(const Vec2& q) const;
};

HillRegionGrid hill_region(const Problem& pb, double c, const GridSpec& spec = {});

struct ComponentCountReport {
    bool two_bounded = false;
    int bounded = 0;
    std::string message;
};

// Checks for exactly two bounded components (earth and moon); reports the
// count it actually found rather than throwing.
ComponentCountReport check_two_bounded_components(const HillRegionGrid& grid);

}  // namespace tbp
