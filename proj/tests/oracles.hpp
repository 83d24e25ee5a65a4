#pragma once

// Independent reference computations for the acceptance suite. Nothing here
// calls into the library.

#include <array>
#include <vector>

namespace oracle {

// Rotating frame, earth at (mu, 0), moon at (-(1 - mu), 0).
double potential(double mu, double q1, double q2);
double hamiltonian(double mu, const std::array<double, 4>& z);
std::array<double, 4> reflect(const std::array<double, 4>& z);  // (q1, -q2, -p1, p2)

struct Equilibria {
    std::array<double, 3> collinear_x;  // L1 (between), L2 (beyond the moon), L3 (beyond the earth)
    std::array<double, 5> energy;
};
Equilibria lagrange(double mu);

// Plane flow by a Runge-Kutta-Fehlberg 7(8) integrator at the given times.
std::vector<std::array<double, 4>> plane_flow(double mu, const std::array<double, 4>& z0, const std::vector<double>& times,
                                              double tol = 1e-13);

struct KeplerCircle {
    double radius;
    double half_period;
};
// Circle of the rotating Kepler problem at energy c; retrograde = against the frame rotation.
KeplerCircle kepler_circle(double c, bool retrograde);

// Line path index by counting passages of (theta - theta_v) / pi through the integers.
double line_index_by_counting(const std::vector<double>& theta, double theta_v, int refine = 64);

// Conley-Zehnder index of the rotation path e^{J s}, s in [0, angle].
int rotation_cz(double angle);

long gcd(long a, long b);

// Path space ranks 1, 3, 4, 4, ... tabulated by hand.
long path_rank_table(int degree);

// alpha = 1/2 (x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2) on (x1, x2, y1, y2)
double alpha(const std::array<double, 4>& z, const std::array<double, 4>& v);
std::array<double, 4> psi(const std::array<double, 4>& z);

}  // namespace oracle
