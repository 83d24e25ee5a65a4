#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace tbp {

// Forward-mode dual number with N directional slots. Nesting Dual<Dual<double,N>,N>
// gives exact second derivatives, which the variational equations need.
template <typename T, std::size_t N>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() = default;
    Dual(double x) : v(x) {}  // NOLINT: implicit from constants is the point
    Dual(T x, std::array<T, N> g) : v(std::move(x)), d(std::move(g)) {}

    static Dual variable(T x, std::size_t slot)
    {
        Dual r(std::move(x), {});
        r.d[slot] = T(1.0);
        return r;
    }
};

namespace detail {
template <typename T> struct is_dual : std::false_type {};
template <typename T, std::size_t N> struct is_dual<Dual<T, N>> : std::true_type {};
}

template <typename T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r(a.v + b.v, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
}
template <typename T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r(a.v - b.v, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
}
template <typename T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a)
{
    Dual<T, N> r(-a.v, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}
template <typename T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> r(a.v * b.v, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}
template <typename T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b)
{
    T inv = T(1.0) / b.v;
    Dual<T, N> r(a.v * inv, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
    return r;
}

// mixed arithmetic with plain doubles
template <typename T, std::size_t N> Dual<T, N> operator+(const Dual<T, N>& a, double b) { return a + Dual<T, N>(b); }
template <typename T, std::size_t N> Dual<T, N> operator+(double a, const Dual<T, N>& b) { return Dual<T, N>(a) + b; }
template <typename T, std::size_t N> Dual<T, N> operator-(const Dual<T, N>& a, double b) { return a - Dual<T, N>(b); }
template <typename T, std::size_t N> Dual<T, N> operator-(double a, const Dual<T, N>& b) { return Dual<T, N>(a) - b; }
template <typename T, std::size_t N> Dual<T, N> operator*(const Dual<T, N>& a, double b)
{
    Dual<T, N> r(a.v * b, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b;
    return r;
}
template <typename T, std::size_t N> Dual<T, N> operator*(double a, const Dual<T, N>& b) { return b * a; }
template <typename T, std::size_t N> Dual<T, N> operator/(const Dual<T, N>& a, double b) { return a * (1.0 / b); }
template <typename T, std::size_t N> Dual<T, N> operator/(double a, const Dual<T, N>& b) { return Dual<T, N>(a) / b; }

template <typename T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a)
{
    using std::sqrt;
    T s = sqrt(a.v);
    T h = T(0.5) / s;
    Dual<T, N> r(s, {});
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * h;
    return r;
}

inline double value_of(double x) { return x; }
template <typename T, std::size_t N>
double value_of(const Dual<T, N>& a) { return value_of(a.v); }

}  // namespace tbp
