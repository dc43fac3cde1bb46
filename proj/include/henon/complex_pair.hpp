#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace henon {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

// A point (or tangent vector) of C^2.
struct ComplexPair {
    Complex x{};
    Complex y{};

    ComplexPair& operator+=(const ComplexPair& o) { x += o.x; y += o.y; return *this; }
    ComplexPair& operator-=(const ComplexPair& o) { x -= o.x; y -= o.y; return *this; }
    ComplexPair& operator*=(Complex s) { x *= s; y *= s; return *this; }

    friend ComplexPair operator+(ComplexPair a, const ComplexPair& b) { return a += b; }
    friend ComplexPair operator-(ComplexPair a, const ComplexPair& b) { return a -= b; }
    friend ComplexPair operator*(Complex s, ComplexPair a) { return a *= s; }
    friend ComplexPair operator*(ComplexPair a, Complex s) { return a *= s; }
    friend ComplexPair operator/(ComplexPair a, Complex s) { return a *= (1.0 / s); }
    friend bool operator==(const ComplexPair&, const ComplexPair&) = default;

    double max_norm() const { return std::max(std::abs(x), std::abs(y)); }
    double norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }
    bool finite() const
    {
        return std::isfinite(x.real()) && std::isfinite(x.imag()) && std::isfinite(y.real()) &&
               std::isfinite(y.imag());
    }

    Vec2 vec() const { return Vec2(x, y); }
    static ComplexPair from(const Vec2& v) { return {v(0), v(1)}; }
};

inline ComplexPair operator*(const Mat2& m, const ComplexPair& v)
{
    return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}

// Hermitian inner product <u, v> = conj(u) . v
inline Complex inner(const ComplexPair& u, const ComplexPair& v)
{
    return std::conj(u.x) * v.x + std::conj(u.y) * v.y;
}

inline double distance(const ComplexPair& a, const ComplexPair& b) { return (a - b).norm(); }
inline double max_distance(const ComplexPair& a, const ComplexPair& b) { return (a - b).max_norm(); }

// Angle in [0, pi/2] between the complex lines spanned by u and v.
inline double line_angle(const ComplexPair& u, const ComplexPair& v)
{
    const double wedge = std::abs(u.x * v.y - u.y * v.x);
    return std::atan2(wedge, std::abs(inner(u, v)));
}

// Lexicographic order on (Re x, Im x, Re y, Im y); used for canonical output ordering.
inline bool lex_less(const ComplexPair& a, const ComplexPair& b)
{
    if (a.x.real() != b.x.real()) return a.x.real() < b.x.real();
    if (a.x.imag() != b.x.imag()) return a.x.imag() < b.x.imag();
    if (a.y.real() != b.y.real()) return a.y.real() < b.y.real();
    return a.y.imag() < b.y.imag();
}

} // namespace henon
