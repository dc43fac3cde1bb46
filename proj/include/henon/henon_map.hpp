#pragma once

#include <vector>

#include "henon/complex_pair.hpp"
#include "henon/jet.hpp"

namespace henon {

enum class Direction { forward, backward };

inline Direction reverse(Direction d)
{
    return d == Direction::forward ? Direction::backward : Direction::forward;
}

// Sup-norm beyond which an orbit is reported as escaped instead of being iterated further.
inline constexpr double kOverflowRadius = 1e150;

// One generalized Henon factor (x, y) -> (p(x) - a y, x), p monic of degree >= 2.
struct HenonFactor {
    std::vector<Complex> p; // constant term first, leading coefficient 1
    Complex a;

    int degree() const { return static_cast<int>(p.size()) - 1; }
    Complex poly(Complex x) const;
    Complex poly_derivative(Complex x) const;
};

// Finite composition of Henon factors, applied left to right.
class HenonMap {
public:
    explicit HenonMap(std::vector<HenonFactor> factors);

    // x^2 + c with Jacobian a: the quadratic family used throughout the tests.
    static HenonMap quadratic(Complex a, Complex c);

    const std::vector<HenonFactor>& factors() const { return factors_; }
    int degree() const { return degree_; }
    Complex jac_det() const { return jac_det_; }
    double filtration_radius() const { return radius_; }

    // Raw one-step map in the requested direction, no overflow bookkeeping.
    ComplexPair step(const ComplexPair& z, Direction dir = Direction::forward) const;
    SeriesPair step(const SeriesPair& z, Direction dir = Direction::forward) const;
    Mat2 step_jacobian(const ComplexPair& z, Direction dir = Direction::forward) const;

    // V+ = {|x| >= R, |x| >= |y|} for forward, V- = {|y| >= R, |y| >= |x|} for backward.
    // Orbits entering it escape monotonically in that direction.
    bool in_escape_region(const ComplexPair& z, Direction dir) const;

    // Constant A with log|w'| = deg * log|w| - A + o(1) deep inside the escape region.
    double log_drift(Direction dir) const;

private:
    std::vector<HenonFactor> factors_;
    int degree_ = 1;
    Complex jac_det_{1.0};
    double radius_ = 0.0;
};

struct Image {
    ComplexPair z;
    bool escaped = false;
};

Image evaluate(const HenonMap& f, const ComplexPair& z);
Image inverse_evaluate(const HenonMap& f, const ComplexPair& z);
Mat2 jacobian(const HenonMap& f, const ComplexPair& z, Direction dir = Direction::forward);

// n > 0 applies f n times, n < 0 applies f^{-1} |n| times. Stops at the first overflow.
Image iterate(const HenonMap& f, ComplexPair z, long n, double overflow_radius = kOverflowRadius);

// Jacobian of f^n (or f^{-n}) at z, accumulated along the orbit.
Mat2 iterate_jacobian(const HenonMap& f, ComplexPair z, long n);

double filtration_radius(const HenonMap& f);

} // namespace henon
