#pragma once

#include <span>
#include <vector>

#include "henon/complex_pair.hpp"

namespace henon {

// Truncated power series c_0 + c_1 t + ... + c_order t^order.
class Series {
public:
    explicit Series(int order = 0) : c_(static_cast<std::size_t>(order) + 1) {}
    Series(int order, Complex constant) : Series(order) { c_[0] = constant; }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    Complex& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    Complex operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    std::span<const Complex> coeffs() const { return c_; }

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(Complex s);
    Series& operator+=(Complex s) { c_[0] += s; return *this; }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, Complex s) { return a *= s; }
    friend Series operator*(Complex s, Series a) { return a *= s; }
    friend Series operator*(const Series& a, const Series& b);

    Complex evaluate(Complex t) const;

private:
    std::vector<Complex> c_;
};

// A curve germ t -> (x(t), y(t)) in C^2 truncated at a fixed order.
struct SeriesPair {
    Series x;
    Series y;

    explicit SeriesPair(int order = 0) : x(order), y(order) {}
    SeriesPair(Series x_, Series y_) : x(std::move(x_)), y(std::move(y_)) {}

    int order() const { return x.order(); }
    ComplexPair coeff(int k) const { return {x[k], y[k]}; }
    void set_coeff(int k, const ComplexPair& v) { x[k] = v.x; y[k] = v.y; }
    ComplexPair evaluate(Complex t) const { return {x.evaluate(t), y.evaluate(t)}; }
};

// p(s) for a polynomial with coefficients constant-term first.
Series compose_polynomial(std::span<const Complex> poly, const Series& s);

} // namespace henon
