#include "henon/henon_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace henon {

Complex HenonFactor::poly(Complex x) const
{
    Complex acc{};
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex HenonFactor::poly_derivative(Complex x) const
{
    Complex acc{};
    for (std::size_t k = p.size() - 1; k >= 1; --k) acc = acc * x + static_cast<double>(k) * p[k];
    return acc;
}

namespace {

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

void validate(const HenonFactor& h, std::size_t index)
{
    const auto where = "factor " + std::to_string(index) + ": ";
    if (h.p.size() < 3) throw std::invalid_argument(where + "polynomial degree must be at least 2");
    if (h.p.back() != Complex{1.0, 0.0}) throw std::invalid_argument(where + "polynomial must be monic");
    if (h.a == Complex{}) throw std::invalid_argument(where + "a must be nonzero");
    if (!finite(h.a)) throw std::invalid_argument(where + "a must be finite");
    for (auto c : h.p)
        if (!finite(c)) throw std::invalid_argument(where + "coefficients must be finite");
}

} // namespace

HenonMap::HenonMap(std::vector<HenonFactor> factors) : factors_(std::move(factors))
{
    if (factors_.empty()) throw std::invalid_argument("a Henon map needs at least one factor");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto& h = factors_[i];
        validate(h, i);
        degree_ *= h.degree();
        jac_det_ *= h.a;
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < h.p.size(); ++k) s += std::abs(h.p[k]);
        radius_ = std::max(radius_, 1.0 + std::abs(h.a) + s);
    }
}

HenonMap HenonMap::quadratic(Complex a, Complex c)
{
    return HenonMap({HenonFactor{{c, 0.0, 1.0}, a}});
}

ComplexPair HenonMap::step(const ComplexPair& z, Direction dir) const
{
    ComplexPair w = z;
    if (dir == Direction::forward) {
        for (const auto& h : factors_) w = {h.poly(w.x) - h.a * w.y, w.x};
    } else {
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
            w = {w.y, (it->poly(w.y) - w.x) / it->a};
    }
    return w;
}

SeriesPair HenonMap::step(const SeriesPair& z, Direction dir) const
{
    SeriesPair w = z;
    if (dir == Direction::forward) {
        for (const auto& h : factors_) {
            Series nx = compose_polynomial(h.p, w.x) - h.a * w.y;
            w = SeriesPair(std::move(nx), std::move(w.x));
        }
    } else {
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            Series ny = (compose_polynomial(it->p, w.y) - w.x) * (1.0 / it->a);
            w = SeriesPair(std::move(w.y), std::move(ny));
        }
    }
    return w;
}

Mat2 HenonMap::step_jacobian(const ComplexPair& z, Direction dir) const
{
    Mat2 acc = Mat2::Identity();
    ComplexPair w = z;
    if (dir == Direction::forward) {
        for (const auto& h : factors_) {
            Mat2 j;
            j << h.poly_derivative(w.x), -h.a, 1.0, 0.0;
            acc = j * acc;
            w = {h.poly(w.x) - h.a * w.y, w.x};
        }
    } else {
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            Mat2 j;
            j << 0.0, 1.0, -1.0 / it->a, it->poly_derivative(w.y) / it->a;
            acc = j * acc;
            w = {w.y, (it->poly(w.y) - w.x) / it->a};
        }
    }
    return acc;
}

bool HenonMap::in_escape_region(const ComplexPair& z, Direction dir) const
{
    const double ax = std::abs(z.x);
    const double ay = std::abs(z.y);
    if (dir == Direction::forward) return ax >= radius_ && ax >= ay;
    return ay >= radius_ && ay >= ax;
}

double HenonMap::log_drift(Direction dir) const
{
    if (dir == Direction::forward) return 0.0;
    // Inverse factors run last-to-first; each contributes log|a_i| scaled by the degrees applied after it.
    double drift = 0.0;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
        drift = drift * it->degree() + std::log(std::abs(it->a));
    return drift;
}

Image evaluate(const HenonMap& f, const ComplexPair& z)
{
    const auto w = f.step(z, Direction::forward);
    return {w, !(w.finite() && w.max_norm() <= kOverflowRadius)};
}

Image inverse_evaluate(const HenonMap& f, const ComplexPair& z)
{
    const auto w = f.step(z, Direction::backward);
    return {w, !(w.finite() && w.max_norm() <= kOverflowRadius)};
}

Mat2 jacobian(const HenonMap& f, const ComplexPair& z, Direction dir) { return f.step_jacobian(z, dir); }

Image iterate(const HenonMap& f, ComplexPair z, long n, double overflow_radius)
{
    const Direction dir = n >= 0 ? Direction::forward : Direction::backward;
    for (long k = 0; k < std::labs(n); ++k) {
        z = f.step(z, dir);
        if (!z.finite() || z.max_norm() > overflow_radius) return {z, true};
    }
    return {z, false};
}

Mat2 iterate_jacobian(const HenonMap& f, ComplexPair z, long n)
{
    const Direction dir = n >= 0 ? Direction::forward : Direction::backward;
    Mat2 acc = Mat2::Identity();
    for (long k = 0; k < std::labs(n); ++k) {
        acc = f.step_jacobian(z, dir) * acc;
        z = f.step(z, dir);
    }
    return acc;
}

double filtration_radius(const HenonMap& f) { return f.filtration_radius(); }

} // namespace henon
