#include <doctest.h>

#include <random>

#include "henon/henon_map.hpp"
#include "henon/intersect.hpp"
#include "henon/jet.hpp"

using namespace henon;

TEST_SUITE("jet") {

TEST_CASE("series product and polynomial composition match pointwise evaluation")
{
    Series s(6);
    s[0] = 0.3;
    s[1] = Complex(1.0, 0.5);
    s[2] = -0.25;
    s[4] = Complex(0.0, 0.1);
    const std::vector<Complex> p{Complex(-6.0), 0.0, 1.0, Complex(0.2, 0.1)};
    const Series ps = compose_polynomial(p, s);
    for (Complex t : {Complex(1e-3, 0.0), Complex(0.0, 2e-3), Complex(-1e-3, 1e-3)}) {
        const Complex st = s.evaluate(t);
        const Complex direct = p[0] + st * (p[1] + st * (p[2] + st * p[3]));
        CHECK(std::abs(ps.evaluate(t) - direct) <= 1e-15 + 10.0 * std::pow(std::abs(t), 7));
    }
    const Series sq = s * s;
    CHECK(std::abs(sq[2] - (2.0 * s[0] * s[2] + s[1] * s[1])) <= 1e-15);
}

TEST_CASE("order-1 coefficient of the pushed jet is the jacobian action")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    CurveJet jet;
    jet.base = {Complex(0.4, -0.1), Complex(1.1, 0.3)};
    jet.coeffs = {{Complex(0.7, 0.2), Complex(-0.3, 0.5)}, {0.1, 0.2}, {Complex(0.0, 0.05), 0.0}};
    for (int n : {1, 2, 3, -1, -2}) {
        const CurveJet pushed = jet_of_pushforward(f, jet, n, 3);
        const Mat2 d = iterate_jacobian(f, jet.base, n);
        const ComplexPair expect = d * jet.coeffs[0];
        CHECK(distance(pushed.coeffs[0], expect) <= 1e-12 * std::max(1.0, expect.norm()));
        CHECK(distance(pushed.base, iterate(f, jet.base, n).z) <= 1e-12 * std::max(1.0, pushed.base.norm()));
    }
}

TEST_CASE("push n then m equals push n + m")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    CurveJet jet;
    jet.base = {-1.8117376914898995, -1.8117376914898995};
    jet.coeffs = {{0.9, 0.3}, {Complex(0.1, 0.1), -0.2}, {0.05, 0.0}, {0.0, 0.01}};
    for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{3, -1}, std::pair{-2, 1}}) {
        const CurveJet two = jet_of_pushforward(f, jet_of_pushforward(f, jet, n, 4), m, 4);
        const CurveJet one = jet_of_pushforward(f, jet, n + m, 4);
        for (int j = 0; j < 4; ++j) {
            const double scale = std::max(1.0, one.coeffs[static_cast<std::size_t>(j)].norm());
            CHECK(distance(two.coeffs[static_cast<std::size_t>(j)], one.coeffs[static_cast<std::size_t>(j)]) <=
                  1e-10 * scale);
        }
    }
}

TEST_CASE("pushed jet agrees with the pushed curve to the truncation order")
{
    const HenonMap f = HenonMap::quadratic(Complex(0.3, 0.1), Complex(-1.0, 0.5));
    CurveJet jet;
    jet.base = {0.2, -0.4};
    jet.coeffs = {{1.0, 0.5}, {0.3, 0.0}};
    const CurveJet pushed = jet_of_pushforward(f, jet, 2, 8);
    for (double h : {1e-2, 5e-3}) {
        const ComplexPair direct = iterate(f, jet.evaluate(h), 2).z;
        CHECK(distance(pushed.evaluate(h), direct) <= 1e2 * std::pow(h, 9) + 1e-14);
    }
}

TEST_CASE("lambda rescaling divides coefficient j by lambda^j")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    CurveJet jet;
    jet.base = {0.1, 0.2};
    jet.coeffs = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};
    const CurveJet plain = jet_of_pushforward(f, jet, 1, 3);
    const Complex lam(2.0, 1.0);
    const CurveJet scaled = jet_of_pushforward(f, jet, 1, 3, lam);
    Complex lj = 1.0;
    for (int j = 0; j < 3; ++j) {
        lj *= lam;
        CHECK(distance(scaled.coeffs[static_cast<std::size_t>(j)] * lj, plain.coeffs[static_cast<std::size_t>(j)]) <= 1e-13);
    }
}

}
