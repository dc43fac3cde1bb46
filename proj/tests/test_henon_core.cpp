#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "henon/henon_map.hpp"
#include "henon/map_io.hpp"

using namespace henon;

namespace {

ComplexPair random_point(std::mt19937_64& rng, double r)
{
    std::uniform_real_distribution<double> u(-r, r);
    return {{u(rng), u(rng)}, {u(rng), u(rng)}};
}

// Independent evaluation of a single quadratic factor.
ComplexPair quad(Complex a, Complex c, const ComplexPair& z) { return {z.x * z.x + c - a * z.y, z.x}; }

HenonMap two_factor()
{
    return HenonMap({HenonFactor{{Complex(-1.0, 0.2), 0.0, 1.0}, Complex(0.3, 0.1)},
                     HenonFactor{{0.5, Complex(0.0, 1.0), 0.0, 1.0}, Complex(-0.7, 0.0)}});
}

} // namespace

TEST_SUITE("henon_core") {

TEST_CASE("evaluate and inverse on the reference map")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    const Image w = evaluate(f, {0.0, 0.0});
    CHECK_FALSE(w.escaped);
    CHECK(std::abs(w.z.x - Complex(-6.0)) == 0.0);
    CHECK(std::abs(w.z.y) == 0.0);
    const Image v = inverse_evaluate(f, {-6.0, 0.0});
    CHECK(v.z.norm() == 0.0);
    CHECK(f.degree() == 2);
    CHECK(std::abs(f.jac_det() - Complex(0.5)) == 0.0);
}

TEST_CASE("fixed point from the quadratic formula is fixed")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    for (double sgn : {1.0, -1.0}) {
        const double x = (1.5 + sgn * std::sqrt(26.25)) / 2.0;
        const ComplexPair p{x, x};
        CHECK(distance(evaluate(f, p).z, p) <= 1e-10);
        // round-off grows by the expanding multiplier of f or f^{-1} at each step
        for (long n : {-7L, -1L, 0L, 1L, 5L}) CHECK(distance(iterate(f, p, n).z, p) <= 1e-15 * std::pow(14.0, std::labs(n)) + 1e-14);
    }
    CHECK(std::abs((1.5 + std::sqrt(26.25)) / 2.0 - 3.31173769) < 1e-8);
}

TEST_CASE("evaluation agrees with direct arithmetic")
{
    std::mt19937_64 rng(7);
    const HenonMap f = HenonMap::quadratic(Complex(0.3, -0.2), Complex(-1.1, 0.4));
    for (int i = 0; i < 200; ++i) {
        const ComplexPair z = random_point(rng, 3.0);
        CHECK(distance(evaluate(f, z).z, quad(Complex(0.3, -0.2), Complex(-1.1, 0.4), z)) <= 1e-13);
    }
}

TEST_CASE("round trip on the filtration bidisk")
{
    std::mt19937_64 rng(11);
    for (const HenonMap& f : {HenonMap::quadratic(0.5, -6.0), HenonMap::quadratic(0.1, -1.24), two_factor()}) {
        const double R = f.filtration_radius();
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const ComplexPair z = random_point(rng, R / std::sqrt(2.0));
            worst = std::max(worst, distance(inverse_evaluate(f, evaluate(f, z).z).z, z) / std::max(1.0, z.norm()));
            worst = std::max(worst, distance(evaluate(f, inverse_evaluate(f, z).z).z, z) / std::max(1.0, z.norm()));
        }
        CHECK(worst <= 1e-11);
    }
}

TEST_CASE("iterate: identity at zero, round trips near an elliptic point")
{
    // a = 1, c = 0: area preserving with an elliptic fixed point at the origin, so small
    // orbits stay bounded and round-off grows only polynomially.
    const HenonMap f = HenonMap::quadratic(1.0, 0.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const ComplexPair z = random_point(rng, 0.05);
        CHECK(iterate(f, z, 0).z == z);
        for (long n = 1; n <= 20; ++n) {
            const Image fw = iterate(f, z, n);
            REQUIRE_FALSE(fw.escaped);
            CHECK(distance(iterate(f, fw.z, -n).z, z) <= 1e-10);
        }
    }
    // f^{-2} undoes f^2 step by step
    const ComplexPair z{0.01, Complex(0.0, 0.02)};
    const ComplexPair w = evaluate(f, evaluate(f, z).z).z;
    CHECK(distance(inverse_evaluate(f, inverse_evaluate(f, w).z).z, z) <= 1e-15);
}

TEST_CASE("overflow is reported, not propagated")
{
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    const Image w = iterate(f, {1e6, 0.0}, 100);
    CHECK(w.escaped);
    CHECK(w.z.finite());
    CHECK(iterate(f, {1e6, 0.0}, -100).escaped);
}

TEST_CASE("jacobian: determinant and finite differences")
{
    std::mt19937_64 rng(5);
    const HenonMap g = two_factor();
    const Complex a1(0.3, 0.1), a2(-0.7, 0.0);
    CHECK(std::abs(g.jac_det() - a1 * a2) <= 1e-15);
    const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    double det_dev = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ComplexPair z = random_point(rng, 3.0);
        det_dev = std::max(det_dev, std::abs(jacobian(f, z).determinant() - Complex(0.5)));
        det_dev = std::max(det_dev, std::abs(jacobian(g, z).determinant() - a1 * a2));
    }
    CHECK(det_dev <= 1e-12);

    for (const HenonMap& m : {f, g}) {
        const ComplexPair z = random_point(rng, 1.5);
        const ComplexPair e{Complex(0.6, -0.3), Complex(0.2, 0.7)};
        const ComplexPair exact = jacobian(m, z) * e;
        double prev = std::numeric_limits<double>::infinity();
        for (double h : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
            const ComplexPair fd = (evaluate(m, z + h * e).z - evaluate(m, z).z) / h;
            const double err = distance(fd, exact);
            CHECK(err <= 100.0 * h + 1e-6); // forward difference is O(h) until round-off takes over
            if (h >= 1e-6) CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("factor jacobian is [[p'(x), -a], [1, 0]]")
{
    const HenonMap f = HenonMap::quadratic(Complex(0.5, 0.25), -2.0);
    const ComplexPair z{Complex(1.2, -0.4), 0.7};
    const Mat2 j = jacobian(f, z);
    CHECK(std::abs(j(0, 0) - 2.0 * z.x) <= 1e-15);
    CHECK(std::abs(j(0, 1) + Complex(0.5, 0.25)) <= 1e-15);
    CHECK(std::abs(j(1, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(j(1, 1)) == 0.0);
    const Mat2 ji = jacobian(f, evaluate(f, z).z, Direction::backward);
    CHECK((ji * j - Mat2::Identity()).norm() <= 1e-14);
}

TEST_CASE("filtration radius")
{
    CHECK(filtration_radius(HenonMap::quadratic(0.5, -6.0)) == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(filtration_radius(HenonMap::quadratic(0.1, -1.24)) == doctest::Approx(2.34).epsilon(1e-15));
    const HenonMap g = two_factor();
    const double r1 = 1.0 + std::abs(Complex(0.3, 0.1)) + std::abs(Complex(-1.0, 0.2));
    const double r2 = 1.0 + 0.7 + 0.5 + 1.0;
    CHECK(g.filtration_radius() == doctest::Approx(std::max(r1, r2)).epsilon(1e-15));
}

TEST_CASE("orbits entering V+ escape monotonically")
{
    std::mt19937_64 rng(9);
    for (const HenonMap& f : {HenonMap::quadratic(0.5, -6.0), HenonMap::quadratic(0.1, -1.24)}) {
        const double R = f.filtration_radius();
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const double rx = R * (1.0 + 3.0 * u(rng));
            ComplexPair z{std::polar(rx, 6.283 * u(rng)), std::polar(rx * u(rng), 6.283 * u(rng))};
            REQUIRE(f.in_escape_region(z, Direction::forward));
            for (int n = 0; n < 6; ++n) {
                const ComplexPair w = f.step(z);
                CHECK(std::abs(w.x) > std::abs(z.x));
                CHECK(std::abs(w.x) >= std::abs(w.y));
                z = w;
            }
        }
    }
}

TEST_CASE("map specification parsing")
{
    const auto spec = nlohmann::json::parse(R"({"factors":[{"p":[-6,0,1],"a":[0.5,0]}]})");
    const HenonMap f = parse_map(spec);
    CHECK(f.degree() == 2);
    CHECK(std::abs(f.jac_det() - Complex(0.5)) == 0.0);
    CHECK(parse_map(to_json(f)).factors()[0].p == f.factors()[0].p);

    CHECK_THROWS_AS(parse_map(nlohmann::json::parse(R"({"factors":[{"p":[-6,0,2],"a":0.5}]})")), std::invalid_argument);
    CHECK_THROWS_AS(parse_map(nlohmann::json::parse(R"({"factors":[{"p":[-6,0,1],"a":0}]})")), std::invalid_argument);
    CHECK_THROWS_AS(parse_map(nlohmann::json::parse(R"({"factors":[{"p":[-6,1],"a":1}]})")), std::invalid_argument);
    CHECK_THROWS_AS(parse_map(nlohmann::json::parse(R"({"factors":[]})")), std::invalid_argument);
    CHECK_THROWS_AS(parse_map(nlohmann::json::parse(R"({"p":[1]})")), std::invalid_argument);
    CHECK(std::abs(parse_complex(nlohmann::json::parse("[1.5, -2]")) - Complex(1.5, -2)) == 0.0);
}

}
