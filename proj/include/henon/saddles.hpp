#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henon/henon_map.hpp"

namespace henon {

struct PeriodicSearchOptions {
    int grid = 48;        // seeds per axis of each seeding slice
    double tol = 1e-9;    // Newton convergence; roots closer than 10*tol are merged
    int max_newton = 120;
    std::size_t max_itineraries = 1u << 16; // cap on anti-integrable itinerary seeds
};

// A primitive cycle; points[k+1] = f(points[k]), points[0] lexicographically smallest.
struct Cycle {
    int period = 0;
    std::vector<ComplexPair> points;
};

struct PeriodicSearch {
    int period = 0;
    std::vector<ComplexPair> solutions;     // all roots of f^N(z) = z, divisor periods included
    std::vector<Cycle> cycles;              // exact period N, hyperbolic Newton roots only
    std::vector<ComplexPair> nonhyperbolic; // roots where Df^N - I is singular
};

PeriodicSearch find_periodic(const HenonMap& f, int period, const PeriodicSearchOptions& opt = {});

// Saddle cycle based at cycle[0]; e_s, e_u are unit eigenvectors of Df^N(cycle[0]).
struct Saddle {
    int period = 0;
    std::vector<ComplexPair> cycle;
    Complex nu_s;
    Complex nu_u;
    ComplexPair e_s;
    ComplexPair e_u;
    double residual = 0.0; // ||f^N(p) - p||

    const ComplexPair& point() const { return cycle.front(); }
};

struct Classification {
    std::optional<Saddle> saddle;
    Complex nu_small; // eigenvalues of Df^N ordered by modulus
    Complex nu_large;
    bool indifferent = false; // some |nu| within 1e-6 of 1
    std::string note;
};

Classification classify(const HenonMap& f, const Cycle& cycle);

// The same cycle based at cycle[index], with eigen-data recomputed there.
Saddle rebase(const HenonMap& f, const Saddle& s, int index);

// Eigenvector of the 2x2 matrix m for eigenvalue nu, unit length, phase fixed so the
// largest-modulus component is positive real.
ComplexPair unit_eigenvector(const Mat2& m, Complex nu);

// Saddle data for the inverse map at the same base point: cycle runs backwards and the
// multipliers are inverted, so the stable direction of f becomes the unstable one.
Saddle inverse_saddle(const HenonMap& f, const Saddle& s);

} // namespace henon
