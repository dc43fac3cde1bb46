#pragma once

#include "henon/henon_map.hpp"

namespace henon {

struct GreenOptions {
    int n_max = 400;        // iteration budget before declaring the orbit bounded
    int refine_steps = 25;  // post-escape iterations
    double tol = 1e-14;     // refinement stops early once err_bound drops below tol * value
    // An orbit returning within cycle_tol * max(1, |z|) of its start is periodic up to
    // round-off and counts as bounded; without this a saddle orbit drifts off and escapes.
    // 0 disables the check.
    double cycle_tol = 1e-10;
};

// Escape-rate Green function value. value == 0 exactly when escaped == false.
struct GreenValue {
    double value = 0.0;
    int n_used = 0;
    bool escaped = false;
    double err_bound = 0.0;
};

// G+ for Direction::forward, G- for Direction::backward. Uses the sup-norm in
// log(||w|| + 1); once the orbit is deep inside the escape region the remaining
// log-coordinate recursion is summed in closed form.
GreenValue green(const HenonMap& f, const ComplexPair& z, Direction dir, const GreenOptions& opt = {});

inline GreenValue green_plus(const HenonMap& f, const ComplexPair& z, const GreenOptions& opt = {})
{
    return green(f, z, Direction::forward, opt);
}

inline GreenValue green_minus(const HenonMap& f, const ComplexPair& z, const GreenOptions& opt = {})
{
    return green(f, z, Direction::backward, opt);
}

// One-sided membership test: false is a certificate (the orbit entered the escape
// region), true only means no escape was seen within n_max iterations. An orbit returning
// to its start as in GreenOptions::cycle_tol counts as bounded.
bool in_k(const HenonMap& f, const ComplexPair& z, Direction dir, int n_max = 400, double cycle_tol = 1e-10);

inline bool in_k_plus(const HenonMap& f, const ComplexPair& z, int n_max = 400)
{
    return in_k(f, z, Direction::forward, n_max);
}

inline bool in_k_minus(const HenonMap& f, const ComplexPair& z, int n_max = 400)
{
    return in_k(f, z, Direction::backward, n_max);
}

} // namespace henon
