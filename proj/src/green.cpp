#include "henon/green.hpp"

#include <algorithm>
#include <cmath>

namespace henon {

namespace {

// Past this sup-norm the per-step correction log|1 + eps| is below double resolution.
constexpr double kAsymptoticRadius = 1e60;

} // namespace

GreenValue green(const HenonMap& f, const ComplexPair& z, Direction dir, const GreenOptions& opt)
{
    const double d = f.degree();
    ComplexPair w = z;
    int n = 0;
    const double cycle_radius = opt.cycle_tol * std::max(1.0, z.max_norm());
    while (!f.in_escape_region(w, dir)) {
        if (n >= opt.n_max) return {0.0, n, false, 0.0};
        w = f.step(w, dir);
        ++n;
        if (!w.finite()) return {0.0, n, false, 0.0};
        if (max_distance(w, z) <= cycle_radius) return {0.0, n, false, 0.0};
    }

    const double radius = f.filtration_radius();
    const double factors = static_cast<double>(f.factors().size());
    const double tail_constant = 1.0 + 2.0 * factors * d * radius / (d - 1.0);
    const double drift = f.log_drift(dir);

    auto estimate = [&](int steps, double norm) {
        const double scale = std::pow(d, -steps);
        GreenValue g;
        g.escaped = true;
        g.n_used = steps;
        // log-coordinate recursion L' = d L - drift has invariant d^{-n} (L - drift/(d-1))
        g.value = scale * (std::log(norm + 1.0) - drift / (d - 1.0));
        g.err_bound = scale * tail_constant / norm;
        return g;
    };

    GreenValue g = estimate(n, w.max_norm());
    for (int extra = 0; extra < opt.refine_steps && w.max_norm() < kAsymptoticRadius; ++extra) {
        if (g.err_bound <= opt.tol * std::abs(g.value)) break;
        w = f.step(w, dir);
        ++n;
        g = estimate(n, w.max_norm());
    }
    if (g.value < 0.0) g.value = 0.0;
    return g;
}

bool in_k(const HenonMap& f, const ComplexPair& z, Direction dir, int n_max, double cycle_tol)
{
    ComplexPair w = z;
    const double cycle_radius = cycle_tol * std::max(1.0, z.max_norm());
    for (int n = 0; n <= n_max; ++n) {
        if (!w.finite() || f.in_escape_region(w, dir)) return false;
        if (n > 0 && max_distance(w, z) <= cycle_radius) return true;
        if (n < n_max) w = f.step(w, dir);
    }
    return true;
}

} // namespace henon
