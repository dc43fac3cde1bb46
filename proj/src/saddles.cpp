#include "henon/saddles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace henon {

namespace {

struct Eigen2 {
    Complex small;
    Complex large;
};

// Eigenvalues of a 2x2 matrix whose determinant is known exactly.
Eigen2 eigenvalues(const Mat2& m, Complex det)
{
    const Complex tr = m.trace();
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    const Complex plus = tr + disc;
    const Complex minus = tr - disc;
    const Complex large = 0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
    if (large == Complex{}) return {0.0, 0.0};
    return {det / large, large};
}

Complex cpow(Complex z, int n)
{
    Complex acc{1.0};
    for (int k = 0; k < n; ++k) acc *= z;
    return acc;
}

struct NewtonOutcome {
    ComplexPair root;
    bool converged = false;
    bool singular = false;
};

NewtonOutcome newton_periodic(const HenonMap& f, ComplexPair z, int period, const PeriodicSearchOptions& opt)
{
    const double limit = 4.0 * f.filtration_radius();
    const double max_step = 0.5 * f.filtration_radius();
    int polish = 0;
    for (int it = 0; it < opt.max_newton; ++it) {
        const Image img = iterate(f, z, period);
        if (img.escaped) return {z, false, false};
        const Mat2 j = iterate_jacobian(f, z, period) - Mat2::Identity();
        const Complex det = j.determinant();
        const double scale = j.squaredNorm();
        if (!(std::abs(det) > 1e-14 * scale)) return {z, false, true};
        const ComplexPair rhs = img.z - z;
        // (J)^{-1} rhs for a 2x2 matrix
        ComplexPair step{(j(1, 1) * rhs.x - j(0, 1) * rhs.y) / det, (-j(1, 0) * rhs.x + j(0, 0) * rhs.y) / det};
        const double len = step.max_norm();
        if (!std::isfinite(len)) return {z, false, false};
        if (len > max_step) step = step * (max_step / len);
        z -= step;
        if (z.max_norm() > limit) return {z, false, false};
        if (len <= opt.tol * (1.0 + z.max_norm())) {
            if (++polish >= 2) {
                const Mat2 jr = iterate_jacobian(f, z, period) - Mat2::Identity();
                const bool singular = std::abs(jr.determinant()) <= 1e-9 * jr.squaredNorm();
                return {z, true, singular};
            }
        }
    }
    return {z, false, false};
}

bool insert_unique(std::vector<ComplexPair>& roots, const ComplexPair& z, double merge)
{
    for (const auto& r : roots)
        if (max_distance(r, z) <= merge) return false;
    roots.push_back(z);
    return true;
}

int minimal_period(const HenonMap& f, const ComplexPair& z, int period, double tol)
{
    for (int m = 1; m < period; ++m) {
        if (period % m != 0) continue;
        const Image img = iterate(f, z, m);
        if (!img.escaped && max_distance(img.z, z) <= tol * (1.0 + z.max_norm())) return m;
    }
    return period;
}


// Roots of a monic polynomial via the companion matrix.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& p)
{
    const int d = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -p[static_cast<std::size_t>(i)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
    return roots;
}

// Orbit seeds from the anti-integrable limit: every factor sees x_{j+1} + a_j x_{j-1} = p_j(x_j)
// along a periodic x-sequence; starting each x_j at a root of p_j and running Newton on the
// cyclic system gives one candidate per itinerary. Returns the converged starting points.
std::vector<ComplexPair> itinerary_seeds(const HenonMap& f, int period, std::size_t max_itineraries)
{
    const auto& factors = f.factors();
    const int m = static_cast<int>(factors.size());
    const int len = m * period;
    std::vector<std::vector<Complex>> roots;
    for (const auto& h : factors) roots.push_back(polynomial_roots(h.p));

    double count = 1.0;
    for (int j = 0; j < len; ++j) count *= static_cast<double>(roots[static_cast<std::size_t>(j % m)].size());
    if (count > static_cast<double>(max_itineraries)) return {};

    std::vector<ComplexPair> out;
    std::vector<std::size_t> digits(static_cast<std::size_t>(len), 0);
    Eigen::VectorXcd x(len);
    Eigen::VectorXcd g(len);
    Eigen::MatrixXcd jac(len, len);
    const double limit = 4.0 * f.filtration_radius();
    for (std::size_t code = 0; code < static_cast<std::size_t>(count); ++code) {
        std::size_t c = code;
        for (int j = 0; j < len; ++j) {
            const auto& r = roots[static_cast<std::size_t>(j % m)];
            digits[static_cast<std::size_t>(j)] = c % r.size();
            c /= r.size();
            x(j) = r[digits[static_cast<std::size_t>(j)]];
        }
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            jac.setZero();
            for (int j = 0; j < len; ++j) {
                const auto& h = factors[static_cast<std::size_t>(j % m)];
                const int next = (j + 1) % len;
                const int prev = (j + len - 1) % len;
                g(j) = x(next) + h.a * x(prev) - h.poly(x(j));
                jac(j, next) += 1.0;
                jac(j, prev) += h.a;
                jac(j, j) -= h.poly_derivative(x(j));
            }
            const Eigen::VectorXcd dx = jac.partialPivLu().solve(g);
            x -= dx;
            if (!dx.allFinite() || x.cwiseAbs().maxCoeff() > limit) break;
            if (dx.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + x.cwiseAbs().maxCoeff())) {
                ok = true;
                break;
            }
        }
        if (ok) out.push_back({x(0), x(len - 1)});
    }
    return out;
}

} // namespace

PeriodicSearch find_periodic(const HenonMap& f, int period, const PeriodicSearchOptions& opt)
{
    PeriodicSearch out;
    out.period = period;
    if (period < 1) return out;

    const double radius = f.filtration_radius();
    const double merge = 10.0 * opt.tol;
    const int g = std::max(opt.grid, 2);

    std::vector<ComplexPair> seeds = itinerary_seeds(f, period, opt.max_itineraries);
    // Grid seeds on two slices through the filtration bidisk: the (Re x, Re y) plane with a
    // small imaginary tilt, and the complex diagonal x = y.
    for (int i = 0; i < g; ++i) {
        for (int k = 0; k < g; ++k) {
            const double u = -radius + 2.0 * radius * (i + 0.5) / g;
            const double v = -radius + 2.0 * radius * (k + 0.5) / g;
            seeds.push_back({Complex(u, 1e-3 * v), Complex(v, -1e-3 * u)});
            seeds.push_back({Complex(u, v), Complex(u, v)});
        }
    }

    std::vector<ComplexPair> roots;
    std::vector<ComplexPair> singular;
    for (const auto& seed : seeds) {
        const NewtonOutcome r = newton_periodic(f, seed, period, opt);
        if (!r.converged) continue;
        if (r.singular) {
            insert_unique(singular, r.root, merge);
            continue;
        }
        if (!insert_unique(roots, r.root, merge)) continue;
        // The rest of the orbit consists of roots too; polish and add them.
        ComplexPair w = r.root;
        for (int k = 1; k < period; ++k) {
            w = f.step(w);
            const NewtonOutcome p = newton_periodic(f, w, period, opt);
            if (p.converged && !p.singular) insert_unique(roots, p.root, merge);
        }
    }

    std::sort(roots.begin(), roots.end(), lex_less);
    std::sort(singular.begin(), singular.end(), lex_less);
    out.solutions = roots;
    out.nonhyperbolic = singular;

    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        if (minimal_period(f, roots[i], period, 1e3 * opt.tol) != period) {
            used[i] = true;
            continue;
        }
        Cycle c;
        c.period = period;
        c.points.push_back(roots[i]);
        used[i] = true;
        ComplexPair w = roots[i];
        bool complete = true;
        for (int k = 1; k < period; ++k) {
            w = f.step(w);
            std::size_t best = roots.size();
            double best_d = 1e3 * opt.tol * (1.0 + w.max_norm());
            for (std::size_t j = 0; j < roots.size(); ++j) {
                const double dd = max_distance(roots[j], w);
                if (dd <= best_d) {
                    best_d = dd;
                    best = j;
                }
            }
            if (best == roots.size()) {
                complete = false;
                break;
            }
            used[best] = true;
            c.points.push_back(roots[best]);
            w = roots[best];
        }
        if (complete) out.cycles.push_back(std::move(c));
    }
    // roots[i] is the smallest unused root, so each cycle already starts at its lex-min point
    // and cycles come out in lexicographic order of their first point.
    return out;
}

ComplexPair unit_eigenvector(const Mat2& m, Complex nu)
{
    const ComplexPair c1{m(0, 1), nu - m(0, 0)};
    const ComplexPair c2{nu - m(1, 1), m(1, 0)};
    ComplexPair v = c1.norm() >= c2.norm() ? c1 : c2;
    v = v / Complex(v.norm());
    const Complex lead = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
    return v * (std::abs(lead) / lead);
}

Classification classify(const HenonMap& f, const Cycle& cycle)
{
    Classification out;
    const int n = cycle.period;
    const ComplexPair p = cycle.points.front();
    const Mat2 m = iterate_jacobian(f, p, n);
    const auto ev = eigenvalues(m, cpow(f.jac_det(), n));
    out.nu_small = ev.small;
    out.nu_large = ev.large;
    out.indifferent = std::abs(std::abs(ev.small) - 1.0) < 1e-6 || std::abs(std::abs(ev.large) - 1.0) < 1e-6;
    if (out.indifferent) {
        out.note = "indifferent candidate";
        return out;
    }
    if (!(std::abs(ev.small) < 1.0 && std::abs(ev.large) > 1.0)) {
        out.note = std::abs(ev.large) < 1.0 ? "attracting" : "repelling";
        return out;
    }
    Saddle s;
    s.period = n;
    s.cycle = cycle.points;
    s.nu_s = ev.small;
    s.nu_u = ev.large;
    s.e_s = unit_eigenvector(m, ev.small);
    s.e_u = unit_eigenvector(m, ev.large);
    const Image back = iterate(f, p, n);
    s.residual = distance(back.z, p);
    out.saddle = std::move(s);
    return out;
}

Saddle rebase(const HenonMap& f, const Saddle& s, int index)
{
    Cycle c;
    c.period = s.period;
    const int n = s.period;
    for (int k = 0; k < n; ++k) c.points.push_back(s.cycle[static_cast<std::size_t>((index + k) % n)]);
    auto cls = classify(f, c);
    return cls.saddle.value();
}

Saddle inverse_saddle(const HenonMap& f, const Saddle& s)
{
    const int n = s.period;
    Saddle out;
    out.period = n;
    out.cycle.push_back(s.cycle.front());
    for (int k = n - 1; k >= 1; --k) out.cycle.push_back(s.cycle[static_cast<std::size_t>(k)]);
    const Mat2 m = iterate_jacobian(f, s.point(), -n);
    const auto ev = eigenvalues(m, cpow(1.0 / f.jac_det(), n));
    out.nu_s = ev.small;
    out.nu_u = ev.large;
    out.e_s = unit_eigenvector(m, ev.small);
    out.e_u = unit_eigenvector(m, ev.large);
    out.residual = distance(iterate(f, s.point(), -n).z, s.point());
    return out;
}

} // namespace henon
