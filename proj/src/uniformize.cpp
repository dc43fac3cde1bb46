#include "henon/uniformize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace henon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex cpow(Complex z, int n)
{
    Complex acc{1.0};
    for (int k = 0; k < n; ++k) acc *= z;
    return acc;
}

ComplexPair apply_return(const HenonMap& f, ComplexPair z, int steps, Direction dir)
{
    for (int i = 0; i < steps; ++i) z = f.step(z, dir);
    return z;
}

// p(x + d) - p(x) without cancellation: Taylor shift of p to x, constant term dropped.
Complex poly_increment(const std::vector<Complex>& p, Complex x, Complex d)
{
    std::vector<Complex> c(p);
    const int n = static_cast<int>(c.size()) - 1;
    for (int k = 0; k < n; ++k)
        for (int j = n - 1; j >= k; --j) c[static_cast<std::size_t>(j)] += x * c[static_cast<std::size_t>(j + 1)];
    Complex acc{};
    for (int k = n; k >= 1; --k) acc = (acc + c[static_cast<std::size_t>(k)]) * d;
    return acc;
}

// Factor-level orbit of the base point along one return in the series' direction.
std::vector<ComplexPair> cycle_frame(const HenonMap& f, const ComplexPair& p, int period, Direction dir)
{
    const auto& factors = f.factors();
    const std::size_t m = factors.size();
    std::vector<ComplexPair> frame;
    frame.reserve(static_cast<std::size_t>(period) * m);
    ComplexPair w = p;
    for (std::size_t s = 0; s < static_cast<std::size_t>(period) * m; ++s) {
        frame.push_back(w);
        if (dir == Direction::forward) {
            const auto& h = factors[s % m];
            w = {h.poly(w.x) - h.a * w.y, w.x};
        } else {
            const auto& h = factors[m - 1 - s % m];
            w = {w.y, (h.poly(w.y) - w.x) / h.a};
        }
    }
    return frame;
}

// Offset from the cycle after `returns` applications of the return map, treating the
// computed cycle as exact so that round-off in the base point is not amplified.
ComplexPair transport_offset(const SeriesParametrization& xi, ComplexPair delta, int returns)
{
    const auto& factors = xi.map->factors();
    const std::size_t m = factors.size();
    const std::size_t len = xi.frame.size();
    const bool fwd = xi.direction() == Direction::forward;
    for (std::size_t s = 0; s < len * static_cast<std::size_t>(returns); ++s) {
        const ComplexPair& b = xi.frame[s % len];
        if (fwd) {
            const auto& h = factors[s % m];
            delta = {poly_increment(h.p, b.x, delta.x) - h.a * delta.y, delta.x};
        } else {
            const auto& h = factors[m - 1 - s % m];
            delta = {delta.y, (poly_increment(h.p, b.y, delta.y) - delta.x) / h.a};
        }
        if (!delta.finite() || delta.max_norm() > kOverflowRadius) break;
    }
    return delta;
}

ComplexPair series_offset(const SeriesParametrization& xi, Complex t)
{
    ComplexPair acc{};
    for (auto it = xi.coeffs.rbegin(); it != xi.coeffs.rend(); ++it) acc = (acc + *it) * t;
    return acc;
}

Image evaluate_at_depth(const SeriesParametrization& xi, Complex t, int depth)
{
    ComplexPair delta = series_offset(xi, t / cpow(xi.nu, depth));
    if (depth > 0) delta = transport_offset(xi, delta, depth);
    const ComplexPair w = xi.point() + delta;
    return {w, !(w.finite() && w.max_norm() <= kOverflowRadius)};
}

} // namespace

SeriesParametrization linearize(const HenonMap& f, const Saddle& s, Side side, const SeriesOptions& opt)
{
    if (opt.order < 2) throw std::invalid_argument("series order must be at least 2");
    const Direction dir = side == Side::unstable ? Direction::forward : Direction::backward;
    const Saddle sd = side == Side::unstable ? s : inverse_saddle(f, s);
    const int n = s.period;
    const ComplexPair p = s.point();
    const Mat2 a = iterate_jacobian(f, p, dir == Direction::forward ? n : -n);

    SeriesParametrization xi{s, side, std::make_shared<const HenonMap>(f), {}, sd.nu_u, 1.0, 0.0, {}};
    xi.coeffs.reserve(static_cast<std::size_t>(opt.order));
    xi.coeffs.push_back(sd.e_u);

    for (int k = 2; k <= opt.order; ++k) {
        // Order-k coefficient of F applied to the degree-(k-1) partial series.
        SeriesPair jet(k);
        jet.set_coeff(0, p);
        for (int j = 1; j < k; ++j) jet.set_coeff(j, xi.coeffs[static_cast<std::size_t>(j - 1)]);
        for (int i = 0; i < n; ++i) jet = f.step(jet, dir);
        const ComplexPair rhs = jet.coeff(k);

        const Complex nuk = cpow(sd.nu_u, k);
        if (std::abs(nuk - sd.nu_s) < 1e-10 || std::abs(nuk - sd.nu_u) < 1e-10)
            throw std::runtime_error("resonant multipliers at order " + std::to_string(k) +
                                     "; the cycle is not a saddle");
        const Mat2 m = nuk * Mat2::Identity() - a;
        xi.coeffs.push_back(ComplexPair::from(m.partialPivLu().solve(rhs.vec())));
    }
    xi.r_valid = validity_radius(xi.coeffs, opt.series_tol, f.filtration_radius());
    xi.frame = cycle_frame(f, p, n, dir);
    return xi;
}

SeriesParametrization polynomial_curve(const ComplexPair& base, std::vector<ComplexPair> coeffs)
{
    SeriesParametrization xi;
    xi.base.period = 1;
    xi.base.cycle = {base};
    xi.coeffs = std::move(coeffs);
    xi.nu = 1.0;
    xi.r_valid = std::numeric_limits<double>::infinity();
    return xi;
}

double validity_radius(const std::vector<ComplexPair>& coeffs, double tol, double excursion)
{
    int t = static_cast<int>(coeffs.size());
    while (t > 0 && coeffs[static_cast<std::size_t>(t - 1)].norm() == 0.0) --t;

    // Radius where the majorant sum |a_k| r^k reaches the excursion bound.
    auto majorant = [&](double r) {
        double acc = 0.0;
        for (int k = t; k >= 1; --k) acc = (acc + coeffs[static_cast<std::size_t>(k - 1)].norm()) * r;
        return acc;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (majorant(hi) < excursion && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) (majorant(0.5 * (lo + hi)) < excursion ? lo : hi) = 0.5 * (lo + hi);
    double r = lo;

    if (t == static_cast<int>(coeffs.size()) && t >= 2) {
        const double last = coeffs[static_cast<std::size_t>(t - 1)].norm();
        double ratio = 0.0;
        for (int k = std::max(2, t - 4); k <= t; ++k) {
            const double prev = coeffs[static_cast<std::size_t>(k - 2)].norm();
            const double cur = coeffs[static_cast<std::size_t>(k - 1)].norm();
            if (prev > 0.0) ratio = std::max(ratio, cur / prev);
        }
        // tail(r) <= last r^T (q r) / (1 - q r) <= 2 last q r^{T+1} once q r <= 1/2
        if (ratio > 0.0) {
            r = std::min(r, std::pow(tol / (2.0 * last * ratio), 1.0 / (t + 1)));
            r = std::min(r, 0.5 / ratio);
        }
    }
    return r;
}

ComplexPair sum_series(const SeriesParametrization& xi, Complex t) { return xi.point() + series_offset(xi, t); }

int extension_depth(const SeriesParametrization& xi, Complex t)
{
    const double mag = std::abs(t);
    if (mag <= xi.r_valid) return 0;
    const double growth = std::abs(xi.nu);
    int k = std::max(1, static_cast<int>(std::ceil(std::log(mag / xi.r_valid) / std::log(growth))));
    while (k > 1 && mag / std::pow(growth, k - 1) <= xi.r_valid) --k;
    while (mag / std::pow(growth, k) > xi.r_valid) ++k;
    return k;
}

Image evaluate_series(const SeriesParametrization& xi, Complex t)
{
    return evaluate_at_depth(xi, t, extension_depth(xi, t));
}

CurvePoint evaluate_series_with_derivative(const SeriesParametrization& xi, Complex t)
{
    const int depth = extension_depth(xi, t);
    const Complex scale = cpow(xi.nu, depth);
    const Complex s = t / scale;
    ComplexPair z{};
    ComplexPair dz{};
    for (int k = xi.order(); k >= 1; --k) {
        const auto& a = xi.coeffs[static_cast<std::size_t>(k - 1)];
        dz = dz * s + a * static_cast<double>(k);
        z = (z + a) * s;
    }
    dz = dz / scale;
    if (depth == 0) return {xi.point() + z, dz, false};
    const Direction dir = xi.direction();
    ComplexPair w = xi.point() + z;
    for (int i = 0; i < depth * xi.period(); ++i) {
        dz = xi.map->step_jacobian(w, dir) * dz;
        w = xi.map->step(w, dir);
    }
    const Image img = evaluate_at_depth(xi, t, depth);
    return {img.z, dz, img.escaped || !dz.finite()};
}

double green_on_curve(const SeriesParametrization& xi, Complex t, const GreenOptions& g)
{
    const int depth = extension_depth(xi, t);
    const ComplexPair w = sum_series(xi, t / cpow(xi.nu, depth));
    const double base = green(*xi.map, w, xi.direction(), g).value;
    return base * std::pow(static_cast<double>(xi.map->degree()), depth * xi.period());
}

double cross_green_on_curve(const SeriesParametrization& xi, Complex t, double pullback, double max_scale,
                            const GreenOptions& g)
{
    const double limit = pullback * xi.r_valid;
    const double per_step = std::pow(static_cast<double>(xi.map->degree()), -xi.period());
    double scale = 1.0;
    int k = 0;
    while ((std::abs(t) > limit || scale > max_scale) && k < 4000) {
        t /= xi.nu;
        scale *= per_step;
        ++k;
    }
    const double base = green(*xi.map, sum_series(xi, t), reverse(xi.direction()), g).value;
    return base * std::pow(static_cast<double>(xi.map->degree()), -static_cast<double>(k) * xi.period());
}

double circle_max(const std::function<double(Complex)>& g, Complex center, double r, int samples)
{
    std::vector<double> values(static_cast<std::size_t>(samples));
    auto at = [&](double theta) { return g(center + std::polar(r, theta)); };
    for (int i = 0; i < samples; ++i) values[static_cast<std::size_t>(i)] = at(kTwoPi * i / samples);

    std::vector<int> peaks;
    for (int i = 0; i < samples; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        const double left = values[static_cast<std::size_t>((i + samples - 1) % samples)];
        const double right = values[static_cast<std::size_t>((i + 1) % samples)];
        if (v > 0.0 && v >= left && v >= right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        const double va = values[static_cast<std::size_t>(a)];
        const double vb = values[static_cast<std::size_t>(b)];
        return va != vb ? va > vb : a < b;
    });
    double best = *std::max_element(values.begin(), values.end());
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t p = 0; p < std::min<std::size_t>(3, peaks.size()); ++p) {
        double lo = kTwoPi * (peaks[p] - 1) / samples;
        double hi = kTwoPi * (peaks[p] + 1) / samples;
        double c = hi - invphi * (hi - lo);
        double d = lo + invphi * (hi - lo);
        double fc = at(c);
        double fd = at(d);
        while (hi - lo > 1e-11) {
            if (fc >= fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - invphi * (hi - lo);
                fc = at(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + invphi * (hi - lo);
                fd = at(d);
            }
        }
        best = std::max({best, fc, fd});
    }
    return best;
}

double circle_max_green(const SeriesParametrization& xi, double r, const GreenOptions& g)
{
    if (r <= 0.0) return green(*xi.map, xi.point(), xi.direction(), g).value;
    return circle_max([&](Complex t) { return green_on_curve(xi, t, g); }, 0.0, r);
}

double growth_radius(const std::function<double(double)>& m, double level, double start, double rel_tol)
{
    double lo = 0.0;
    double hi = start;
    int doublings = 0;
    while (m(hi) < level) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200)
            throw std::runtime_error("growth bracket failed: G stays below the target level on the sampled "
                                     "curve; increase the Green iteration budget");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (m(mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SeriesParametrization normalize(const SeriesParametrization& xi, const NormalizeOptions& opt)
{
    const double alpha = growth_radius([&](double r) { return circle_max_green(xi, r, opt.green); }, 1.0,
                                       xi.r_valid, opt.rel_tol);
    SeriesParametrization out = xi;
    double scale = 1.0;
    for (auto& a : out.coeffs) {
        scale *= alpha;
        a = a * scale;
    }
    out.alpha = xi.alpha * alpha;
    out.r_valid = xi.r_valid / alpha;
    return out;
}

double functional_residual(const SeriesParametrization& xi, int samples)
{
    const double r = xi.r_valid / std::abs(xi.nu);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Complex t = std::polar(r, kTwoPi * i / samples);
        const ComplexPair lhs = apply_return(*xi.map, sum_series(xi, t), xi.period(), xi.direction());
        const ComplexPair rhs = sum_series(xi, xi.nu * t);
        worst = std::max(worst, distance(lhs, rhs));
    }
    return worst;
}

double extension_discrepancy(const SeriesParametrization& xi, double radius, int samples)
{
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Complex t = std::polar(radius, kTwoPi * i / samples);
        const int k = extension_depth(xi, t);
        const Image a = evaluate_at_depth(xi, t, k);
        const Image b = evaluate_at_depth(xi, t, k + 1);
        if (a.escaped || b.escaped) continue;
        worst = std::max(worst, distance(a.z, b.z));
    }
    return worst;
}

LambdaResult lambda_of(const HenonMap& f, const SeriesParametrization& psi_x, const SeriesParametrization& psi_next)
{
    const ComplexPair v = jacobian(f, psi_x.point(), psi_x.direction()) * psi_x.derivative_at_origin();
    const ComplexPair w = psi_next.derivative_at_origin();
    LambdaResult out;
    out.lambda = inner(w, v) / inner(w, w);
    out.mismatch = (v - out.lambda * w).norm() / v.norm();
    if (out.mismatch > 1e-6)
        throw std::runtime_error("parametrizations do not match: Df(x) psi_x'(0) is not parallel to psi_fx'(0)");
    return out;
}

SharpMetric sharp_metric(const SeriesParametrization& psi)
{
    const ComplexPair d = psi.derivative_at_origin();
    const double len = d.norm();
    return {psi.point(), d / Complex(len), 1.0 / len};
}

double sharp_norm(const SharpMetric& m, const ComplexPair& v)
{
    const double len = v.norm();
    if (len == 0.0) return 0.0;
    if (line_angle(v, m.direction) > 1e-8)
        throw std::invalid_argument("vector is not tangent to the unstable direction");
    return len * m.scale;
}

} // namespace henon
