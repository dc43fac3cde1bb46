#include "henon/curve.hpp"

#include <cmath>
#include <stdexcept>

namespace henon {

ComplexPair CurveJet::evaluate(Complex t) const
{
    ComplexPair acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * t;
    return base + acc;
}

CurveParam::CurveParam(std::shared_ptr<const SeriesParametrization> series, Complex center, double scale)
    : series_(std::move(series)), center_(center), scale_(scale)
{
    if (!series_) throw std::invalid_argument("curve needs a series parametrization");
    if (!(scale > 0.0)) throw std::invalid_argument("curve scale must be positive");
}

ComplexPair CurveParam::base() const
{
    if (center_ == Complex{}) return series_->point();
    return evaluate_series(*series_, center_).z;
}

Image CurveParam::evaluate(Complex t) const { return evaluate_series(*series_, center_ + scale_ * t); }

CurvePoint CurveParam::evaluate_with_derivative(Complex t) const
{
    CurvePoint p = evaluate_series_with_derivative(*series_, center_ + scale_ * t);
    p.dz = p.dz * Complex(scale_);
    return p;
}

ComplexPair CurveParam::derivative_at_origin() const
{
    if (center_ == Complex{}) return series_->derivative_at_origin() * Complex(scale_);
    return evaluate_with_derivative(0.0).dz;
}

double CurveParam::green(Complex t, const GreenOptions& g) const
{
    return green_on_curve(*series_, center_ + scale_ * t, g);
}

double CurveParam::cross_green(Complex t, const GreenOptions& g) const
{
    return cross_green_on_curve(*series_, center_ + scale_ * t, 1e-6, 1e-4, g);
}

double CurveParam::circle_max_green(double r, const GreenOptions& g) const
{
    if (r <= 0.0) return green(0.0, g);
    return circle_max([&](Complex t) { return green(t, g); }, 0.0, r);
}

CurveJet CurveParam::jet(int order) const
{
    if (order < 1) throw std::invalid_argument("jet order must be positive");
    const SeriesParametrization& xi = *series_;
    CurveJet out;
    if (center_ == Complex{}) {
        out.base = xi.point();
        Complex s = 1.0;
        for (int j = 1; j <= order; ++j) {
            s *= scale_;
            out.coeffs.push_back(j <= xi.order() ? xi.coeffs[static_cast<std::size_t>(j - 1)] * s : ComplexPair{});
        }
        return out;
    }

    // xi(center + scale t) = F^k(xi_0((center + scale t) / nu^k)): re-expand the polynomial at
    // the shifted point, then push the jet through F^k.
    const int depth = extension_depth(xi, center_);
    Complex nuk = 1.0;
    for (int i = 0; i < depth; ++i) nuk *= xi.nu;
    Series u(order);
    u[0] = center_ / nuk;
    u[1] = scale_ / nuk;
    SeriesPair acc(order);
    for (int j = xi.order(); j >= 1; --j) {
        const ComplexPair& a = xi.coeffs[static_cast<std::size_t>(j - 1)];
        acc.x[0] += a.x;
        acc.y[0] += a.y;
        acc.x = acc.x * u;
        acc.y = acc.y * u;
    }
    acc.x[0] += xi.point().x;
    acc.y[0] += xi.point().y;
    if (depth > 0) {
        if (!xi.map) throw std::logic_error("extension needs the map");
        for (int i = 0; i < depth * xi.period(); ++i) acc = xi.map->step(acc, xi.direction());
    }
    out.base = acc.coeff(0);
    for (int j = 1; j <= order; ++j) out.coeffs.push_back(acc.coeff(j));
    return out;
}

CurveParam CurveParam::rescaled(double factor) const { return CurveParam(series_, center_, scale_ * factor); }

CurveParam normalize_at(std::shared_ptr<const SeriesParametrization> xi, Complex center, const NormalizeOptions& opt)
{
    const SeriesParametrization& s = *xi;
    auto m = [&](double r) {
        return circle_max([&](Complex t) { return green_on_curve(s, t, opt.green); }, center, r);
    };
    const double start = std::max(1e-3 * s.r_valid, 1e-12);
    const double alpha = growth_radius(m, 1.0, start, opt.rel_tol);
    return CurveParam(std::move(xi), center, alpha);
}

} // namespace henon
