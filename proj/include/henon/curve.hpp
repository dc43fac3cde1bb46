#pragma once

#include <memory>
#include <vector>

#include "henon/uniformize.hpp"

namespace henon {

// Taylor jet psi(t) = base + sum_{j=1}^T a_j t^j.
struct CurveJet {
    ComplexPair base;
    std::vector<ComplexPair> coeffs; // a_1..a_T

    int order() const { return static_cast<int>(coeffs.size()); }
    ComplexPair evaluate(Complex t) const;
};

// psi(t) = xi(center + scale t) for a series parametrization xi. A plain normalized series
// has center 0 and scale 1; recentered members sit at a point of the curve away from its
// base point.
class CurveParam {
public:
    CurveParam() = default;
    explicit CurveParam(std::shared_ptr<const SeriesParametrization> series, Complex center = {}, double scale = 1.0);

    const SeriesParametrization& series() const { return *series_; }
    Complex center() const { return center_; }
    double scale() const { return scale_; }
    Side side() const { return series_->side; }
    Direction direction() const { return series_->direction(); }
    bool valid() const { return static_cast<bool>(series_); }

    ComplexPair base() const;
    Image evaluate(Complex t) const;
    CurvePoint evaluate_with_derivative(Complex t) const;
    ComplexPair derivative_at_origin() const;

    // G along the curve, using the side's Green function.
    double green(Complex t, const GreenOptions& g = {}) const;
    // The other side's Green function at psi(t), pulled back along the curve.
    double cross_green(Complex t, const GreenOptions& g = {}) const;
    // m_psi(r) = max_{|t| <= r} G(psi(t)).
    double circle_max_green(double r, const GreenOptions& g = {}) const;

    // Taylor jet of order T at t = 0, re-expanded through the functional equation when the
    // center lies past r_valid.
    CurveJet jet(int order) const;

    // Same curve with t -> factor t.
    CurveParam rescaled(double factor) const;

private:
    std::shared_ptr<const SeriesParametrization> series_;
    Complex center_{};
    double scale_ = 1.0;
};

// Recenters xi at t = center and rescales so that max_{|t|<=1} G(psi(t)) = 1.
CurveParam normalize_at(std::shared_ptr<const SeriesParametrization> xi, Complex center,
                        const NormalizeOptions& opt = {});

} // namespace henon
