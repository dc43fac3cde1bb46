#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "henon/green.hpp"
#include "henon/henon_map.hpp"
#include "henon/saddles.hpp"

namespace henon {

enum class Side { stable, unstable };

inline const char* to_string(Side s) { return s == Side::stable ? "stable" : "unstable"; }

struct SeriesOptions {
    int order = 40;           // truncation degree T
    double series_tol = 1e-12; // tail bound defining r_valid
};

// xi(t) = p + sum_{k=1}^T a_k t^k with F(xi(t)) = xi(nu t), where F is the first-return map
// f^N (unstable side) or f^{-N} (stable side) and |nu| > 1 is its expanding multiplier.
// Evaluation past r_valid goes through the functional equation.
struct SeriesParametrization {
    Saddle base;  // saddle data for f, based at the parametrized point
    Side side = Side::unstable;
    std::shared_ptr<const HenonMap> map; // null for synthetic polynomial curves
    std::vector<ComplexPair> coeffs; // a_1..a_T
    Complex nu;
    double alpha = 1.0; // accumulated rescaling t -> alpha t relative to the unit-eigenvector series
    double r_valid = 0.0;
    std::vector<ComplexPair> frame; // factor-level orbit of the base point over one return

    int order() const { return static_cast<int>(coeffs.size()); }
    int period() const { return base.period; }
    const ComplexPair& point() const { return base.point(); }
    Direction direction() const { return side == Side::unstable ? Direction::forward : Direction::backward; }
    ComplexPair derivative_at_origin() const { return coeffs.front(); }
};

SeriesParametrization linearize(const HenonMap& f, const Saddle& s, Side side, const SeriesOptions& opt = {});

// Polynomial curve base + sum a_k t^k with no dynamics attached (r_valid is infinite).
SeriesParametrization polynomial_curve(const ComplexPair& base, std::vector<ComplexPair> coeffs);

// Largest radius where the geometric tail estimate from the last coefficients is <= tol,
// capped where the majorant sum |a_k| r^k reaches `excursion` so summation round-off stays
// at the scale of the filtration bidisk.
double validity_radius(const std::vector<ComplexPair>& coeffs, double tol, double excursion);

// Direct power-sum evaluation, no domain extension.
ComplexPair sum_series(const SeriesParametrization& xi, Complex t);

Image evaluate_series(const SeriesParametrization& xi, Complex t);

// Point and derivative d/dt xi(t), extended by the chain rule past r_valid.
struct CurvePoint {
    ComplexPair z;
    ComplexPair dz;
    bool escaped = false;
};
CurvePoint evaluate_series_with_derivative(const SeriesParametrization& xi, Complex t);

// Number of return-map applications the extension uses for t (0 inside r_valid).
int extension_depth(const SeriesParametrization& xi, Complex t);

// G+ (unstable side) or G- (stable side) at xi(t), evaluated at xi(t / nu^k) and scaled by
// deg^{Nk} so that points far out on the curve never need to be formed explicitly.
double green_on_curve(const SeriesParametrization& xi, Complex t, const GreenOptions& g = {});

// The other side's Green function (G- on an unstable curve, G+ on a stable one) at xi(t),
// as deg^{-Nk} G(xi(t / nu^k)) with k the first depth where |t / nu^k| <= pullback * r_valid
// and deg^{-Nk} <= max_scale. Direct evaluation at a point of the curve bottoms out near 1e-5
// when the transverse multiplier is strong: the point is only known to round-off
// transversally to the curve, and G grows from the curve like a small power of that offset.
double cross_green_on_curve(const SeriesParametrization& xi, Complex t, double pullback = 1e-6,
                            double max_scale = 1e-4, const GreenOptions& g = {});

// max of g over the circle |t - center| = r: uniform samples, then golden-section refinement
// of the three largest local maxima.
double circle_max(const std::function<double(Complex)>& g, Complex center, double r, int samples = 256);

// m(r) = max_{|t| <= r} G(xi(t)), taken on the circle |t| = r (G o xi is subharmonic).
double circle_max_green(const SeriesParametrization& xi, double r, const GreenOptions& g = {});

// Smallest r > 0 with m(r) = level for a nondecreasing m with m(0) < level, by doubling from
// `start` and bisecting to relative width rel_tol. Throws std::runtime_error if no bracket.
double growth_radius(const std::function<double(double)>& m, double level, double start, double rel_tol = 1e-15);

struct NormalizeOptions {
    double rel_tol = 1e-15;
    GreenOptions green{};
};

// Rescales t -> alpha t, alpha > 0, so that max_{|t|<=1} G(xi(t)) = 1.
SeriesParametrization normalize(const SeriesParametrization& xi, const NormalizeOptions& opt = {});

// Functional-equation residual max ||F(xi(t)) - xi(nu t)|| over samples with |nu t| = r_valid,
// both sides by direct summation.
double functional_residual(const SeriesParametrization& xi, int samples = 64);

// Max difference between the depth-k and depth-(k+1) extension routes on |t| = radius.
double extension_discrepancy(const SeriesParametrization& xi, double radius, int samples = 64);

struct LambdaResult {
    Complex lambda;
    double mismatch = 0.0; // ||Df v - lambda w|| / ||Df v||
};

// lambda with F1(psi_x(t)) = psi_next(lambda t), F1 = f or f^{-1} following psi_x's side.
// Throws std::runtime_error when the two derivative directions disagree by more than 1e-6.
LambdaResult lambda_of(const HenonMap& f, const SeriesParametrization& psi_x, const SeriesParametrization& psi_next);

struct SharpMetric {
    ComplexPair at;
    ComplexPair direction; // unit vector spanning E^u
    double scale = 1.0;    // 1 / |psi'(0)|
};

SharpMetric sharp_metric(const SeriesParametrization& psi);

// ||v||# = |v| * scale; v must lie on the metric's line within 1e-8 rad.
double sharp_norm(const SharpMetric& m, const ComplexPair& v);

} // namespace henon
