#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "henon/curve.hpp"
#include "henon/saddles.hpp"
#include "henon/uniformize.hpp"

namespace henon {

enum class FamilyKind { saddle, recentered };

inline const char* to_string(FamilyKind k) { return k == FamilyKind::saddle ? "saddle" : "recentered"; }

struct FamilyMember {
    ComplexPair base;
    CurveParam unstable; // either curve may be absent on recentered members
    CurveParam stable;
    int cycle = -1;      // saddle kind: index into CurveFamily::saddles
    int position = 0;    // saddle kind: base = saddles[cycle].cycle[position]
    Complex zeta{};      // recentered kind: parameter of base on the anchor's normalized curve

    const CurveParam& curve(Side s) const { return s == Side::unstable ? unstable : stable; }
};

struct CurveFamily {
    FamilyKind kind = FamilyKind::saddle;
    std::shared_ptr<const HenonMap> map;
    std::vector<FamilyMember> members;
    std::vector<Saddle> saddles; // per cycle (saddle kind) or the anchor (recentered kind)
    std::string source;
    int requested = 0; // recentered kind: samples asked for per side
    int skipped = 0;   // saddle kind: non-hyperbolic roots left out

    // Member based at f(x) / f^{-1}(x) within the same cycle; -1 for recentered families.
    int successor(std::size_t i) const;
    int predecessor(std::size_t i) const;
};

struct FamilyOptions {
    SeriesOptions series{};
    NormalizeOptions normalize{};
    PeriodicSearchOptions search{};
    int jobs = 1;
};

// One member per saddle point of period <= n_max, both sides linearized and normalized.
CurveFamily build_saddle_family(const HenonMap& f, int n_max, const FamilyOptions& opt = {});

struct RecenterOptions {
    double inner = 0.05; // annulus in the anchor's normalized parameter
    double outer = 1.0;
    int rings = 6;          // lattice of descent starts
    int spokes = 16;
    int filter_steps = 16; // iteration budget of the K+ / K- membership filter
    bool stable_side = true;
};

// Members psi_y(zeta) = xi_q(alpha zeta + zeta_y) at points y on W^u(q) passing the K+ filter,
// and the mirror construction on W^s(q) with K-. Each lattice point is first moved downhill
// in G along the curve; survivors are taken in order of increasing G, at least a quarter
// radial lattice spacing apart. Fewer than `samples` is not an error.
CurveFamily build_recentered_family(const HenonMap& f, const Saddle& q, int samples, const FamilyOptions& opt = {},
                                    const RecenterOptions& rc = {});

struct MemberLambda {
    int member = -1;
    int next = -1;
    Complex lambda;         // from Df psi_x'(0) = lambda psi_fx'(0)
    Complex lambda_matched; // s / t with psi_fx(s) = f(psi_x(t)) at a finite t
    double mismatch = 0.0;
};

// lambda for every saddle-family member on the given side (f for unstable, f^{-1} for stable).
std::vector<MemberLambda> member_lambdas(const CurveFamily& fam, Side side = Side::unstable, int jobs = 1);

struct GrowthOptions {
    Side side = Side::unstable;
    GreenOptions green{};
    double rel_tol = 1e-12;
    int jobs = 1;
};

struct GrowthProfile {
    Side side = Side::unstable;
    std::vector<double> r_grid;
    std::vector<double> m_of_r; // inf over members of m_psi(r)
    std::vector<double> M_of_r; // sup over members
    std::vector<double> member_radius; // r with m_psi(r) = deg
    double kappa = 0.0;                // M(kappa) = deg, i.e. min of member_radius
    int kappa_member = -1;
};

GrowthProfile growth_profile(const CurveFamily& fam, const std::vector<double>& r_grid, const GrowthOptions& opt = {});

struct DiskOptions {
    int rays = 256;
    int radial_nodes = 24;    // Gauss-Legendre nodes per ray for the area
    double max_extent = 256.0; // search bound along a ray, in units of r / |psi'(0)|
};

struct LocalDisk {
    int owner = -1;
    double r = 0.0;
    std::vector<double> radii;     // boundary distance along each ray
    std::vector<Complex> boundary; // radii[i] e^{2 pi i / rays}
    double area = 0.0;
    double rho_in = 0.0;
    double rho_out = 0.0;
    bool star_shaped = true;
    double boundary_error = 0.0; // max | ||psi(boundary) - x|| - r |

    // Boundary radius in direction theta, interpolated between rays.
    double radius_at(double theta) const;
    bool contains(Complex zeta) const { return std::abs(zeta) < radius_at(std::arg(zeta)); }
};

// Component of psi^{-1}(B(psi(0), r)) containing 0, traced along rays from the origin.
LocalDisk local_disk(const CurveParam& psi, double r, const DiskOptions& opt = {});

std::vector<LocalDisk> local_disks(const CurveFamily& fam, double r, Side side = Side::unstable,
                                   const DiskOptions& opt = {}, int jobs = 1);

// Image points psi(s radii(theta) e^{i theta}) for s in {0, 1/rings, ..., 1} on `rays` rays.
std::vector<ComplexPair> disk_samples(const CurveParam& psi, const LocalDisk& d, int rings = 4, int rays = 64);

// Symmetric Hausdorff distance between the sampled images of two disks.
double disk_hausdorff(const CurveParam& a, const LocalDisk& da, const CurveParam& b, const LocalDisk& db);

// Smallest distance between the sampled images of two disks.
double disk_separation(const CurveParam& a, const LocalDisk& da, const CurveParam& b, const LocalDisk& db);

struct ContractionOptions {
    int fit_steps = 6;       // backward steps in the distance regression
    int inclusion_rays = 64;
    int escape_max = 80;
    int margin = 2;
    double rate_slack = 0.1;
    int jobs = 1;
};

struct PairRate {
    int member = -1;
    double rate = 0.0; // -slope of log dist(f^{-n} y', f^{-n} y'') in n
    double r_squared = 0.0;
};

struct EscapeRecord {
    int member = -1;
    Complex zeta;
    int predicted = 0;
    int measured = -1; // -1 if still inside after escape_max steps
};

struct ContractionReport {
    double kappa = 0.0;
    double rho1 = 0.0; // inf rho_in
    double rho2 = 0.0; // sup rho_out
    int n_threshold = 0;
    int inclusion_samples = 0;
    int inclusion_failures = 0;
    double inclusion_route_error = 0.0;
    std::vector<PairRate> pairs;
    int slowest = -1; // index into pairs
    bool rates_ok = false;   // every rate >= (1 - slack) log kappa
    bool slowest_ok = false; // slowest rate within slack of log kappa
    std::vector<EscapeRecord> escapes;
    bool escapes_ok = false;
};

// Backward inclusion f^{-N}(W^u_{x,r}) in W^u_{f^{-N}x,r}, backward pair contraction rates and
// forward escape times of recentered neighbours (from `neighbours`, anchored at a member).
ContractionReport contraction_check(const CurveFamily& fam, const GrowthProfile& profile,
                                    const std::vector<LocalDisk>& disks, const CurveFamily* neighbours = nullptr,
                                    const ContractionOptions& opt = {});

struct TauOptions {
    double radius = 1e-9;     // members with base within this distance count as nearby
    double threshold = 1e-5;  // relative size separating a vanishing coefficient
    int order = 8;
};

struct OrderEstimate {
    ComplexPair at;
    int tau_s = 0;
    int tau_u = 0;
    double gamma_u = 0.0;
    int members_s = 0;
    int members_u = 0;
    std::vector<double> evidence_u; // |a_j| of the member fixing tau_u
    std::vector<double> evidence_s;

    std::string stratum() const;
};

// First index j with |a_j| > threshold max_k |a_k| over nearby members; empty if a side has
// no nearby member.
std::optional<OrderEstimate> estimate_tau(const CurveFamily& fam, const ComplexPair& x, const TauOptions& opt = {});

struct StratumRow {
    int m_s = 0;
    int m_u = 0;
    int count = 0;
    bool maximal = false;
};

struct StrataTable {
    std::vector<StratumRow> rows; // sorted by (m_s, m_u)
    int samples = 0;
    int undefined = 0;
    double fraction_11 = 0.0;
};

StrataTable stratify(const CurveFamily& fam, const std::vector<ComplexPair>& samples, const TauOptions& opt = {});

} // namespace henon
