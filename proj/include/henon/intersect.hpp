#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "henon/curve.hpp"
#include "henon/family.hpp"

namespace henon {

struct IntersectionRecord {
    Complex zeta_u;
    Complex zeta_s;
    ComplexPair point;
    double residual = 0.0; // ||psi_u(zeta_u) - psi_s(zeta_s)||
    double angle = 0.0;    // between the tangent complex lines, in [0, pi/2]
    int mu = 1;
    int k = 0;             // tangency order mu - 1
    bool tangency_suspect = false; // reached through the singular-Jacobian pipeline
    bool counters_disagree = false;
    int mu_perturbation = 0;
    int mu_argument = 0;
};

struct IntersectOptions {
    int seeds = 12;          // grid points per axis in each parameter disk
    double dedup = 1e-8;
    double cluster = 1e-2;   // merge radius for tangency-suspect records
    double residual_tol = 1e-10;
    double angle_tol = 1e-4;
    int max_newton = 60;
};

// Zeros of H(zu, zs) = psi_u(zu) - psi_s(zs) with |zu| <= ru, |zs| <= rs, by Newton from a
// seeds x seeds grid pairing (pairs whose images are far apart are skipped). Seeds with a
// singular Jacobian go through a damped least-squares search and come back as tangency
// suspects; suspects and records below angle_tol are merged per cluster. Records are sorted
// by (zeta_u, zeta_s).
std::vector<IntersectionRecord> find_intersections(const CurveParam& psi_u, const CurveParam& psi_s, double ru,
                                                   double rs, const IntersectOptions& opt = {});

struct MultiplicityOptions {
    double eps = 1e-6;    // perturbation size relative to the local scale
    int directions = 8;
    double radius = 0.2;  // cluster ball in zeta_u; shrunk to isolate the record
    std::uint64_t seed = 1;
    int arg_samples = 512;
};

struct MultiplicityResult {
    int mu = 0;
    int by_perturbation = 0;
    int by_argument = 0;
    bool agree = true;
    std::vector<int> counts; // per perturbation direction
};

// Local intersection multiplicity at a record: modal number of solutions of H = eps over
// random directions, cross-checked by the winding number of the normal offset of psi_u from
// psi_s around the record. On disagreement the larger count is reported.
MultiplicityResult multiplicity(const CurveParam& psi_u, const CurveParam& psi_s, const IntersectionRecord& rec,
                                const MultiplicityOptions& opt = {});

// Truncated Taylor jet of a series parametrization at t = 0.
CurveJet jet_of(const CurveParam& psi, int order);

// f^n o jet to order T (n < 0 uses f^{-1}); coefficient j is divided by lambda^j when given.
CurveJet jet_of_pushforward(const HenonMap& f, const CurveJet& jet, int n, int order,
                            std::optional<Complex> lambda = std::nullopt);

struct DecayRow {
    int n = 0;
    double lambda = 0.0;     // |lambda_n|
    double mu = 0.0;         // |mu_n|
    std::vector<double> a;   // |a_bar_{j,n}|, j = 1..k+1
    double law_residual = 0.0;
};

struct DecayTable {
    int k = 0;
    double kappa = 0.0;
    std::vector<DecayRow> rows;
    std::vector<double> exponent;  // fitted slope of log |a_bar_{j,n}| in n, j = 1..k+1
    double target = 0.0;           // -2 log kappa
    bool bound_ok = false;         // exponent_j <= (1 - slack) target for j <= k
    bool within_slack = false;     // |exponent_j - target| <= slack |target| for j <= k
    bool top_persists = false;     // |a_bar_{k+1,n}| bounded below
    double max_law_residual = 0.0;
};

struct TangentPair {
    CurveJet unstable; // psi_u(zeta) = psi_s(c zeta) + O(zeta^{k+1})
    CurveJet stable;
    Complex c;
    Complex mu_step; // stable multiplier per application of f at the base point
    int k = 0;
};

// Stable jet from the normalized stable series at a fixed saddle; the unstable jet agrees with
// it through order k after zeta -> c zeta and gains `kick` e_u zeta^{k+1}.
TangentPair manufacture_tangent_pair(const HenonMap& f, const Saddle& s, int k, Complex c = 1.0, double kick = 1.0,
                                     int order = 12);

struct DecayOptions {
    int n_min = 2; // first push included in the fit
    double slack = 0.1;
    double floor = 1e-13; // a column's fit stops at the first |a_bar| below floor * its n = 0 value
};

// Pushes both jets by f^n, n = 0..n_max. lambda_n comes from the G+ growth of the unstable
// jet, mu_n = mu_step^n; a_bar_{j,n} = [f^n o J_u]_j / lambda_n^j.
DecayTable tangency_decay_experiment(const HenonMap& f, const TangentPair& pair, double kappa, int n_max,
                                     const DecayOptions& opt = {});

struct PairScan {
    int member_u = -1;
    int member_s = -1;
    std::vector<IntersectionRecord> records;
};

struct TransversalityReport {
    std::vector<PairScan> scans;
    int records = 0;
    double min_angle = 0.0;
    int max_mu = 0;
    std::vector<int> angle_histogram; // 10 bins over [0, pi/2]
    std::vector<int> mu_histogram;    // index mu - 1
    std::vector<double> nearest_nontrivial; // per member: closest record point other than the base
    int suspects = 0;
    int disagreements = 0;
    std::string verdict;
};

struct TransversalityOptions {
    double ru = 1.0;
    double rs = 1.0;
    IntersectOptions intersect{};
    MultiplicityOptions multiplicity{};
    int jobs = 1;
};

// All (unstable member, stable member) pairs of two families, scanned for intersections.
TransversalityReport transversality_report(const CurveFamily& fam_s, const CurveFamily& fam_u,
                                           const TransversalityOptions& opt = {});

} // namespace henon
