// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "henon/family.hpp"
#include "henon/green.hpp"
#include "henon/intersect.hpp"
#include "henon/saddles.hpp"
#include "henon/uniformize.hpp"

using namespace henon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string format(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const HenonMap& horseshoe()
{
    static const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    return f;
}

std::vector<Saddle> saddles_up_to(int n_max)
{
    std::vector<Saddle> out;
    for (int n = 1; n <= n_max; ++n)
        for (const Cycle& c : find_periodic(horseshoe(), n).cycles) {
            const Classification cl = classify(horseshoe(), c);
            if (!cl.saddle) continue;
            for (int k = 0; k < n; ++k) out.push_back(rebase(horseshoe(), *cl.saddle, k));
        }
    return out;
}

Outcome fixed_points()
{
    const PeriodicSearch ps = find_periodic(horseshoe(), 1);
    if (ps.solutions.size() != 2) return {false, format("%zu fixed points", ps.solutions.size())};
    double root_err = 0.0, mult_err = 0.0;
    for (double sgn : {1.0, -1.0}) {
        const double x = (1.5 + sgn * std::sqrt(1.5 * 1.5 + 24.0)) / 2.0;
        double best = 1e300;
        const Cycle* hit = nullptr;
        for (const Cycle& c : ps.cycles) {
            const double d = distance(c.points[0], ComplexPair{x, x});
            if (d < best) {
                best = d;
                hit = &c;
            }
        }
        root_err = std::max(root_err, best);
        if (!hit) return {false, "no cycle near a root"};
        const Classification cl = classify(horseshoe(), *hit);
        for (Complex nu : {cl.nu_small, cl.nu_large})
            mult_err = std::max(mult_err, std::abs(nu * nu - 2.0 * x * nu + 0.5));
    }
    return {root_err <= 1e-12 && mult_err <= 1e-10, format("root err %.2e, multiplier residual %.2e", root_err, mult_err)};
}

Outcome bezout()
{
    std::string counts;
    bool ok = true;
    for (int n = 1; n <= 6; ++n) {
        const std::size_t got = find_periodic(horseshoe(), n).solutions.size();
        ok = ok && got == (std::size_t{1} << n);
        counts += (n > 1 ? " " : "") + std::to_string(got);
    }
    return {ok, "solutions per period: " + counts};
}

Outcome green_law()
{
    const HenonMap& f = horseshoe();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double worst = 0.0;
    int samples = 0;
    while (samples < 1000) {
        const ComplexPair z{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
        const GreenValue g = green_plus(f, z);
        if (!g.escaped) continue;
        ++samples;
        worst = std::max(worst, std::abs(green_plus(f, evaluate(f, z).z).value - 2.0 * g.value));
    }
    double periodic = 0.0;
    int points = 0;
    for (int n = 1; n <= 6; ++n)
        for (const Cycle& c : find_periodic(f, n).cycles)
            for (const auto& p : c.points) {
                periodic = std::max(periodic, green_plus(f, p).value);
                ++points;
            }
    return {worst <= 1e-8 && periodic == 0.0,
            format("max |G(fz) - 2G(z)| %.2e over %d samples, max G at %d periodic points %.1e", worst, samples,
                   points, periodic)};
}

Outcome linearization()
{
    double res = 0.0, ext = 0.0;
    int curves = 0;
    for (const Saddle& s : saddles_up_to(4))
        for (Side side : {Side::unstable, Side::stable}) {
            const SeriesParametrization xi = linearize(horseshoe(), s, side);
            if (xi.order() != 40) return {false, "truncation is not 40"};
            res = std::max(res, functional_residual(xi));
            ext = std::max(ext, extension_discrepancy(xi, 2.0 * xi.r_valid));
            ++curves;
        }
    return {res <= 1e-10 && ext <= 1e-8,
            format("%d series: max residual %.2e, max route gap at 2 r_valid %.2e", curves, res, ext)};
}

struct FamilyData {
    CurveFamily fam;
    GrowthProfile prof;
    std::vector<LocalDisk> disks;
};

const FamilyData& family()
{
    static const FamilyData d = [] {
        FamilyData out;
        out.fam = build_saddle_family(horseshoe(), 3);
        out.prof = growth_profile(out.fam, {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0});
        out.disks = local_disks(out.fam, 0.5);
        return out;
    }();
    return d;
}

Outcome normalization()
{
    const FamilyData& d = family();
    double norm = 0.0;
    for (const auto& m : d.fam.members)
        for (Side side : {Side::unstable, Side::stable})
            norm = std::max(norm, std::abs(m.curve(side).circle_max_green(1.0) - 1.0));
    const double kappa = d.prof.kappa;
    double lam_min = 1e300, def_gap = 0.0, fixed_gap = 0.0;
    for (const MemberLambda& l : member_lambdas(d.fam)) {
        lam_min = std::min(lam_min, std::abs(l.lambda));
        def_gap = std::max(def_gap, std::abs(l.lambda - l.lambda_matched));
        const FamilyMember& m = d.fam.members[static_cast<std::size_t>(l.member)];
        const Saddle& s = d.fam.saddles[static_cast<std::size_t>(m.cycle)];
        if (s.period == 1) fixed_gap = std::max(fixed_gap, std::abs(l.lambda - s.nu_u));
    }
    const bool ok = norm <= 1e-6 && kappa > 1.0 && lam_min >= kappa - 1e-4 && fixed_gap <= 1e-8 && def_gap <= 1e-4;
    return {ok, format("%zu members: max |m(1)-1| %.1e, kappa %.10f, min |lambda| %.6f, |lambda - nu_u| %.1e, "
                       "definition gap %.1e",
                       d.fam.members.size(), norm, kappa, lam_min, fixed_gap, def_gap)};
}

Outcome contraction()
{
    const FamilyData& d = family();
    const Saddle& q = d.fam.saddles[static_cast<std::size_t>(d.fam.members[0].cycle)];
    const CurveFamily rc = build_recentered_family(horseshoe(), q, 24);
    const ContractionReport r = contraction_check(d.fam, d.prof, d.disks, &rc);
    if (r.slowest < 0 || r.escapes.empty()) return {false, "no pairs or no escape records"};
    const double lk = std::log(r.kappa);
    const double rate = r.pairs[static_cast<std::size_t>(r.slowest)].rate;
    int worst = 0;
    for (const auto& e : r.escapes)
        worst = std::max(worst, e.measured < 0 ? 1 << 20 : std::abs(e.measured - e.predicted));
    const bool ok = std::abs(rate - lk) <= 0.1 * lk && r.rates_ok && worst <= 2;
    return {ok, format("backward exponent %.4f vs -log kappa %.4f, %zu escapes, max |measured - predicted| %d", -rate,
                       -lk, r.escapes.size(), worst)};
}

Outcome intersections()
{
    std::string mus;
    bool ok = true;
    const CurveParam ps(std::make_shared<const SeriesParametrization>(polynomial_curve({0.0, 0.0}, {{1.0, 0.0}})));
    for (int k = 0; k <= 4; ++k) {
        std::vector<ComplexPair> cu(static_cast<std::size_t>(k + 1), ComplexPair{0.0, 0.0});
        cu[0] = {1.0, 0.0};
        cu[static_cast<std::size_t>(k)] = cu[static_cast<std::size_t>(k)] + ComplexPair{0.0, 1.0};
        const CurveParam pu(std::make_shared<const SeriesParametrization>(polynomial_curve({0.0, 0.0}, cu)));
        const auto recs = find_intersections(pu, ps, 0.5, 0.5);
        if (recs.size() != 1) return {false, format("k = %d: %zu records", k, recs.size())};
        const MultiplicityResult m = multiplicity(pu, ps, recs[0]);
        ok = ok && m.by_perturbation == k + 1 && m.by_argument == k + 1;
        mus += format("%s%d/%d", k ? " " : "", m.by_perturbation, m.by_argument);
    }
    const CurveFamily fixed = build_saddle_family(horseshoe(), 1);
    TransversalityOptions to;
    to.ru = to.rs = 8.0;
    const TransversalityReport rep = transversality_report(fixed, fixed, to);
    int nontrivial = 0;
    for (const auto& scan : rep.scans)
        for (const auto& r : scan.records)
            if (std::abs(r.zeta_u) > 1e-8 || std::abs(r.zeta_s) > 1e-8) ++nontrivial;
    ok = ok && rep.records > 0 && nontrivial > 0 && rep.min_angle > 0.0 && rep.max_mu == 1;
    return {ok, format("synthetic mu (perturbation/argument) %s; homoclinic scan: %d records (%d nontrivial), "
                       "min angle %.4f, max mu %d",
                       mus.c_str(), rep.records, nontrivial, rep.min_angle, rep.max_mu)};
}

Outcome jet_decay()
{
    const FamilyData& d = family();
    const Saddle& s = d.fam.saddles[static_cast<std::size_t>(d.fam.members[0].cycle)];
    const double kappa = d.prof.kappa;
    const DecayTable t = tangency_decay_experiment(horseshoe(), manufacture_tangent_pair(horseshoe(), s, 1), kappa, 10);
    bool ok = t.within_slack && t.top_persists;
    std::string detail = format("k = 1: exponent %.4f vs target %.4f, j = 2 exponent %.4f (persists: %s)",
                                t.exponent[0], t.target, t.exponent[1], t.top_persists ? "yes" : "no");
    // higher orders: coefficient j decays like j times the target, so only the bound is required
    for (int k = 2; k <= 3; ++k) {
        const DecayTable h =
            tangency_decay_experiment(horseshoe(), manufacture_tangent_pair(horseshoe(), s, k), kappa, 10);
        ok = ok && h.bound_ok && h.top_persists;
        detail += format("; k = %d exponents", k);
        for (double e : h.exponent) detail += format(" %.3f", e);
        detail += h.bound_ok ? " (bound ok)" : " (bound violated)";
    }
    return {ok, detail};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path report_dir(int run) { return fs::temp_directory_path() / ("henon_qh_acceptance_" + std::to_string(run)); }

bool run_report(int run)
{
    const fs::path out = report_dir(run);
    fs::remove_all(out);
    const std::string cmd = std::string("\"") + HENON_QH_BIN + "\" qh-report --config \"" + HENON_QH_CONFIG +
                            "\" --out \"" + out.string() + "\" > \"" + out.string() + ".log\" 2>&1";
    return std::system(cmd.c_str()) == 0;
}

Outcome stratification()
{
    if (!run_report(1)) return {false, "henon-qh qh-report failed"};
    const auto doc = nlohmann::json::parse(slurp(report_dir(1) / "qh_report.json"));
    const auto& v = doc["verdict"];
    const bool ok = v["strata_all_11"].get<bool>() && v["strata"].size() == 1 && v["strata"].contains("(1,1)") &&
                    v["uniform_expansion"].get<bool>() && v["consistent"].get<bool>();
    return {ok, "strata " + v["strata"].dump() + ", verdict: " + v["summary"].get<std::string>()};
}

Outcome determinism()
{
    if (!fs::exists(report_dir(1) / "qh_report.json")) return {false, "first run missing"};
    if (!run_report(2)) return {false, "second henon-qh qh-report failed"};
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(report_dir(1))) first[e.path().filename().string()] = slurp(e.path());
    std::size_t same = 0;
    std::string differing;
    for (const auto& e : fs::directory_iterator(report_dir(2))) {
        const auto it = first.find(e.path().filename().string());
        if (it != first.end() && it->second == slurp(e.path())) ++same;
        else differing += " " + e.path().filename().string();
    }
    const bool ok = same == first.size() && differing.empty();
    return {ok, ok ? format("%zu files byte-identical", same) : "differs:" + differing};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit; // seconds
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "fixed points", 1.0, fixed_points},
        {2, "Bezout count", 120.0, bezout},
        {3, "Green functional equation", 10.0, green_law},
        {4, "linearization", 30.0, linearization},
        {5, "normalization and kappa", 60.0, normalization},
        {6, "contraction", 60.0, contraction},
        {7, "intersections", 120.0, intersections},
        {8, "jet decay law", 60.0, jet_decay},
        {9, "stratification", 300.0, stratification},
        {10, "determinism", 300.0, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.ok && secs <= c.limit;
        if (!ok) ++failed;
        std::printf("criterion %2d %-26s %s  (%.2f s, limit %.0f s)  %s\n", c.id, c.name, ok ? "PASS" : "FAIL", secs,
                    c.limit, o.detail.c_str());
        std::fflush(stdout);
    }
    for (int run : {1, 2}) {
        fs::remove_all(report_dir(run));
        fs::remove(report_dir(run).string() + ".log");
    }
    return failed == 0 ? 0 : 1;
}
