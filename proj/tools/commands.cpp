#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "henon/intersect.hpp"
#include "henon/parallel.hpp"
#include "output.hpp"

namespace henon::cli {

namespace {

using nlohmann::json;

json cx(Complex c) { return json::array({c.real(), c.imag()}); }
json pt(const ComplexPair& z) { return json::array({z.x.real(), z.x.imag(), z.y.real(), z.y.imag()}); }

GreenOptions green_options(const Context& ctx)
{
    GreenOptions g;
    g.n_max = ctx.cfg.budgets.green_iter;
    return g;
}

FamilyOptions family_options(const Context& ctx)
{
    FamilyOptions fo;
    fo.series.order = ctx.cfg.budgets.T;
    fo.series.series_tol = ctx.cfg.tol.series_tol;
    fo.normalize.green = green_options(ctx);
    fo.search.grid = ctx.cfg.budgets.grid;
    fo.jobs = ctx.jobs;
    return fo;
}

int member_period(const CurveFamily& fam, std::size_t i)
{
    return fam.saddles[static_cast<std::size_t>(fam.members[i].cycle)].period;
}

// Everything the reports share, computed once per run.
struct Pipeline {
    const Context& ctx;
    CurveFamily fam;
    std::vector<MemberLambda> lambdas;
    GrowthProfile profile;
    std::vector<LocalDisk> disks;
    bool have_lambdas = false;
    bool have_profile = false;
    bool have_disks = false;

    explicit Pipeline(const Context& c)
        : ctx(c), fam(build_saddle_family(c.cfg.map, c.cfg.budgets.N_max, family_options(c)))
    {
    }

    const std::vector<MemberLambda>& lam()
    {
        if (!have_lambdas) {
            lambdas = member_lambdas(fam, Side::unstable, ctx.jobs);
            have_lambdas = true;
        }
        return lambdas;
    }
    const GrowthProfile& prof()
    {
        if (!have_profile) {
            GrowthOptions go;
            go.green = green_options(ctx);
            go.jobs = ctx.jobs;
            profile = growth_profile(fam, ctx.cfg.radii.r_grid, go);
            have_profile = true;
        }
        return profile;
    }
    const std::vector<LocalDisk>& dsk()
    {
        if (!have_disks) {
            disks = local_disks(fam, ctx.cfg.radii.r, Side::unstable, {}, ctx.jobs);
            have_disks = true;
        }
        return disks;
    }
};

json header(const Context& ctx, const std::string& schema)
{
    return {{"schema", schema}, {"map", ctx.cfg.map_spec}, {"seed", ctx.seed}};
}

// ---- saddles -------------------------------------------------------------------------------

void cmd_saddles(const Context& ctx)
{
    const HenonMap& f = ctx.cfg.map;
    PeriodicSearchOptions po;
    po.grid = ctx.cfg.budgets.grid;
    CsvWriter csv(ctx.out / "saddles.csv", "henon-qh.saddles/1",
                  {"period", "cycle", "index", "re_x", "im_x", "re_y", "im_y", "re_nu_s", "im_nu_s", "re_nu_u", "im_nu_u",
                   "residual"});
    json periods = json::array();
    for (int N = 1; N <= ctx.cfg.budgets.n_max; ++N) {
        const PeriodicSearch ps = find_periodic(f, N, po);
        int saddles = 0;
        json notes = json::array();
        for (std::size_t c = 0; c < ps.cycles.size(); ++c) {
            const Classification cl = classify(f, ps.cycles[c]);
            if (!cl.saddle) {
                notes.push_back({{"cycle", c}, {"note", cl.note}, {"indifferent", cl.indifferent}});
                continue;
            }
            ++saddles;
            for (std::size_t i = 0; i < ps.cycles[c].points.size(); ++i) {
                const ComplexPair& p = ps.cycles[c].points[i];
                const Image back = iterate(f, p, N);
                csv << N << c << i << p.x << p.y << cl.saddle->nu_s << cl.saddle->nu_u
                    << (back.escaped ? std::numeric_limits<double>::infinity() : distance(back.z, p));
                csv.end_row();
            }
        }
        const double bezout = std::pow(static_cast<double>(f.degree()), N);
        periods.push_back({{"period", N},
                           {"solutions", ps.solutions.size()},
                           {"bezout", bezout},
                           {"complete", static_cast<double>(ps.solutions.size()) == bezout},
                           {"cycles", ps.cycles.size()},
                           {"saddles", saddles},
                           {"nonhyperbolic", ps.nonhyperbolic.size()},
                           {"notes", notes}});
    }
    csv.close();
    json doc = header(ctx, "henon-qh.saddles-summary/1");
    doc["periods"] = periods;
    write_json(ctx.out / "saddles.json", doc);
}

// ---- green ---------------------------------------------------------------------------------

void cmd_green(const Context& ctx)
{
    const HenonMap& f = ctx.cfg.map;
    const int n = ctx.cfg.green.n;
    const double box = ctx.cfg.green.box;
    const GreenOptions g = green_options(ctx);
    struct Row {
        ComplexPair z;
        GreenValue plus, minus;
    };
    std::vector<Row> rows(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    auto coord = [&](int i) { return n == 1 ? 0.0 : -box + 2.0 * box * i / (n - 1); };
    parallel_for(rows.size(), ctx.jobs, [&](std::size_t k) {
        const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
        Row& r = rows[k];
        r.z = {Complex(coord(i), 0.0), Complex(coord(j), 0.0)};
        r.plus = green_plus(f, r.z, g);
        r.minus = green_minus(f, r.z, g);
    });
    CsvWriter csv(ctx.out / "green.csv", "henon-qh.green/1",
                  {"re_x", "im_x", "re_y", "im_y", "gplus", "gminus", "escaped_fwd", "escaped_bwd"});
    for (const auto& r : rows) {
        csv << r.z.x << r.z.y << r.plus.value << r.minus.value << r.plus.escaped << r.minus.escaped;
        csv.end_row();
    }
    csv.close();
}

// ---- uniformize ----------------------------------------------------------------------------

void cmd_uniformize(const Context& ctx)
{
    Pipeline pl(ctx);
    const GreenOptions g = green_options(ctx);
    json list = json::array();
    std::vector<json> entries(pl.fam.members.size() * 2);
    parallel_for(entries.size(), ctx.jobs, [&](std::size_t k) {
        const std::size_t i = k / 2;
        const Side side = k % 2 == 0 ? Side::unstable : Side::stable;
        const CurveParam& psi = pl.fam.members[i].curve(side);
        const SeriesParametrization& xi = psi.series();
        json coeffs = json::array();
        for (const auto& a : xi.coeffs) coeffs.push_back(pt(a));
        const Saddle& s = pl.fam.saddles[static_cast<std::size_t>(pl.fam.members[i].cycle)];
        entries[k] = {{"member", i},
                      {"side", to_string(side)},
                      {"period", xi.period()},
                      {"base", pt(xi.point())},
                      {"nu", cx(xi.nu)},
                      {"nu_u", cx(s.nu_u)},
                      {"nu_s", cx(s.nu_s)},
                      {"alpha", xi.alpha},
                      {"r_valid", xi.r_valid},
                      {"order", xi.order()},
                      {"coeffs", coeffs},
                      {"residual", functional_residual(xi)},
                      {"extension_discrepancy", extension_discrepancy(xi, 2.0 * xi.r_valid)},
                      {"m_at_1", psi.circle_max_green(1.0, g)}};
    });
    for (auto& e : entries) list.push_back(std::move(e));
    json doc = header(ctx, "henon-qh.uniformize/1");
    doc["N_max"] = ctx.cfg.budgets.N_max;
    doc["T"] = ctx.cfg.budgets.T;
    doc["series_tol"] = ctx.cfg.tol.series_tol;
    doc["saddles"] = list;
    write_json(ctx.out / "uniformize.json", doc);
}

// ---- growth / lambda -----------------------------------------------------------------------

struct LambdaSummary {
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    int min_member = -1;
    double max_definition_gap = 0.0; // |lambda - lambda_matched|
    double max_growth_gap = 0.0;     // | r_{f(x)} - |lambda_x| |
    double max_fixed_gap = 0.0;      // |lambda - nu_u| at fixed points
    bool all_ge_kappa = true;
};

LambdaSummary summarize_lambdas(Pipeline& pl)
{
    LambdaSummary s;
    const auto& lam = pl.lam();
    const auto& prof = pl.prof();
    for (const auto& l : lam) {
        const double a = std::abs(l.lambda);
        if (a < s.min_abs) {
            s.min_abs = a;
            s.min_member = l.member;
        }
        s.max_abs = std::max(s.max_abs, a);
        s.max_definition_gap = std::max(s.max_definition_gap, std::abs(l.lambda - l.lambda_matched));
        s.max_growth_gap =
            std::max(s.max_growth_gap, std::abs(prof.member_radius[static_cast<std::size_t>(l.next)] - a));
        if (member_period(pl.fam, static_cast<std::size_t>(l.member)) == 1) {
            const Saddle& sd = pl.fam.saddles[static_cast<std::size_t>(pl.fam.members[static_cast<std::size_t>(l.member)].cycle)];
            s.max_fixed_gap = std::max(s.max_fixed_gap, std::abs(l.lambda - sd.nu_u));
        }
        s.all_ge_kappa = s.all_ge_kappa && a >= prof.kappa - 1e-4;
    }
    return s;
}

json growth_json(Pipeline& pl)
{
    const auto& prof = pl.prof();
    const LambdaSummary ls = summarize_lambdas(pl);
    CsvWriter csv(pl.ctx.out / "growth.csv", "henon-qh.growth/1", {"r", "m", "M"});
    for (std::size_t i = 0; i < prof.r_grid.size(); ++i) {
        csv << prof.r_grid[i] << prof.m_of_r[i] << prof.M_of_r[i];
        csv.end_row();
    }
    csv.close();

    json members = json::array();
    for (const auto& l : pl.lam())
        members.push_back({{"member", l.member},
                           {"next", l.next},
                           {"lambda", cx(l.lambda)},
                           {"lambda_matched", cx(l.lambda_matched)},
                           {"abs_lambda", std::abs(l.lambda)},
                           {"radius", prof.member_radius[static_cast<std::size_t>(l.member)]}});
    return {{"kappa", prof.kappa},
            {"kappa_member", prof.kappa_member},
            {"deg", pl.fam.map->degree()},
            {"r_grid", prof.r_grid},
            {"m", prof.m_of_r},
            {"M", prof.M_of_r},
            {"lambda_min", ls.min_abs},
            {"lambda_max", ls.max_abs},
            {"lambda_min_member", ls.min_member},
            {"all_lambda_ge_kappa", ls.all_ge_kappa},
            {"lambda_definition_gap", ls.max_definition_gap},
            {"lambda_growth_gap", ls.max_growth_gap},
            {"lambda_fixed_point_gap", ls.max_fixed_gap},
            {"members", members}};
}

void cmd_growth(const Context& ctx)
{
    Pipeline pl(ctx);
    json doc = header(ctx, "henon-qh.growth-summary/1");
    doc["growth"] = growth_json(pl);
    write_json(ctx.out / "growth.json", doc);
}

// ---- normalization -------------------------------------------------------------------------

json normalization_json(Pipeline& pl, bool* ok)
{
    const GreenOptions g = green_options(pl.ctx);
    std::vector<double> err(pl.fam.members.size() * 2, 0.0);
    parallel_for(err.size(), pl.ctx.jobs, [&](std::size_t k) {
        const CurveParam& psi = pl.fam.members[k / 2].curve(k % 2 == 0 ? Side::unstable : Side::stable);
        err[k] = std::abs(psi.circle_max_green(1.0, g) - 1.0);
    });
    const double worst = err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
    *ok = worst <= pl.ctx.cfg.tol.norm_tol;
    return {{"max_error", worst}, {"norm_tol", pl.ctx.cfg.tol.norm_tol}, {"ok", *ok}};
}

// ---- disks ---------------------------------------------------------------------------------

json disks_json(Pipeline& pl)
{
    const auto& disks = pl.dsk();
    CsvWriter csv(pl.ctx.out / "disks.csv", "henon-qh.disks/1",
                  {"member", "area", "rho_in", "rho_out", "star_shaped", "boundary_error"});
    double amin = std::numeric_limits<double>::infinity(), amax = 0.0, rho1 = amin, rho2 = 0.0, berr = 0.0;
    bool star = true;
    for (const auto& d : disks) {
        csv << d.owner << d.area << d.rho_in << d.rho_out << d.star_shaped << d.boundary_error;
        csv.end_row();
        amin = std::min(amin, d.area);
        amax = std::max(amax, d.area);
        rho1 = std::min(rho1, d.rho_in);
        rho2 = std::max(rho2, d.rho_out);
        berr = std::max(berr, d.boundary_error);
        star = star && d.star_shaped;
    }
    csv.close();
    return {{"r", pl.ctx.cfg.radii.r},
            {"area_min", amin},
            {"area_max", amax},
            {"rho1", rho1},
            {"rho2", rho2},
            {"all_star_shaped", star},
            {"max_boundary_error", berr}};
}

void cmd_local_disks(const Context& ctx)
{
    Pipeline pl(ctx);
    json doc = header(ctx, "henon-qh.disks-summary/1");
    doc["disks"] = disks_json(pl);
    write_json(ctx.out / "disks.json", doc);
}

// ---- family --------------------------------------------------------------------------------

CurveFamily recentered(Pipeline& pl)
{
    const Saddle& q = pl.fam.saddles[static_cast<std::size_t>(pl.fam.members.front().cycle)];
    return build_recentered_family(pl.ctx.cfg.map, q, pl.ctx.cfg.budgets.samples, family_options(pl.ctx));
}

void cmd_family_report(const Context& ctx)
{
    Pipeline pl(ctx);
    const GreenOptions g = green_options(ctx);
    json members = json::array();
    for (std::size_t i = 0; i < pl.fam.members.size(); ++i) {
        const FamilyMember& m = pl.fam.members[i];
        members.push_back({{"member", i},
                           {"base", pt(m.base)},
                           {"period", member_period(pl.fam, i)},
                           {"cycle", m.cycle},
                           {"position", m.position},
                           {"successor", pl.fam.successor(i)},
                           {"alpha_u", m.unstable.series().alpha},
                           {"alpha_s", m.stable.series().alpha},
                           {"r_valid_u", m.unstable.series().r_valid},
                           {"r_valid_s", m.stable.series().r_valid}});
    }
    bool norm_ok = false;
    json norm = normalization_json(pl, &norm_ok);

    // image disjointness of distinct members' disks
    const auto& disks = pl.dsk();
    double sep = std::numeric_limits<double>::infinity();
    const std::size_t n = pl.fam.members.size();
    std::vector<double> row_min(n, sep);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            row_min[i] = std::min(row_min[i], disk_separation(pl.fam.members[i].unstable, disks[i],
                                                              pl.fam.members[j].unstable, disks[j]));
    });
    for (double v : row_min) sep = std::min(sep, v);

    // G- along 64 boundary points of each unstable disk
    std::vector<double> member_cross(n, 0.0);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        const LocalDisk& d = disks[i];
        const std::size_t step = std::max<std::size_t>(1, d.boundary.size() / 64);
        for (std::size_t k = 0; k < d.boundary.size(); k += step)
            member_cross[i] = std::max(member_cross[i], pl.fam.members[i].unstable.cross_green(d.boundary[k], g));
    });
    double disk_cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        members[i]["cross_green_max"] = member_cross[i];
        disk_cross = std::max(disk_cross, member_cross[i]);
    }

    const CurveFamily rc = recentered(pl);
    json rmembers = json::array();
    double cross_max = 0.0;
    for (std::size_t i = 0; i < rc.members.size(); ++i) {
        const FamilyMember& m = rc.members[i];
        const CurveParam& psi = m.unstable.valid() ? m.unstable : m.stable;
        double cg = 0.0;
        for (int k = 0; k < 64; ++k) cg = std::max(cg, psi.cross_green(std::polar(0.5, 2.0 * std::numbers::pi * k / 64.0), g));
        cross_max = std::max(cross_max, cg);
        rmembers.push_back({{"zeta", cx(m.zeta)},
                            {"side", to_string(psi.side())},
                            {"base", pt(m.base)},
                            {"m_at_1", psi.circle_max_green(1.0, g)},
                            {"cross_green_max", cg}});
    }

    json doc = header(ctx, "henon-qh.family/1");
    doc["saddle_family"] = {{"N_max", ctx.cfg.budgets.N_max},
                            {"members", members},
                            {"count", n},
                            {"skipped", pl.fam.skipped},
                            {"source", pl.fam.source},
                            {"normalization", norm},
                            {"disk_r", ctx.cfg.radii.r},
                            {"min_disk_separation", n > 1 ? json(sep) : json(nullptr)},
                            {"cross_green_max", disk_cross}};
    doc["recentered_family"] = {{"source", rc.source},
                                {"requested", rc.requested},
                                {"count", rc.members.size()},
                                {"members", rmembers},
                                {"cross_green_max", cross_max}};
    write_json(ctx.out / "family.json", doc);
}

// ---- contraction ---------------------------------------------------------------------------

json contraction_json(const ContractionReport& rep)
{
    json pairs = json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"member", p.member}, {"rate", p.rate}, {"r_squared", p.r_squared}});
    json escapes = json::array();
    for (const auto& e : rep.escapes)
        escapes.push_back({{"member", e.member}, {"zeta", cx(e.zeta)}, {"predicted", e.predicted}, {"measured", e.measured}});
    return {{"kappa", rep.kappa},
            {"log_kappa", std::log(rep.kappa)},
            {"rho1", rep.rho1},
            {"rho2", rep.rho2},
            {"n_threshold", rep.n_threshold},
            {"inclusion_samples", rep.inclusion_samples},
            {"inclusion_failures", rep.inclusion_failures},
            {"inclusion_route_error", rep.inclusion_route_error},
            {"pairs", pairs},
            {"slowest", rep.slowest},
            {"rates_ok", rep.rates_ok},
            {"slowest_ok", rep.slowest_ok},
            {"escapes", escapes},
            {"escapes_ok", rep.escapes_ok}};
}

ContractionReport run_contraction(Pipeline& pl)
{
    const CurveFamily rc = recentered(pl);
    ContractionOptions co;
    co.escape_max = pl.ctx.cfg.budgets.escape_max;
    co.jobs = pl.ctx.jobs;
    return contraction_check(pl.fam, pl.prof(), pl.dsk(), &rc, co);
}

// ---- strata --------------------------------------------------------------------------------

json strata_json(Pipeline& pl, StrataTable* out)
{
    std::vector<ComplexPair> samples;
    for (const auto& m : pl.fam.members) samples.push_back(m.base);
    TauOptions to;
    to.radius = pl.ctx.cfg.radii.tau_radius;
    to.threshold = pl.ctx.cfg.tol.tau_threshold;
    const StrataTable st = stratify(pl.fam, samples, to);
    CsvWriter csv(pl.ctx.out / "strata.csv", "henon-qh.strata/1", {"m_s", "m_u", "count"});
    json rows = json::array();
    for (const auto& r : st.rows) {
        csv << r.m_s << r.m_u << r.count;
        csv.end_row();
        rows.push_back({{"m_s", r.m_s}, {"m_u", r.m_u}, {"count", r.count}, {"maximal", r.maximal}});
    }
    csv.close();
    json points = json::array();
    for (const auto& z : samples) {
        const auto est = estimate_tau(pl.fam, z, to);
        if (!est) {
            points.push_back({{"at", pt(z)}, {"stratum", nullptr}});
            continue;
        }
        points.push_back({{"at", pt(z)},
                          {"stratum", est->stratum()},
                          {"tau_s", est->tau_s},
                          {"tau_u", est->tau_u},
                          {"gamma_u", est->gamma_u}});
    }
    if (out) *out = st;
    return {{"rows", rows},
            {"samples", st.samples},
            {"undefined", st.undefined},
            {"fraction_11", st.fraction_11},
            {"threshold", to.threshold},
            {"points", points}};
}

void cmd_stratify(const Context& ctx)
{
    Pipeline pl(ctx);
    json doc = header(ctx, "henon-qh.strata-summary/1");
    doc["strata"] = strata_json(pl, nullptr);
    write_json(ctx.out / "strata.json", doc);
}

// ---- intersections -------------------------------------------------------------------------

json intersections_json(Pipeline& pl, TransversalityReport* out)
{
    TransversalityOptions to;
    to.ru = pl.ctx.cfg.radii.ru;
    to.rs = pl.ctx.cfg.radii.rs;
    to.intersect.seeds = pl.ctx.cfg.budgets.seeds;
    to.intersect.residual_tol = pl.ctx.cfg.tol.residual_tol;
    to.intersect.angle_tol = pl.ctx.cfg.tol.angle_tol;
    to.multiplicity.seed = pl.ctx.seed;
    to.jobs = pl.ctx.jobs;
    const TransversalityReport rep = transversality_report(pl.fam, pl.fam, to);
    CsvWriter csv(pl.ctx.out / "intersections.csv", "henon-qh.intersections/1",
                  {"member_u", "member_s", "re_zeta_u", "im_zeta_u", "re_zeta_s", "im_zeta_s", "re_x", "im_x", "re_y",
                   "im_y", "residual", "angle", "mu", "k", "suspect", "mu_perturbation", "mu_argument"});
    int nontrivial = 0;
    for (const auto& scan : rep.scans)
        for (const auto& r : scan.records) {
            csv << scan.member_u << scan.member_s << r.zeta_u << r.zeta_s << r.point.x << r.point.y << r.residual
                << r.angle << r.mu << r.k << r.tangency_suspect << r.mu_perturbation << r.mu_argument;
            csv.end_row();
            if (std::abs(r.zeta_u) > 1e-8 || std::abs(r.zeta_s) > 1e-8) ++nontrivial;
        }
    csv.close();
    json nearest = json::array();
    for (double d : rep.nearest_nontrivial) nearest.push_back(std::isfinite(d) ? json(d) : json(nullptr));
    if (out) *out = rep;
    return {{"ru", to.ru},
            {"rs", to.rs},
            {"pairs", rep.scans.size()},
            {"records", rep.records},
            {"nontrivial", nontrivial},
            {"min_angle", rep.min_angle},
            {"max_mu", rep.max_mu},
            {"angle_histogram", rep.angle_histogram},
            {"mu_histogram", rep.mu_histogram},
            {"suspects", rep.suspects},
            {"disagreements", rep.disagreements},
            {"nearest_nontrivial", nearest},
            {"angle_tol", to.intersect.angle_tol},
            {"verdict", rep.verdict}};
}

void cmd_intersections(const Context& ctx)
{
    Pipeline pl(ctx);
    json doc = header(ctx, "henon-qh.intersections-summary/1");
    doc["transversality"] = intersections_json(pl, nullptr);
    write_json(ctx.out / "intersections.json", doc);
}

// ---- tangency ------------------------------------------------------------------------------

json tangency_json(Pipeline& pl, std::vector<std::string>& failures)
{
    const TangencySetup& ts = pl.ctx.cfg.tangency;
    const std::size_t i = static_cast<std::size_t>(ts.member);
    if (i >= pl.fam.members.size() || member_period(pl.fam, i) != 1) {
        failures.push_back("tangency: member " + std::to_string(ts.member) + " is not a fixed point of the family");
        return {{"error", failures.back()}};
    }
    const Saddle& s = pl.fam.saddles[static_cast<std::size_t>(pl.fam.members[i].cycle)];
    const TangentPair pair = manufacture_tangent_pair(pl.ctx.cfg.map, s, ts.k, 1.0, ts.kick);
    const DecayTable dt = tangency_decay_experiment(pl.ctx.cfg.map, pair, pl.prof().kappa, ts.n_max);

    std::vector<std::string> cols{"n", "lambda", "mu"};
    for (int j = 1; j <= ts.k + 1; ++j) cols.push_back("a" + std::to_string(j));
    cols.push_back("law_residual");
    CsvWriter csv(pl.ctx.out / "tangency.csv", "henon-qh.tangency/1", cols);
    json rows = json::array();
    for (const auto& r : dt.rows) {
        csv << r.n << r.lambda << r.mu;
        for (double a : r.a) csv << a;
        csv << r.law_residual;
        csv.end_row();
        rows.push_back({{"n", r.n}, {"lambda", r.lambda}, {"mu", r.mu}, {"a", r.a}, {"law_residual", r.law_residual}});
    }
    csv.close();
    if (!dt.bound_ok) failures.push_back("tangency: decay exponent above the -2 log kappa bound");
    if (!dt.top_persists) failures.push_back("tangency: top coefficient decays");
    json exps = json::array();
    for (double e : dt.exponent) exps.push_back(std::isfinite(e) ? json(e) : json(nullptr));
    return {{"member", ts.member},
            {"k", dt.k},
            {"kappa", dt.kappa},
            {"target", dt.target},
            {"exponent", exps},
            {"bound_ok", dt.bound_ok},
            {"within_slack", dt.within_slack},
            {"top_persists", dt.top_persists},
            {"max_law_residual", dt.max_law_residual},
            {"rows", rows}};
}

void cmd_tangency_report(const Context& ctx)
{
    Pipeline pl(ctx);
    std::vector<std::string> failures;
    json doc = header(ctx, "henon-qh.tangency-summary/1");
    doc["tangency"] = tangency_json(pl, failures);
    doc["failures"] = failures;
    write_json(ctx.out / "tangency.json", doc);
}

// ---- qh-report -----------------------------------------------------------------------------

void cmd_qh_report(const Context& ctx)
{
    Pipeline pl(ctx);
    std::vector<std::string> failures;
    json doc = header(ctx, "henon-qh.qh-report/1");
    doc["config"] = {{"N_max", ctx.cfg.budgets.N_max},
                     {"T", ctx.cfg.budgets.T},
                     {"r", ctx.cfg.radii.r},
                     {"ru", ctx.cfg.radii.ru},
                     {"rs", ctx.cfg.radii.rs},
                     {"angle_tol", ctx.cfg.tol.angle_tol},
                     {"tau_threshold", ctx.cfg.tol.tau_threshold},
                     {"norm_tol", ctx.cfg.tol.norm_tol}};
    doc["family"] = {{"members", pl.fam.members.size()}, {"skipped", pl.fam.skipped}, {"source", pl.fam.source}};

    bool norm_ok = false;
    doc["normalization"] = normalization_json(pl, &norm_ok);
    if (!norm_ok) failures.push_back("normalization: |m(1) - 1| above norm_tol");

    const json growth = growth_json(pl);
    doc["growth"] = growth;
    const double kappa = pl.prof().kappa;
    const bool kappa_gt_1 = kappa > 1.0;
    const bool lambda_ok = growth["all_lambda_ge_kappa"].get<bool>();
    if (!kappa_gt_1) failures.push_back("growth: kappa <= 1");
    if (!lambda_ok) failures.push_back("growth: some |lambda_x| < kappa");
    doc["kappa"] = kappa;
    doc["lambda_bounds"] = {{"min", growth["lambda_min"]}, {"max", growth["lambda_max"]}};

    const json disks = disks_json(pl);
    doc["area_bounds"] = {{"min", disks["area_min"]}, {"max", disks["area_max"]}};
    doc["disks"] = disks;

    const ContractionReport cr = run_contraction(pl);
    doc["contraction"] = contraction_json(cr);
    const bool contraction_ok = cr.rates_ok && cr.inclusion_failures == 0 && cr.escapes_ok;
    if (!cr.rates_ok) failures.push_back("contraction: backward rate below (1 - slack) log kappa");
    if (cr.inclusion_failures > 0) failures.push_back("contraction: backward inclusion violated");
    if (!cr.escapes_ok) failures.push_back("contraction: forward escape off the predicted step");

    StrataTable st;
    doc["tau"] = strata_json(pl, &st);
    const bool all_11 = st.samples > 0 && st.undefined == 0 && st.rows.size() == 1 && st.rows[0].m_s == 1 &&
                        st.rows[0].m_u == 1;

    TransversalityReport tr;
    doc["transversality"] = intersections_json(pl, &tr);
    doc["min_angle"] = tr.min_angle;
    const bool angle_ok = tr.records > 0 && tr.min_angle > ctx.cfg.tol.angle_tol;
    const bool mu_ok = tr.max_mu == 1 && tr.disagreements == 0;
    if (!angle_ok) failures.push_back("transversality: min angle not above angle_tol");
    if (!mu_ok) failures.push_back("transversality: non-simple intersection or counter disagreement");

    doc["tangency"] = tangency_json(pl, failures);

    const bool uniform = kappa_gt_1 && lambda_ok && norm_ok && contraction_ok && angle_ok && mu_ok;
    json strata = json::object();
    for (const auto& r : st.rows) {
        const std::string key = "(" + std::to_string(r.m_s) + "," + std::to_string(r.m_u) + ")";
        strata[key] = r.count == st.samples ? json("all") : json(r.count);
    }
    std::string summary;
    if (uniform && all_11) summary = "consistent with uniform hyperbolicity";
    else if (!uniform && !all_11) summary = "consistent: not uniformly hyperbolic on the sample";
    else summary = "inconsistent: strata and expansion diagnostics disagree";
    doc["verdict"] = {{"kappa_gt_1", kappa_gt_1},
                      {"all_lambda_ge_kappa", lambda_ok},
                      {"normalized", norm_ok},
                      {"contraction_ok", contraction_ok},
                      {"min_angle_gt_0", angle_ok},
                      {"max_mu_1", mu_ok},
                      {"strata", strata},
                      {"strata_all_11", all_11},
                      {"uniform_expansion", uniform},
                      {"consistent", uniform == all_11},
                      {"summary", summary}};
    doc["failures"] = failures;
    write_json(ctx.out / "qh_report.json", doc);
}

const std::map<std::string, std::function<void(const Context&)>>& table()
{
    static const std::map<std::string, std::function<void(const Context&)>> t{
        {"saddles", cmd_saddles},
        {"green", cmd_green},
        {"uniformize", cmd_uniformize},
        {"family-report", cmd_family_report},
        {"growth", cmd_growth},
        {"local-disks", cmd_local_disks},
        {"intersections", cmd_intersections},
        {"tangency-report", cmd_tangency_report},
        {"stratify", cmd_stratify},
        {"qh-report", cmd_qh_report},
    };
    return t;
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"saddles", "green", "uniformize", "family-report", "growth",
                                                "local-disks", "intersections", "tangency-report", "stratify",
                                                "qh-report"};
    return names;
}

void run_command(const std::string& name, const Context& ctx)
{
    const auto& t = table();
    const auto it = t.find(name);
    if (it == t.end()) throw std::invalid_argument("unknown subcommand: " + name);
    ensure_directory(ctx.out);
    it->second(ctx);
}

} // namespace henon::cli
