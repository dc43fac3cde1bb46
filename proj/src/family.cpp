#include "henon/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "henon/green.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GaussRule {
    std::vector<double> nodes; // on [0, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n)
{
    GaussRule rule;
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes.push_back(0.5 * (1.0 - x));
        rule.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
    }
    return rule;
}

// Parameter s near `guess` minimizing ||psi(s) - z||, by Gauss-Newton on the curve.
Complex project_to_curve(const CurveParam& psi, const ComplexPair& z, Complex guess, double* residual)
{
    Complex s = guess;
    for (int it = 0; it < 40; ++it) {
        const CurvePoint p = psi.evaluate_with_derivative(s);
        if (p.escaped) break;
        const Complex step = inner(p.dz, p.z - z) / inner(p.dz, p.dz);
        s -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    if (residual) *residual = distance(psi.evaluate(s).z, z);
    return s;
}

Direction side_direction(Side s) { return s == Side::unstable ? Direction::forward : Direction::backward; }

// Pattern search on G along the curve down to the step-size floor. G o xi is harmonic off K,
// so the search cannot stall at a positive local minimum.
Complex descend_green(const SeriesParametrization& xi, Complex z, double h, const GreenOptions& g)
{
    double gz = green_on_curve(xi, z, g);
    for (int it = 0; it < 4000 && gz > 0.0; ++it) {
        Complex best = z;
        double gb = gz;
        for (int k = 0; k < 8; ++k) {
            const Complex c = z + std::polar(h, k * std::numbers::pi / 4.0);
            const double gc = green_on_curve(xi, c, g);
            if (gc < gb) {
                best = c;
                gb = gc;
            }
        }
        if (best == z) {
            h *= 0.5;
            if (h < 1e-17 * std::max(1.0, std::abs(z))) break;
        } else {
            z = best;
            gz = gb;
        }
    }
    return z;
}

} // namespace

int CurveFamily::successor(std::size_t i) const
{
    if (kind != FamilyKind::saddle) return -1;
    const FamilyMember& m = members.at(i);
    const int n = saddles.at(static_cast<std::size_t>(m.cycle)).period;
    const int next = (m.position + 1) % n;
    return static_cast<int>(i) - m.position + next;
}

int CurveFamily::predecessor(std::size_t i) const
{
    if (kind != FamilyKind::saddle) return -1;
    const FamilyMember& m = members.at(i);
    const int n = saddles.at(static_cast<std::size_t>(m.cycle)).period;
    const int prev = (m.position + n - 1) % n;
    return static_cast<int>(i) - m.position + prev;
}

CurveFamily build_saddle_family(const HenonMap& f, int n_max, const FamilyOptions& opt)
{
    if (n_max < 0) throw std::invalid_argument("N_max must be non-negative");
    CurveFamily fam;
    fam.kind = FamilyKind::saddle;
    fam.map = std::make_shared<const HenonMap>(f);
    fam.source = "saddle N_max=" + std::to_string(n_max);

    for (int n = 1; n <= n_max; ++n) {
        const PeriodicSearch search = find_periodic(f, n, opt.search);
        fam.skipped += static_cast<int>(search.nonhyperbolic.size());
        for (const Cycle& c : search.cycles) {
            const Classification cls = classify(f, c);
            if (!cls.saddle) {
                fam.skipped += c.period;
                continue;
            }
            const int id = static_cast<int>(fam.saddles.size());
            fam.saddles.push_back(*cls.saddle);
            for (int k = 0; k < c.period; ++k) {
                FamilyMember m;
                m.base = c.points[static_cast<std::size_t>(k)];
                m.cycle = id;
                m.position = k;
                fam.members.push_back(m);
            }
        }
    }

    parallel_for(2 * fam.members.size(), opt.jobs, [&](std::size_t task) {
        FamilyMember& m = fam.members[task / 2];
        const Side side = task % 2 == 0 ? Side::unstable : Side::stable;
        const Saddle s = rebase(f, fam.saddles[static_cast<std::size_t>(m.cycle)], m.position);
        auto xi = std::make_shared<const SeriesParametrization>(normalize(linearize(f, s, side, opt.series), opt.normalize));
        (side == Side::unstable ? m.unstable : m.stable) = CurveParam(std::move(xi));
    });
    return fam;
}

CurveFamily build_recentered_family(const HenonMap& f, const Saddle& q, int samples, const FamilyOptions& opt,
                                    const RecenterOptions& rc)
{
    if (samples < 0) throw std::invalid_argument("sample count must be non-negative");
    if (!(rc.inner > 0.0 && rc.outer > rc.inner)) throw std::invalid_argument("annulus needs 0 < inner < outer");
    CurveFamily fam;
    fam.kind = FamilyKind::recentered;
    fam.map = std::make_shared<const HenonMap>(f);
    fam.saddles.push_back(q);
    fam.requested = samples;
    char buf[160];
    std::snprintf(buf, sizeof buf, "recentered anchor=(%.6g%+.6gi, %.6g%+.6gi) annulus=[%g, %g]", q.point().x.real(),
                  q.point().x.imag(), q.point().y.real(), q.point().y.imag(), rc.inner, rc.outer);
    fam.source = buf;

    std::vector<Side> sides{Side::unstable};
    if (rc.stable_side) sides.push_back(Side::stable);
    const double spacing = 0.25 * (rc.outer - rc.inner) / rc.rings;

    for (Side side : sides) {
        const Direction dir = side_direction(side);
        auto xi = std::make_shared<const SeriesParametrization>(normalize(linearize(f, q, side, opt.series), opt.normalize));

        struct Candidate {
            Complex zeta;
            ComplexPair y;
            double g = 0.0;
        };
        const std::size_t lattice = static_cast<std::size_t>(rc.rings) * static_cast<std::size_t>(rc.spokes);
        std::vector<Candidate> all(lattice);
        std::vector<char> keep(lattice, 0);
        parallel_for(lattice, opt.jobs, [&](std::size_t k) {
            const int i = static_cast<int>(k) / rc.spokes;
            const int j = static_cast<int>(k) % rc.spokes;
            const double rho = rc.inner + (rc.outer - rc.inner) * (i + 0.5) / rc.rings;
            const double theta = kTwoPi * (j + 0.5 * (i % 2)) / rc.spokes;
            const Complex zeta = descend_green(*xi, std::polar(rho, theta), spacing, opt.normalize.green);
            const Image img = evaluate_series(*xi, zeta);
            if (img.escaped || !in_k(f, img.z, dir, rc.filter_steps)) return;
            all[k] = {zeta, img.z, green(f, img.z, dir, opt.normalize.green).value};
            keep[k] = 1;
        });
        std::vector<Candidate> cands;
        for (std::size_t k = 0; k < lattice; ++k)
            if (keep[k]) cands.push_back(all[k]);
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.g < b.g; });

        std::vector<Candidate> chosen;
        for (const Candidate& c : cands) {
            if (static_cast<int>(chosen.size()) >= samples) break;
            bool close = false;
            for (const Candidate& o : chosen) close = close || std::abs(o.zeta - c.zeta) < spacing;
            if (!close) chosen.push_back(c);
        }

        const std::size_t first = fam.members.size();
        fam.members.resize(first + chosen.size());
        parallel_for(chosen.size(), opt.jobs, [&](std::size_t k) {
            FamilyMember& m = fam.members[first + k];
            m.base = chosen[k].y;
            m.zeta = chosen[k].zeta;
            (side == Side::unstable ? m.unstable : m.stable) = normalize_at(xi, chosen[k].zeta, opt.normalize);
        });
    }
    return fam;
}

std::vector<MemberLambda> member_lambdas(const CurveFamily& fam, Side side, int jobs)
{
    std::vector<MemberLambda> out;
    if (fam.kind != FamilyKind::saddle) return out;
    out.resize(fam.members.size());
    const Direction dir = side_direction(side);
    parallel_for(fam.members.size(), jobs, [&](std::size_t i) {
        const int next = side == Side::unstable ? fam.successor(i) : fam.predecessor(i);
        const CurveParam& a = fam.members[i].curve(side);
        const CurveParam& b = fam.members[static_cast<std::size_t>(next)].curve(side);
        const LambdaResult lr = lambda_of(*fam.map, a.series(), b.series());
        MemberLambda ml{static_cast<int>(i), next, lr.lambda, {}, lr.mismatch};

        const Complex t = 0.25;
        const ComplexPair target = fam.map->step(a.evaluate(t).z, dir);
        ml.lambda_matched = project_to_curve(b, target, lr.lambda * t, nullptr) / t;
        out[i] = ml;
    });
    return out;
}

GrowthProfile growth_profile(const CurveFamily& fam, const std::vector<double>& r_grid, const GrowthOptions& opt)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fam.members.size(); ++i)
        if (fam.members[i].curve(opt.side).valid()) idx.push_back(i);
    if (idx.empty()) throw std::invalid_argument("growth profile needs a nonempty family");

    GrowthProfile prof;
    prof.side = opt.side;
    prof.r_grid = r_grid;
    const double deg = static_cast<double>(fam.map->degree());
    std::vector<std::vector<double>> m(idx.size());
    prof.member_radius.assign(fam.members.size(), std::numeric_limits<double>::quiet_NaN());

    parallel_for(idx.size(), opt.jobs, [&](std::size_t k) {
        const CurveParam& psi = fam.members[idx[k]].curve(opt.side);
        for (double r : r_grid) m[k].push_back(psi.circle_max_green(r, opt.green));
        prof.member_radius[idx[k]] =
            growth_radius([&](double r) { return psi.circle_max_green(r, opt.green); }, deg, 1.0, opt.rel_tol);
    });

    for (std::size_t j = 0; j < r_grid.size(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& row : m) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        prof.m_of_r.push_back(lo);
        prof.M_of_r.push_back(hi);
    }
    prof.kappa = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
        if (prof.member_radius[i] < prof.kappa) {
            prof.kappa = prof.member_radius[i];
            prof.kappa_member = static_cast<int>(i);
        }
    }
    return prof;
}

double LocalDisk::radius_at(double theta) const
{
    const std::size_t n = radii.size();
    double u = theta / kTwoPi;
    u -= std::floor(u);
    const double pos = u * static_cast<double>(n);
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(pos));
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * radii[i] + w * radii[(i + 1) % n];
}

LocalDisk local_disk(const CurveParam& psi, double r, const DiskOptions& opt)
{
    if (!(r > 0.0)) throw std::invalid_argument("disk radius must be positive");
    LocalDisk d;
    d.r = r;
    const ComplexPair x = psi.base();
    const double speed0 = psi.derivative_at_origin().norm();
    const double h0 = r / (32.0 * speed0);
    const double s_max = opt.max_extent * r / speed0;

    auto dist = [&](Complex t) {
        const Image img = psi.evaluate(t);
        return img.escaped ? std::numeric_limits<double>::infinity() : distance(img.z, x);
    };

    d.radii.resize(static_cast<std::size_t>(opt.rays));
    std::vector<char> reentry(static_cast<std::size_t>(opt.rays), 0);
    for (int i = 0; i < opt.rays; ++i) {
        const Complex u = std::polar(1.0, kTwoPi * i / opt.rays);
        double s = 0.0;
        double s_prev = 0.0;
        bool found = false;
        while (s <= s_max) {
            const CurvePoint p = psi.evaluate_with_derivative(s * u);
            const double dd = p.escaped ? std::numeric_limits<double>::infinity() : distance(p.z, x);
            if (dd >= r) {
                found = true;
                break;
            }
            const double step = std::clamp(0.5 * (r - dd) / std::max(p.dz.norm(), 1e-300), 0.25 * h0, 8.0 * h0);
            s_prev = s;
            s += step;
        }
        if (!found) throw std::runtime_error("disk boundary not reached along a ray; radius too large for the curve");
        double lo = s_prev;
        double hi = s;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (dist(mid * u) < r ? lo : hi) = mid;
        }
        const double rho = 0.5 * (lo + hi);
        d.radii[static_cast<std::size_t>(i)] = rho;
        for (int k = 1; k <= 8; ++k)
            if (dist(rho * (1.0 + 0.25 * k / 8.0) * u) < r) reentry[static_cast<std::size_t>(i)] = 1;
    }

    d.rho_in = *std::min_element(d.radii.begin(), d.radii.end());
    d.rho_out = *std::max_element(d.radii.begin(), d.radii.end());
    for (int i = 0; i < opt.rays; ++i) {
        const double rho = d.radii[static_cast<std::size_t>(i)];
        d.boundary.push_back(std::polar(rho, kTwoPi * i / opt.rays));
        d.boundary_error = std::max(d.boundary_error, std::abs(dist(d.boundary.back()) - r));
        const double nb = d.radii[static_cast<std::size_t>((i + 1) % opt.rays)];
        if (reentry[static_cast<std::size_t>(i)] || std::abs(nb - rho) > 0.25 * std::min(nb, rho)) d.star_shaped = false;
    }

    // Area with multiplicity: polar Gauss-Legendre along rays, trapezoid in the angle.
    const GaussRule rule = gauss_legendre(opt.radial_nodes);
    double area = 0.0;
    for (int i = 0; i < opt.rays; ++i) {
        const double rho = d.radii[static_cast<std::size_t>(i)];
        const Complex u = std::polar(1.0, kTwoPi * i / opt.rays);
        double ray = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double s = rho * rule.nodes[k];
            const double speed = psi.evaluate_with_derivative(s * u).dz.norm();
            ray += rule.weights[k] * speed * speed * s;
        }
        area += ray * rho;
    }
    d.area = area * kTwoPi / opt.rays;
    return d;
}

std::vector<LocalDisk> local_disks(const CurveFamily& fam, double r, Side side, const DiskOptions& opt, int jobs)
{
    std::vector<LocalDisk> out(fam.members.size());
    parallel_for(fam.members.size(), jobs, [&](std::size_t i) {
        const CurveParam& psi = fam.members[i].curve(side);
        if (!psi.valid()) return;
        out[i] = local_disk(psi, r, opt);
        out[i].owner = static_cast<int>(i);
    });
    return out;
}

std::vector<ComplexPair> disk_samples(const CurveParam& psi, const LocalDisk& d, int rings, int rays)
{
    std::vector<ComplexPair> pts{psi.base()};
    for (int k = 1; k <= rings; ++k) {
        for (int i = 0; i < rays; ++i) {
            const double theta = kTwoPi * i / rays;
            const double s = d.radius_at(theta) * k / rings;
            pts.push_back(psi.evaluate(std::polar(s, theta)).z);
        }
    }
    return pts;
}

double disk_hausdorff(const CurveParam& a, const LocalDisk& da, const CurveParam& b, const LocalDisk& db)
{
    const auto pa = disk_samples(a, da);
    const auto pb = disk_samples(b, db);
    auto directed = [](const std::vector<ComplexPair>& u, const std::vector<ComplexPair>& v) {
        double worst = 0.0;
        for (const auto& p : u) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : v) best = std::min(best, distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(pa, pb), directed(pb, pa));
}

double disk_separation(const CurveParam& a, const LocalDisk& da, const CurveParam& b, const LocalDisk& db)
{
    const auto pa = disk_samples(a, da);
    const auto pb = disk_samples(b, db);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pa)
        for (const auto& q : pb) best = std::min(best, distance(p, q));
    return best;
}

ContractionReport contraction_check(const CurveFamily& fam, const GrowthProfile& profile,
                                    const std::vector<LocalDisk>& disks, const CurveFamily* neighbours,
                                    const ContractionOptions& opt)
{
    ContractionReport rep;
    rep.kappa = profile.kappa;
    rep.rho1 = std::numeric_limits<double>::infinity();
    for (const auto& d : disks) {
        if (d.owner < 0) continue;
        rep.rho1 = std::min(rep.rho1, d.rho_in);
        rep.rho2 = std::max(rep.rho2, d.rho_out);
    }
    const double log_kappa = std::log(rep.kappa);
    rep.n_threshold = 1;
    while (rep.rho1 * std::pow(rep.kappa, rep.n_threshold) <= rep.rho2 && rep.n_threshold < 10000) ++rep.n_threshold;
    if (fam.kind != FamilyKind::saddle) return rep;

    const HenonMap& f = *fam.map;
    const auto lambdas = member_lambdas(fam, Side::unstable, opt.jobs);
    const std::size_t n = fam.members.size();
    const double r = disks.front().r;

    // f^{-N} of disk samples lands in the disk at f^{-N}(x), at parameter zeta / Lambda.
    std::vector<int> fails(n, 0);
    std::vector<int> counts(n, 0);
    std::vector<double> route(n, 0.0);
    parallel_for(n, opt.jobs, [&](std::size_t i) {
        int back = static_cast<int>(i);
        for (int k = 0; k < rep.n_threshold; ++k) back = fam.predecessor(static_cast<std::size_t>(back));
        Complex big = 1.0;
        for (int j = back, k = 0; k < rep.n_threshold; ++k) {
            big *= lambdas[static_cast<std::size_t>(j)].lambda;
            j = fam.successor(static_cast<std::size_t>(j));
        }
        const CurveParam& psi = fam.members[i].unstable;
        const CurveParam& psi_back = fam.members[static_cast<std::size_t>(back)].unstable;
        const LocalDisk& db = disks[static_cast<std::size_t>(back)];
        const ComplexPair xb = fam.members[static_cast<std::size_t>(back)].base;
        for (int ray = 0; ray < opt.inclusion_rays; ++ray) {
            const double theta = kTwoPi * ray / opt.inclusion_rays;
            for (int ring = 1; ring <= 3; ++ring) {
                const Complex zeta = std::polar(disks[i].radius_at(theta) * ring / 3.0, theta);
                const Image w = iterate(f, psi.evaluate(zeta).z, -rep.n_threshold);
                const Complex zb = zeta / big;
                ++counts[i];
                const bool inside = !w.escaped && db.contains(zb) && distance(w.z, xb) < r;
                if (!inside) ++fails[i];
                if (!w.escaped) route[i] = std::max(route[i], distance(psi_back.evaluate(zb).z, w.z));
            }
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        rep.inclusion_samples += counts[i];
        rep.inclusion_failures += fails[i];
        rep.inclusion_route_error = std::max(rep.inclusion_route_error, route[i]);
    }

    // Backward contraction of a pair on each disk: least-squares slope of log distance.
    rep.pairs.resize(n);
    parallel_for(n, opt.jobs, [&](std::size_t i) {
        const CurveParam& psi = fam.members[i].unstable;
        const Complex z1 = 0.5 * disks[i].rho_in;
        ComplexPair a = psi.evaluate(z1).z;
        ComplexPair b = psi.evaluate(-z1).z;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (int k = 1; k <= opt.fit_steps; ++k) {
            a = f.step(a, Direction::backward);
            b = f.step(b, Direction::backward);
            const double y = std::log(distance(a, b));
            sx += k;
            sy += y;
            sxx += static_cast<double>(k) * k;
            sxy += k * y;
            syy += y * y;
        }
        const double m = opt.fit_steps;
        const double cxx = sxx - sx * sx / m;
        const double cxy = sxy - sx * sy / m;
        const double cyy = syy - sy * sy / m;
        const double slope = cxy / cxx;
        rep.pairs[i] = {static_cast<int>(i), -slope, cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0};
    });
    rep.slowest = 0;
    rep.rates_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (rep.pairs[i].rate < rep.pairs[static_cast<std::size_t>(rep.slowest)].rate) rep.slowest = static_cast<int>(i);
        rep.rates_ok = rep.rates_ok && rep.pairs[i].rate >= (1.0 - opt.rate_slack) * log_kappa;
    }
    rep.slowest_ok =
        std::abs(rep.pairs[static_cast<std::size_t>(rep.slowest)].rate - log_kappa) <= opt.rate_slack * log_kappa;

    // Forward escape of recentered neighbours sitting on a member's disk.
    if (neighbours && neighbours->kind == FamilyKind::recentered && !neighbours->saddles.empty()) {
        int anchor = -1;
        for (std::size_t i = 0; i < n; ++i)
            if (distance(fam.members[i].base, neighbours->saddles.front().point()) < 1e-9) anchor = static_cast<int>(i);
        if (anchor >= 0) {
            const LocalDisk& d0 = disks[static_cast<std::size_t>(anchor)];
            std::vector<const FamilyMember*> near;
            for (const auto& m : neighbours->members)
                if (m.unstable.valid() && d0.contains(m.zeta) &&
                    distance(m.base, fam.members[static_cast<std::size_t>(anchor)].base) > 1e-9)
                    near.push_back(&m);
            rep.escapes.resize(near.size());
            parallel_for(near.size(), opt.jobs, [&](std::size_t k) {
                EscapeRecord e;
                e.member = anchor;
                e.zeta = near[k]->zeta;
                e.predicted = static_cast<int>(std::ceil(std::log(rep.rho2 / std::abs(e.zeta)) / log_kappa));
                ComplexPair z = near[k]->base;
                Complex zeta = e.zeta;
                std::size_t j = static_cast<std::size_t>(anchor);
                for (int step = 1; step <= opt.escape_max; ++step) {
                    z = f.step(z, Direction::forward);
                    zeta *= lambdas[j].lambda;
                    j = static_cast<std::size_t>(fam.successor(j));
                    const ComplexPair& xj = fam.members[j].base;
                    if (distance(z, xj) >= r || !disks[j].contains(zeta)) {
                        e.measured = step;
                        break;
                    }
                    double res = 0.0;
                    zeta = project_to_curve(fam.members[j].unstable, z, zeta, &res);
                    if (res > 1e-6 * r || !disks[j].contains(zeta)) {
                        e.measured = step;
                        break;
                    }
                }
                rep.escapes[k] = e;
            });
        }
    }
    rep.escapes_ok = !rep.escapes.empty();
    for (const auto& e : rep.escapes)
        rep.escapes_ok = rep.escapes_ok && e.measured > 0 && std::abs(e.measured - e.predicted) <= opt.margin;
    return rep;
}

std::string OrderEstimate::stratum() const
{
    return "(" + std::to_string(tau_s) + "," + std::to_string(tau_u) + ")";
}

std::optional<OrderEstimate> estimate_tau(const CurveFamily& fam, const ComplexPair& x, const TauOptions& opt)
{
    OrderEstimate est;
    est.at = x;
    for (Side side : {Side::unstable, Side::stable}) {
        int tau = 0;
        int count = 0;
        double gamma = std::numeric_limits<double>::infinity();
        std::vector<double> evidence;
        for (const auto& m : fam.members) {
            const CurveParam& psi = m.curve(side);
            if (!psi.valid() || distance(m.base, x) > opt.radius) continue;
            ++count;
            const CurveJet jet = psi.jet(opt.order);
            std::vector<double> mags;
            for (const auto& a : jet.coeffs) mags.push_back(a.norm());
            const double top = *std::max_element(mags.begin(), mags.end());
            int first = 0;
            for (std::size_t j = 0; j < mags.size() && first == 0; ++j)
                if (mags[j] > opt.threshold * top) first = static_cast<int>(j) + 1;
            const double lead = mags[static_cast<std::size_t>(first - 1)];
            if (first > tau) {
                tau = first;
                gamma = lead;
                evidence = mags;
            } else if (first == tau) {
                gamma = std::min(gamma, lead);
            }
        }
        if (count == 0) return std::nullopt;
        if (side == Side::unstable) {
            est.tau_u = tau;
            est.gamma_u = gamma;
            est.members_u = count;
            est.evidence_u = evidence;
        } else {
            est.tau_s = tau;
            est.members_s = count;
            est.evidence_s = evidence;
        }
    }
    return est;
}

StrataTable stratify(const CurveFamily& fam, const std::vector<ComplexPair>& samples, const TauOptions& opt)
{
    StrataTable table;
    table.samples = static_cast<int>(samples.size());
    std::map<std::pair<int, int>, int> counts;
    for (const auto& x : samples) {
        const auto est = estimate_tau(fam, x, opt);
        if (!est) {
            ++table.undefined;
            continue;
        }
        ++counts[{est->tau_s, est->tau_u}];
    }
    for (const auto& [key, count] : counts) table.rows.push_back({key.first, key.second, count, false});
    for (auto& row : table.rows) {
        row.maximal = true;
        for (const auto& other : table.rows)
            if ((other.m_s != row.m_s || other.m_u != row.m_u) && other.m_s >= row.m_s && other.m_u >= row.m_u)
                row.maximal = false;
    }
    const auto it = counts.find({1, 1});
    if (table.samples > 0) table.fraction_11 = it == counts.end() ? 0.0 : static_cast<double>(it->second) / table.samples;
    return table;
}

} // namespace henon
