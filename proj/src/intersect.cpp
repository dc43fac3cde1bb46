#include "henon/intersect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "henon/green.hpp"
#include "henon/parallel.hpp"

namespace henon {

namespace {

constexpr double kPi = std::numbers::pi;

struct NewtonResult {
    Complex zu;
    Complex zs;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool singular = false;
};

// Newton on psi_u(zu) - psi_s(zs) = target.
NewtonResult newton2(const CurveParam& pu, const CurveParam& ps, Complex zu, Complex zs, const ComplexPair& target,
                     int max_iter, double step_cap)
{
    NewtonResult out{zu, zs};
    for (int it = 0; it < max_iter; ++it) {
        const CurvePoint a = pu.evaluate_with_derivative(zu);
        const CurvePoint b = ps.evaluate_with_derivative(zs);
        if (a.escaped || b.escaped) return out;
        const ComplexPair h = a.z - b.z - target;
        out.residual = h.norm();
        const Complex det = -a.dz.x * b.dz.y + b.dz.x * a.dz.y;
        if (std::abs(det) <= 1e-12 * a.dz.norm() * b.dz.norm()) {
            out.singular = true;
            return out;
        }
        // [a' , -b'] (du, ds)^T = -h
        Complex du = (-h.x * -b.dz.y - -b.dz.x * -h.y) / det;
        Complex ds = (a.dz.x * -h.y - a.dz.y * -h.x) / det;
        const double len = std::max(std::abs(du), std::abs(ds));
        if (len > step_cap) {
            du *= step_cap / len;
            ds *= step_cap / len;
        }
        zu += du;
        zs += ds;
        out.zu = zu;
        out.zs = zs;
        const double scale = 1.0 + std::max(a.z.norm(), 1.0);
        if (len <= 1e-15 * (1.0 + std::abs(zu) + std::abs(zs)) || out.residual <= 1e-15 * scale) break;
    }
    const CurvePoint a = pu.evaluate_with_derivative(zu);
    const CurvePoint b = ps.evaluate_with_derivative(zs);
    out.residual = (a.z - b.z - target).norm();
    out.converged = out.residual <= 1e-11 * (1.0 + a.z.norm());
    return out;
}

// Damped Gauss-Newton (Levenberg-Marquardt) on ||psi_u(zu) - psi_s(zs)||^2, for seeds where
// the Newton Jacobian degenerates.
NewtonResult least_squares2(const CurveParam& pu, const CurveParam& ps, Complex zu, Complex zs, int max_iter)
{
    double damping = 1e-3;
    NewtonResult out{zu, zs};
    auto value = [&](Complex u, Complex s) { return (pu.evaluate(u).z - ps.evaluate(s).z).norm(); };
    double cur = value(zu, zs);
    for (int it = 0; it < max_iter && cur > 0.0; ++it) {
        const CurvePoint a = pu.evaluate_with_derivative(zu);
        const CurvePoint b = ps.evaluate_with_derivative(zs);
        const ComplexPair h = a.z - b.z;
        Mat2 j;
        j << a.dz.x, -b.dz.x, a.dz.y, -b.dz.y;
        const Mat2 jh = j.adjoint();
        Mat2 normal = jh * j;
        const double scale = normal.diagonal().cwiseAbs().maxCoeff();
        normal.diagonal().array() += damping * scale;
        const Vec2 step = normal.partialPivLu().solve(-(jh * h.vec()));
        const Complex nu = zu + step(0);
        const Complex ns = zs + step(1);
        const double next = value(nu, ns);
        if (next < cur) {
            zu = nu;
            zs = ns;
            const bool small = std::abs(cur - next) <= 1e-16 * (1.0 + cur);
            cur = next;
            damping = std::max(damping * 0.3, 1e-15);
            if (small) break;
        } else {
            damping *= 10.0;
            if (damping > 1e12) break;
        }
    }
    out.zu = zu;
    out.zs = zs;
    out.residual = cur;
    out.converged = true;
    return out;
}

std::vector<Complex> disk_grid(double r, int n)
{
    std::vector<Complex> pts{0.0};
    if (n < 2) return pts;
    const double h = 2.0 * r / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Complex z(-r + i * h, -r + j * h);
            if (std::abs(z) <= r && std::abs(z) > 0.0) pts.push_back(z);
        }
    return pts;
}

bool record_less(const IntersectionRecord& a, const IntersectionRecord& b)
{
    auto key = [](const IntersectionRecord& r) {
        return std::array<double, 4>{r.zeta_u.real(), r.zeta_u.imag(), r.zeta_s.real(), r.zeta_s.imag()};
    };
    return key(a) < key(b);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unit vector in C^2 with a rotation-invariant distribution (Box-Muller on explicit bits).
ComplexPair random_direction(std::mt19937_64& rng)
{
    double g[4];
    for (int i = 0; i < 4; i += 2) {
        const double u1 = std::max(uniform01(rng), 1e-300);
        const double u2 = uniform01(rng);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        g[i] = rad * std::cos(2.0 * kPi * u2);
        g[i + 1] = rad * std::sin(2.0 * kPi * u2);
    }
    const ComplexPair v{Complex(g[0], g[1]), Complex(g[2], g[3])};
    return v / Complex(v.norm());
}

// Parameter of psi_s whose offset to z is normal to t: <t, z - psi_s(s)> = 0.
Complex normal_foot(const CurveParam& ps, const ComplexPair& z, const ComplexPair& t, Complex s)
{
    for (int it = 0; it < 60; ++it) {
        const CurvePoint b = ps.evaluate_with_derivative(s);
        const Complex fval = inner(t, z - b.z);
        const Complex fder = -inner(t, b.dz);
        const Complex step = fval / fder;
        s -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) break;
    }
    return s;
}

int modal(const std::vector<int>& counts)
{
    std::map<int, int> freq;
    for (int c : counts) ++freq[c];
    int best = 0;
    int best_n = -1;
    for (const auto& [c, n] : freq)
        if (n >= best_n) {
            best = c;
            best_n = n;
        }
    return best;
}

} // namespace

std::vector<IntersectionRecord> find_intersections(const CurveParam& psi_u, const CurveParam& psi_s, double ru,
                                                   double rs, const IntersectOptions& opt)
{
    const auto gu = disk_grid(ru, opt.seeds);
    const auto gs = disk_grid(rs, opt.seeds);
    std::vector<CurvePoint> iu;
    std::vector<CurvePoint> is;
    for (Complex z : gu) iu.push_back(psi_u.evaluate_with_derivative(z));
    for (Complex z : gs) is.push_back(psi_s.evaluate_with_derivative(z));
    const double hu = opt.seeds > 1 ? 2.0 * ru / (opt.seeds - 1) : ru;
    const double hs = opt.seeds > 1 ? 2.0 * rs / (opt.seeds - 1) : rs;

    std::vector<IntersectionRecord> out;
    auto add = [&](const NewtonResult& nr, bool suspect) {
        if (std::abs(nr.zu) > ru * (1.0 + 1e-9) || std::abs(nr.zs) > rs * (1.0 + 1e-9)) return;
        const CurvePoint a = psi_u.evaluate_with_derivative(nr.zu);
        const CurvePoint b = psi_s.evaluate_with_derivative(nr.zs);
        const double residual = (a.z - b.z).norm();
        if (a.escaped || b.escaped || residual > opt.residual_tol) return;
        for (const auto& r : out)
            if (std::abs(r.zeta_u - nr.zu) + std::abs(r.zeta_s - nr.zs) <= opt.dedup) return;
        IntersectionRecord rec;
        rec.zeta_u = nr.zu;
        rec.zeta_s = nr.zs;
        rec.point = a.z;
        rec.residual = residual;
        rec.angle = line_angle(a.dz, b.dz);
        rec.tangency_suspect = suspect;
        out.push_back(rec);
    };

    const double cap = 0.5 * std::max(ru, rs);
    for (std::size_t i = 0; i < gu.size(); ++i) {
        if (iu[i].escaped) continue;
        for (std::size_t j = 0; j < gs.size(); ++j) {
            if (is[j].escaped) continue;
            const double reach = 2.0 * (hu * iu[i].dz.norm() + hs * is[j].dz.norm());
            if ((iu[i].z - is[j].z).norm() > reach) continue;
            NewtonResult nr = newton2(psi_u, psi_s, gu[i], gs[j], {}, opt.max_newton, cap);
            if (nr.singular) {
                nr = least_squares2(psi_u, psi_s, gu[i], gs[j], 400);
                add(nr, true);
            } else if (nr.converged) {
                add(nr, false);
            }
        }
    }
    // Near a multiple root Newton stalls at a spread of about residual^{1/mu}: merge suspect
    // records within the cluster radius and polish their centroid.
    std::vector<IntersectionRecord> merged;
    std::vector<char> used(out.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (used[i]) continue;
        const bool weak = out[i].tangency_suspect || out[i].angle <= opt.angle_tol;
        if (!weak) {
            merged.push_back(out[i]);
            continue;
        }
        Complex su = 0.0;
        Complex ss = 0.0;
        int cnt = 0;
        for (std::size_t j = i; j < out.size(); ++j) {
            if (used[j] || !(out[j].tangency_suspect || out[j].angle <= opt.angle_tol)) continue;
            const double d = std::abs(out[j].zeta_u - out[i].zeta_u) + std::abs(out[j].zeta_s - out[i].zeta_s);
            if (d > opt.cluster * (1.0 + std::abs(out[i].zeta_u))) continue;
            used[j] = 1;
            su += out[j].zeta_u;
            ss += out[j].zeta_s;
            ++cnt;
        }
        IntersectionRecord rec = out[i];
        const NewtonResult polish = least_squares2(psi_u, psi_s, su / static_cast<double>(cnt), ss / static_cast<double>(cnt), 200);
        rec.zeta_u = polish.zu;
        rec.zeta_s = polish.zs;
        const CurvePoint a = psi_u.evaluate_with_derivative(rec.zeta_u);
        const CurvePoint b = psi_s.evaluate_with_derivative(rec.zeta_s);
        rec.point = a.z;
        rec.residual = (a.z - b.z).norm();
        rec.angle = line_angle(a.dz, b.dz);
        rec.tangency_suspect = true;
        merged.push_back(rec);
    }
    std::sort(merged.begin(), merged.end(), record_less);
    return merged;
}

MultiplicityResult multiplicity(const CurveParam& psi_u, const CurveParam& psi_s, const IntersectionRecord& rec,
                                const MultiplicityOptions& opt)
{
    MultiplicityResult res;
    const CurvePoint a0 = psi_u.evaluate_with_derivative(rec.zeta_u);
    const CurvePoint b0 = psi_s.evaluate_with_derivative(rec.zeta_s);
    const double rho = opt.radius;
    const double rho_s = 2.0 * rho * std::max(1.0, a0.dz.norm() / b0.dz.norm());
    const double scale = std::max(a0.dz.norm(), b0.dz.norm());
    const ComplexPair t = b0.dz / Complex(b0.dz.norm());

    // Perturbation counter.
    std::mt19937_64 rng(opt.seed);
    std::vector<Complex> seeds_u{rec.zeta_u};
    for (int ring = 1; ring <= 4; ++ring)
        for (int k = 0; k < 12; ++k) seeds_u.push_back(rec.zeta_u + std::polar(rho * ring / 4.0, 2.0 * kPi * (k + 0.5 * ring) / 12));
    for (int d = 0; d < opt.directions; ++d) {
        const ComplexPair eps = random_direction(rng) * Complex(opt.eps * scale);
        std::vector<std::pair<Complex, Complex>> sols;
        for (Complex zu : seeds_u) {
            const ComplexPair target = psi_u.evaluate(zu).z - eps;
            Complex zs = rec.zeta_s;
            for (int it = 0; it < 30; ++it) {
                const CurvePoint b = psi_s.evaluate_with_derivative(zs);
                const Complex step = inner(b.dz, b.z - target) / inner(b.dz, b.dz);
                zs -= step;
                if (std::abs(step) <= 1e-15 * (1.0 + std::abs(zs))) break;
            }
            const NewtonResult nr = newton2(psi_u, psi_s, zu, zs, eps, 80, 0.25 * rho);
            if (!nr.converged || nr.singular) continue;
            if (std::abs(nr.zu - rec.zeta_u) >= rho || std::abs(nr.zs - rec.zeta_s) >= rho_s) continue;
            bool dup = false;
            for (const auto& s : sols)
                dup = dup || std::abs(s.first - nr.zu) + std::abs(s.second - nr.zs) <= 1e-9 * (1.0 + rho);
            if (!dup) sols.push_back({nr.zu, nr.zs});
        }
        res.counts.push_back(static_cast<int>(sols.size()));
    }
    res.by_perturbation = modal(res.counts);

    // Argument-principle counter on g(zu) = <n, psi_u(zu) - psi_s(s(zu))>, s(zu) the normal foot.
    const ComplexPair n{-std::conj(t.y), std::conj(t.x)};
    Complex foot = rec.zeta_s;
    auto g = [&](double theta) {
        const ComplexPair z = psi_u.evaluate(rec.zeta_u + std::polar(rho, theta)).z;
        foot = normal_foot(psi_s, z, t, foot);
        return inner(n, z - psi_s.evaluate(foot).z);
    };
    // Phase change along an arc, bisected until each step turns by at most pi/4.
    std::function<double(double, Complex, double, Complex, int)> arc = [&](double t0, Complex g0, double t1,
                                                                              Complex g1, int depth) {
        const double d = std::arg(g1 / g0);
        if (std::abs(d) <= kPi / 4 || depth == 0) return d;
        const double tm = 0.5 * (t0 + t1);
        const Complex gm = g(tm);
        return arc(t0, g0, tm, gm, depth - 1) + arc(tm, gm, t1, g1, depth - 1);
    };
    double winding = 0.0;
    const int m = std::max(16, opt.arg_samples);
    Complex prev = g(0.0);
    for (int i = 1; i <= m; ++i) {
        const double t0 = 2.0 * kPi * (i - 1) / m;
        const double t1 = 2.0 * kPi * i / m;
        const Complex cur = g(t1);
        winding += arc(t0, prev, t1, cur, 16);
        prev = cur;
    }
    res.by_argument = static_cast<int>(std::lround(winding / (2.0 * kPi)));
    res.agree = res.by_argument == res.by_perturbation;
    res.mu = std::max(res.by_argument, res.by_perturbation);
    return res;
}

CurveJet jet_of(const CurveParam& psi, int order) { return psi.jet(order); }

CurveJet jet_of_pushforward(const HenonMap& f, const CurveJet& jet, int n, int order, std::optional<Complex> lambda)
{
    if (order < 1) throw std::invalid_argument("jet order must be positive");
    SeriesPair s(order);
    s.set_coeff(0, jet.base);
    for (int j = 1; j <= std::min(order, jet.order()); ++j) s.set_coeff(j, jet.coeffs[static_cast<std::size_t>(j - 1)]);
    const Direction dir = n >= 0 ? Direction::forward : Direction::backward;
    for (int i = 0; i < std::abs(n); ++i) s = f.step(s, dir);
    CurveJet out;
    out.base = s.coeff(0);
    Complex scale = 1.0;
    for (int j = 1; j <= order; ++j) {
        if (lambda) scale *= *lambda;
        out.coeffs.push_back(s.coeff(j) / scale);
    }
    return out;
}

TangentPair manufacture_tangent_pair(const HenonMap& f, const Saddle& s, int k, Complex c, double kick, int order)
{
    if (s.period != 1) throw std::invalid_argument("tangent pairs are manufactured at fixed saddles");
    if (k < 1 || order < k + 1) throw std::invalid_argument("need 1 <= k and order >= k + 1");
    const auto stable = std::make_shared<const SeriesParametrization>(normalize(linearize(f, s, Side::stable)));
    TangentPair pair;
    pair.k = k;
    pair.c = c;
    pair.mu_step = s.nu_s;
    pair.stable = CurveParam(stable).jet(order);
    pair.unstable.base = pair.stable.base;
    Complex cj = 1.0;
    for (int j = 1; j <= order; ++j) {
        cj *= c;
        pair.unstable.coeffs.push_back(pair.stable.coeffs[static_cast<std::size_t>(j - 1)] * cj);
    }
    pair.unstable.coeffs[static_cast<std::size_t>(k)] += s.e_u * Complex(kick);
    return pair;
}

DecayTable tangency_decay_experiment(const HenonMap& f, const TangentPair& pair, double kappa, int n_max,
                                     const DecayOptions& opt)
{
    DecayTable table;
    table.k = pair.k;
    table.kappa = kappa;
    table.target = -2.0 * std::log(kappa);
    const int order = pair.unstable.order();
    const double deg = static_cast<double>(f.degree());

    auto m = [&](double r) {
        return circle_max([&](Complex t) { return green(f, pair.unstable.evaluate(t), Direction::forward).value; },
                          0.0, r, 128);
    };
    const double alpha0 = growth_radius(m, 1.0, 1e-3, 1e-13);

    double alpha = alpha0;
    for (int n = 0; n <= n_max; ++n) {
        const CurveJet pu = jet_of_pushforward(f, pair.unstable, n, order);
        const CurveJet ps = jet_of_pushforward(f, pair.stable, n, order);
        if (n > 0) alpha = growth_radius(m, std::pow(deg, -n), 0.25 * alpha, 1e-13);
        DecayRow row;
        row.n = n;
        row.lambda = alpha0 / alpha;
        row.mu = std::pow(std::abs(pair.mu_step), n);
        double an = 1.0;
        for (int j = 1; j <= pair.k + 1; ++j) {
            an *= alpha;
            row.a.push_back(pu.coeffs[static_cast<std::size_t>(j - 1)].norm() * an);
        }
        Complex cj = 1.0;
        for (int j = 1; j <= pair.k; ++j) {
            cj *= pair.c;
            const ComplexPair& u = pu.coeffs[static_cast<std::size_t>(j - 1)];
            const ComplexPair& s = ps.coeffs[static_cast<std::size_t>(j - 1)];
            const double rel = (u - s * cj).norm() / std::max(u.norm(), 1e-300);
            row.law_residual = std::max(row.law_residual, rel);
        }
        table.max_law_residual = std::max(table.max_law_residual, row.law_residual);
        table.rows.push_back(row);
    }

    for (int j = 1; j <= pair.k + 1; ++j) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int cnt = 0;
        const double a0 = table.rows.front().a[static_cast<std::size_t>(j - 1)];
        for (const auto& row : table.rows) {
            if (row.n < opt.n_min) continue;
            const double v = row.a[static_cast<std::size_t>(j - 1)];
            if (v <= opt.floor * a0) break;
            const double y = std::log(v);
            sx += row.n;
            sy += y;
            sxx += static_cast<double>(row.n) * row.n;
            sxy += row.n * y;
            ++cnt;
        }
        table.exponent.push_back(cnt >= 2 ? (sxy - sx * sy / cnt) / (sxx - sx * sx / cnt)
                                          : std::numeric_limits<double>::quiet_NaN());
    }
    table.bound_ok = true;
    table.within_slack = true;
    for (int j = 1; j <= pair.k; ++j) {
        const double e = table.exponent[static_cast<std::size_t>(j - 1)];
        table.bound_ok = table.bound_ok && e <= (1.0 - opt.slack) * table.target;
        table.within_slack = table.within_slack && std::abs(e - table.target) <= opt.slack * std::abs(table.target);
    }
    table.top_persists = std::isnan(table.exponent.back()) ? false
                                                           : table.exponent.back() >= -opt.slack * std::abs(table.target);
    return table;
}

TransversalityReport transversality_report(const CurveFamily& fam_s, const CurveFamily& fam_u,
                                           const TransversalityOptions& opt)
{
    TransversalityReport rep;
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < fam_u.members.size(); ++i) {
        if (!fam_u.members[i].unstable.valid()) continue;
        for (std::size_t j = 0; j < fam_s.members.size(); ++j)
            if (fam_s.members[j].stable.valid()) pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
    rep.scans.resize(pairs.size());
    parallel_for(pairs.size(), opt.jobs, [&](std::size_t p) {
        const CurveParam& pu = fam_u.members[static_cast<std::size_t>(pairs[p].first)].unstable;
        const CurveParam& ps = fam_s.members[static_cast<std::size_t>(pairs[p].second)].stable;
        PairScan scan{pairs[p].first, pairs[p].second, find_intersections(pu, ps, opt.ru, opt.rs, opt.intersect)};
        for (std::size_t r = 0; r < scan.records.size(); ++r) {
            auto& rec = scan.records[r];
            MultiplicityOptions mo = opt.multiplicity;
            // Shrink the cluster ball to keep neighbouring records outside it.
            for (std::size_t q = 0; q < scan.records.size(); ++q)
                if (q != r) mo.radius = std::min(mo.radius, 0.45 * std::abs(scan.records[q].zeta_u - rec.zeta_u));
            mo.seed = opt.multiplicity.seed + 7919u * static_cast<std::uint64_t>(p) + r;
            const MultiplicityResult mr = multiplicity(pu, ps, rec, mo);
            rec.mu = std::max(1, mr.mu);
            rec.k = rec.mu - 1;
            rec.mu_perturbation = mr.by_perturbation;
            rec.mu_argument = mr.by_argument;
            rec.counters_disagree = !mr.agree;
        }
        rep.scans[p] = std::move(scan);
    });

    rep.angle_histogram.assign(10, 0);
    rep.min_angle = kPi / 2;
    rep.nearest_nontrivial.assign(fam_u.members.size(), std::numeric_limits<double>::infinity());
    for (const auto& scan : rep.scans) {
        for (const auto& rec : scan.records) {
            ++rep.records;
            rep.min_angle = std::min(rep.min_angle, rec.angle);
            rep.max_mu = std::max(rep.max_mu, rec.mu);
            const int bin = std::min(9, static_cast<int>(rec.angle / (kPi / 2) * 10));
            ++rep.angle_histogram[static_cast<std::size_t>(bin)];
            if (static_cast<int>(rep.mu_histogram.size()) < rec.mu) rep.mu_histogram.resize(static_cast<std::size_t>(rec.mu), 0);
            ++rep.mu_histogram[static_cast<std::size_t>(rec.mu - 1)];
            if (rec.tangency_suspect || rec.angle <= opt.intersect.angle_tol || rec.mu > 1) ++rep.suspects;
            if (rec.counters_disagree) ++rep.disagreements;
            for (std::size_t i = 0; i < fam_u.members.size(); ++i) {
                const double d = distance(rec.point, fam_u.members[i].base);
                if (d > 1e-8) rep.nearest_nontrivial[i] = std::min(rep.nearest_nontrivial[i], d);
            }
        }
    }
    if (rep.records == 0) rep.min_angle = 0.0;
    rep.verdict = rep.suspects == 0 ? "no tangency detected above angle_tol"
                                    : std::to_string(rep.suspects) + " tangency-suspect records";
    return rep;
}

} // namespace henon
