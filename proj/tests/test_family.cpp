#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "henon/family.hpp"

using namespace henon;

namespace {

const HenonMap& horseshoe()
{
    static const HenonMap f = HenonMap::quadratic(0.5, -6.0);
    return f;
}

const CurveFamily& family3()
{
    static const CurveFamily fam = build_saddle_family(horseshoe(), 3);
    return fam;
}

const GrowthProfile& profile3()
{
    static const GrowthProfile p = growth_profile(family3(), {0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    return p;
}

const std::vector<LocalDisk>& disks3()
{
    static const std::vector<LocalDisk> d = local_disks(family3(), 0.5);
    return d;
}

int primitive_points(int d, int n)
{
    int total = static_cast<int>(std::pow(d, n));
    for (int k = 1; k < n; ++k)
        if (n % k == 0) total -= primitive_points(d, k);
    return total;
}

} // namespace

TEST_SUITE("family") {

TEST_CASE("saddle family: member count and normalization")
{
    const CurveFamily& fam = family3();
    int expect = 0;
    for (int n = 1; n <= 3; ++n) expect += primitive_points(2, n);
    CHECK(expect == 10);
    CHECK(fam.members.size() == static_cast<std::size_t>(expect));
    CHECK(fam.skipped == 0);
    for (const auto& m : fam.members)
        for (Side side : {Side::unstable, Side::stable}) {
            const CurveParam& psi = m.curve(side);
            REQUIRE(psi.valid());
            CHECK(psi.base() == m.base);
            CHECK(std::abs(psi.circle_max_green(1.0) - 1.0) <= 1e-6);
        }
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const int s = fam.successor(i);
        CHECK(distance(evaluate(horseshoe(), fam.members[i].base).z, fam.members[static_cast<std::size_t>(s)].base) <= 1e-9);
        CHECK(fam.predecessor(static_cast<std::size_t>(s)) == static_cast<int>(i));
    }
}

TEST_CASE("saddle family: empty at N_max = 0")
{
    const CurveFamily fam = build_saddle_family(horseshoe(), 0);
    CHECK(fam.members.empty());
    CHECK_THROWS_AS(build_saddle_family(horseshoe(), -1), std::invalid_argument);
}

TEST_CASE("distinct members have disjoint disk images")
{
    const CurveFamily& fam = family3();
    const auto& disks = disks3();
    double sep = 1e300;
    for (std::size_t i = 0; i < fam.members.size(); ++i)
        for (std::size_t j = i + 1; j < fam.members.size(); ++j)
            sep = std::min(sep, disk_separation(fam.members[i].unstable, disks[i], fam.members[j].unstable, disks[j]));
    CHECK(sep > 1e-3);
}

TEST_CASE("growth profile and kappa")
{
    const CurveFamily& fam = family3();
    const GrowthProfile& p = profile3();
    for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
        CHECK(p.m_of_r[i] <= p.M_of_r[i]);
        if (i > 0) {
            CHECK(p.m_of_r[i] > p.m_of_r[i - 1]);
            CHECK(p.M_of_r[i] > p.M_of_r[i - 1]);
        }
        if (p.r_grid[i] == 1.0) {
            CHECK(std::abs(p.m_of_r[i] - 1.0) <= 1e-6);
            CHECK(std::abs(p.M_of_r[i] - 1.0) <= 1e-6);
        }
    }
    CHECK(p.kappa > 1.0);
    double Mk = 0.0;
    for (const auto& m : fam.members) Mk = std::max(Mk, m.unstable.circle_max_green(p.kappa));
    CHECK(std::abs(Mk - 2.0) <= 1e-6);

    const auto lam = member_lambdas(fam);
    REQUIRE(lam.size() == fam.members.size());
    for (const auto& l : lam) {
        CHECK(std::abs(l.lambda) >= p.kappa - 1e-4);
        CHECK(std::abs(l.lambda - l.lambda_matched) <= 1e-4);
        // m_{psi_f(x)}(|lambda_x|) = deg
        CHECK(fam.members[static_cast<std::size_t>(l.next)].unstable.circle_max_green(std::abs(l.lambda)) ==
              doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("local disks")
{
    const CurveFamily& fam = family3();
    const auto& disks = disks3();
    double sup_area = 0.0;
    for (std::size_t i = 0; i < disks.size(); ++i) {
        const LocalDisk& d = disks[i];
        CHECK(d.owner == static_cast<int>(i));
        CHECK(d.rho_in > 0.0);
        CHECK(d.rho_in <= d.rho_out);
        CHECK(d.contains(0.0));
        CHECK(d.star_shaped);
        CHECK(d.boundary_error <= 1e-6);
        const CurveParam& psi = fam.members[i].unstable;
        for (std::size_t k = 0; k < d.boundary.size(); k += 17)
            CHECK(std::abs(distance(psi.evaluate(d.boundary[k]).z, psi.base()) - 0.5) <= 1e-6);
        double cross = 0.0;
        for (std::size_t k = 0; k < d.boundary.size(); k += d.boundary.size() / 64)
            cross = std::max(cross, psi.cross_green(d.boundary[k]));
        CHECK(cross <= 1e-8);
        CHECK(std::isfinite(d.area));
        sup_area = std::max(sup_area, d.area);
    }
    CHECK(sup_area < 10.0);
}

TEST_CASE("disks at the default r0 are star-shaped up to period 5")
{
    const CurveFamily fam = build_saddle_family(horseshoe(), 5);
    for (const auto& d : local_disks(fam, 1.0)) CHECK(d.star_shaped);
}

TEST_CASE("Hausdorff continuity on nearby period-5/6 saddles")
{
    const CurveFamily fam = build_saddle_family(horseshoe(), 6);
    const auto disks = local_disks(fam, 0.5);
    struct Pair {
        double delta;
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < fam.members.size(); ++i)
        for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
            const int pi = fam.saddles[static_cast<std::size_t>(fam.members[i].cycle)].period;
            const int pj = fam.saddles[static_cast<std::size_t>(fam.members[j].cycle)].period;
            if (pi >= 5 && pj >= 5) pairs.push_back({distance(fam.members[i].base, fam.members[j].base), i, j});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.delta < b.delta; });
    REQUIRE(pairs.size() > 12);
    for (std::size_t k = 0; k < 12; ++k) {
        const Pair& p = pairs[k];
        const double h = disk_hausdorff(fam.members[p.i].unstable, disks[p.i], fam.members[p.j].unstable, disks[p.j]);
        CHECK(h >= p.delta * (1.0 - 1e-9));
        CHECK(h <= 1.5 * p.delta);
    }
    CHECK(pairs.front().delta < 1e-3);
}

TEST_CASE("recentered family on W^u of a fixed saddle")
{
    const CurveFamily& fam = family3();
    const Saddle& q = fam.saddles[static_cast<std::size_t>(fam.members[0].cycle)];
    const CurveFamily rc = build_recentered_family(horseshoe(), q, 12);
    CHECK(rc.kind == FamilyKind::recentered);
    CHECK(rc.requested == 12);
    REQUIRE(!rc.members.empty());
    CHECK(rc.members.size() <= 24);
    for (const auto& m : rc.members) {
        const CurveParam& psi = m.unstable.valid() ? m.unstable : m.stable;
        CHECK(distance(psi.evaluate(0.0).z, m.base) <= 1e-12 * std::max(1.0, m.base.norm()));
        CHECK(std::abs(psi.circle_max_green(1.0) - 1.0) <= 1e-6);
        double cross = 0.0;
        for (int k = 0; k < 64; ++k) cross = std::max(cross, psi.cross_green(std::polar(0.5, 2.0 * std::numbers::pi * k / 64)));
        CHECK(cross <= 1e-8);
        const Direction own = psi.direction();
        CHECK(in_k(horseshoe(), m.base, own, 16));
    }
}

TEST_CASE("contraction check")
{
    const CurveFamily& fam = family3();
    const GrowthProfile& p = profile3();
    const auto& disks = disks3();
    const Saddle& q = fam.saddles[static_cast<std::size_t>(fam.members[0].cycle)];
    const CurveFamily rc = build_recentered_family(horseshoe(), q, 24);
    const ContractionReport rep = contraction_check(fam, p, disks, &rc);

    int n = 0;
    while (rep.rho1 * std::pow(rep.kappa, n) <= rep.rho2) ++n;
    CHECK(rep.n_threshold == n);
    CHECK(rep.inclusion_samples > 0);
    CHECK(rep.inclusion_failures == 0);
    REQUIRE(rep.slowest >= 0);
    const double lk = std::log(rep.kappa);
    CHECK(std::abs(rep.pairs[static_cast<std::size_t>(rep.slowest)].rate - lk) <= 0.1 * lk);
    for (const auto& pr : rep.pairs) CHECK(pr.rate >= 0.9 * lk);
    CHECK(rep.rates_ok);
    REQUIRE(!rep.escapes.empty());
    for (const auto& e : rep.escapes) {
        CHECK(e.measured > 0);
        CHECK(std::abs(e.measured - e.predicted) <= 2);
    }
}

TEST_CASE("tau on a manufactured family")
{
    auto make = [](double t) {
        CurveFamily fam;
        FamilyMember m;
        m.base = {0.0, 0.0};
        m.unstable = CurveParam(std::make_shared<const SeriesParametrization>(
            polynomial_curve(m.base, {{t, 0.0}, {1.0, 0.0}, {0.0, 1.0}})));
        m.stable = CurveParam(std::make_shared<const SeriesParametrization>(polynomial_curve(m.base, {{0.0, 1.0}})));
        fam.members.push_back(m);
        return fam;
    };
    for (double t : {1e-1, 1e-2, 1e-3}) {
        const auto est = estimate_tau(make(t), {0.0, 0.0});
        REQUIRE(est);
        CHECK(est->tau_u == 1);
        CHECK(est->gamma_u == doctest::Approx(t));
    }
    const auto est = estimate_tau(make(0.0), {0.0, 0.0});
    REQUIRE(est);
    CHECK(est->tau_u == 2);
    CHECK(est->tau_s == 1);
    CHECK(est->gamma_u > 0.0);
    CHECK(est->stratum() == "(1,2)");
    CHECK_FALSE(estimate_tau(make(0.0), {1.0, 0.0}));
}

TEST_CASE("stratification of the horseshoe")
{
    const CurveFamily& fam = family3();
    std::vector<ComplexPair> samples;
    for (const auto& m : fam.members) samples.push_back(m.base);
    samples.push_back({100.0, 100.0});
    const StrataTable st = stratify(fam, samples);
    CHECK(st.samples == static_cast<int>(samples.size()));
    CHECK(st.undefined == 1);
    REQUIRE(st.rows.size() == 1);
    CHECK(st.rows[0].m_s == 1);
    CHECK(st.rows[0].m_u == 1);
    CHECK(st.rows[0].count == 10);
    CHECK(st.rows[0].maximal);
    CHECK(st.fraction_11 == doctest::Approx(10.0 / 11.0));
    for (const auto& m : fam.members) {
        const auto e = estimate_tau(fam, m.base);
        REQUIRE(e);
        CHECK(e->gamma_u > 0.0);
    }
}

}
