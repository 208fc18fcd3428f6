#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnls/errors.hpp"
#include "cnls/verify.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>

using namespace cnls;

namespace {
std::shared_ptr<const GroundState> gs2()
{
    static auto g = std::make_shared<const GroundState>(solve_ground_state(2));
    return g;
}

// cubic terms give the ε² peak shift; k = 2 mirrors the cubic on the left well
Problem reference_problem(int k, double scale = 1)
{
    Problem pr;
    pr.pp = make_profiles(gs2(), coupling_sigmas(1, 2, 5));
    pr.spec.dim = 2;
    pr.spec.blend_radius = 5;
    CriticalPoint c;
    c.xi = Eigen::Vector2d(0, 0);
    c.p = Eigen::Vector2d(0.1, 0.1);
    c.q = Eigen::Vector2d(0.1, 0.15);
    c.cubic_p = Eigen::Vector2d(0.02, 0);
    c.cubic_q = Eigen::Vector2d(0.01, 0);
    if (k == 1) {
        pr.spec.wells = {c};
    } else {
        CriticalPoint a = c, b = c;
        a.xi[0] = -11;
        b.xi[0] = 11;
        a.cubic_p = -c.cubic_p;
        a.cubic_q = -c.cubic_q;
        pr.spec.wells = {a, b};
    }
    pr.spec = pr.spec.scaled(scale);
    auto basis = std::make_shared<const CorrectionBasis>(pr.pp);
    for (const auto& w : pr.spec.wells) pr.corrections.emplace_back(basis, w);
    return pr;
}

PeakSet wells_of(const Problem& pr)
{
    PeakSet p;
    for (const auto& w : pr.spec.wells) p.centers.push_back(w.xi);
    return p;
}
} // namespace

TEST_CASE("check reports")
{
    CheckReport a = make_check("a", {1.05}, 1.0, 0.1, Tolerance::relative, Provenance::paper);
    CHECK(a.pass);
    CHECK_FALSE(make_check("b", {1.2}, 1.0, 0.1, Tolerance::relative, Provenance::paper).pass);
    CHECK(make_range_check("c", {2.0}, 1.7, 2.3, Provenance::paper).pass);
    CHECK_FALSE(make_range_check("c", {2.31}, 1.7, 2.3, Provenance::paper).pass);
    CHECK_FALSE(make_bound_check("d", {std::nan("")}, 1, Provenance::trivial).pass);
    CHECK_FALSE(make_bound_check("d", {-1}, 1, Provenance::trivial).pass);

    auto j = nlohmann::json::parse(reports_json({a, make_bound_check("d", {2}, 1, Provenance::derived)}));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["pass"] == true);
    CHECK(j[1]["provenance"] == "DERIVED");
    CHECK(j[0]["tolerance_mode"] == "relative");
    std::ostringstream t;
    write_reports_table(t, {a});
    CHECK(t.str().find("PASS") != std::string::npos);
}

TEST_CASE("order fit")
{
    std::vector<std::pair<double, double>> s, s6;
    for (double e : {0.5, 0.4, 0.3, 0.25, 0.2}) {
        s.push_back({e, e * e});
        s6.push_back({e, 3 * std::pow(e, 6)});
    }
    CHECK(std::abs(order_fit(s).slope - 2) < 1e-12);
    OrderFit f = order_fit(s6);
    CHECK(f.slope == doctest::Approx(6).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK_THROWS_AS(order_fit({{0.5, 1}, {0.4, 1}, {0.3, 1}}), ConfigError);
    CHECK_THROWS_AS(order_fit({{0.5, 1}, {0.4, 1}, {0.3, 0}, {0.2, 1}}), ConfigError);
    std::ostringstream os;
    write_order_fit_csv(os, s, order_fit(s));
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("radial identities and their planted faults")
{
    CHECK(scalar_virial_check(*gs2()).pass);
    CHECK_FALSE(scalar_virial_check(perturbed_ground_state(*gs2(), 1.01, 1)).pass);

    for (auto c : {coupling_sigmas(1, 2, 5), coupling_sigmas(1, 1, -0.5), coupling_sigmas(2, 1, 3)}) {
        for (const auto& r : mass_identity_suite(make_profiles(gs2(), c))) CHECK(r.pass);
        CHECK(sigma_identity_check(c).pass);
        CouplingParams bad = c;
        bad.sigma1 *= 1.01;
        CHECK_FALSE(sigma_identity_check(bad).pass);
    }
    auto amp = std::make_shared<const GroundState>(perturbed_ground_state(*gs2(), 1.01, 1));
    auto dil = std::make_shared<const GroundState>(perturbed_ground_state(*gs2(), 1, 1.01));
    ProfilePair pa = make_profiles(gs2(), coupling_sigmas(1, 2, 5));
    pa.gs = amp;
    CHECK_FALSE(mass_identity_suite(pa)[0].pass);
    pa.gs = dil;
    CHECK_FALSE(mass_identity_suite(pa)[1].pass);

    // continuity in β towards the edge of the admissible set (σ₂ → 0 as β → μ₁ = 1⁻)
    double prev = -1;
    for (double b : {0.5, 0.9, 0.99, 0.999}) {
        CouplingParams c = coupling_sigmas(1, 2, b);
        auto r = mass_identity_suite(make_profiles(gs2(), c));
        CHECK(r[0].pass);
        if (prev >= 0) CHECK(std::abs(r[0].value() - prev) < 1e-9);
        prev = r[0].value();
    }

    const double wz0 = solve_z0_radial(*gs2()).wz0_integral;
    CHECK(z0_identity_check(*gs2(), wz0).pass);
    CHECK_FALSE(z0_identity_check(*gs2(), 1.01 * wz0).pass);
}

TEST_CASE("correction identities and their planted faults")
{
    ProfilePair pp = make_profiles(gs2(), coupling_sigmas(1, 2, 5));
    PotentialSpec spec;
    spec.dim = 2;
    spec.blend_radius = 5;
    CriticalPoint c;
    c.xi = Eigen::Vector2d(0, 0);
    c.p = Eigen::Vector2d(0.3, 0.7);
    c.q = Eigen::Vector2d(1.1, 0.2);
    c.cubic_p = c.cubic_q = Eigen::Vector2d(0, 0);
    spec.wells = {c};
    Grid g;
    g.dim = 2;
    g.n = {416, 416, 1};
    g.h = 0.125;
    g.x0 = {-26, -26, 0};
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    CorrectionPair cpair = solve_correction_pair(0, spec, basis, g);
    const double wz0 = solve_z0_radial(*gs2()).wz0_integral;
    for (const auto& r : correction_identity_checks(pp, cpair, spec, 0, wz0)) CHECK(r.pass);
    for (auto& x : cpair.fields.u) x *= 1.01;
    for (auto& x : cpair.fields.v) x *= 1.01;
    for (const auto& r : correction_identity_checks(pp, cpair, spec, 0, wz0)) CHECK_FALSE(r.pass);
}

TEST_CASE("local Pohozaev identity")
{
    Problem pr = reference_problem(1);
    SolvedState st = solve_at(0.5, pr, {}, 20, 0.15);
    CheckReport r = local_pohozaev_check(st, pr.spec, pr.pp.cp, 0, 1.0, 0);
    CHECK(r.pass);
    // reflection symmetry in x₂: both sides vanish separately
    PohozaevResult s =
        local_pohozaev(st.fields, 0.5, pr.spec, pr.pp.cp, st.peaks.centers[0], 1.0, 1, st.residual_norm);
    CHECK(std::abs(s.volume) < 1e-14);
    CHECK(std::abs(s.boundary) < 1e-14);
    // planted fault: amplitude × 1.01
    SolvedState bad = st;
    for (auto& x : bad.fields.u) x *= 1.01;
    for (auto& x : bad.fields.v) x *= 1.01;
    CHECK_FALSE(local_pohozaev_check(bad, pr.spec, pr.pp.cp, 0, 1.0, 0).pass);
    CHECK_THROWS_AS(local_pohozaev_check(st, pr.spec, pr.pp.cp, 0, 12, 0), ConfigError);
    // the boundary side is exponentially small in 1/ε
    SolvedState st2 = solve_at(0.3, pr, {}, 20, 0.15);
    PohozaevResult s2 =
        local_pohozaev(st2.fields, 0.3, pr.spec, pr.pp.cp, st2.peaks.centers[0], 1.0, 0, st2.residual_norm);
    PohozaevResult s1 =
        local_pohozaev(st.fields, 0.5, pr.spec, pr.pp.cp, st.peaks.centers[0], 1.0, 0, st.residual_norm);
    const double c = -(std::log(s2.boundary_magnitude) - std::log(s1.boundary_magnitude)) / (1 / 0.3 - 1 / 0.5);
    CHECK(c > 0.5);
}

TEST_CASE("gradient balance")
{
    Problem pr = reference_problem(1);
    std::vector<std::pair<double, double>> s;
    for (double e : {0.5, 0.4, 0.3, 0.25, 0.2}) {
        SolvedState st = solve_at(e, pr);
        auto b = balance_check(st, pr.spec, pr.pp.cp);
        REQUIRE(b.size() == 1);
        CHECK(b[0].pass);
        s.push_back({e, b[0].value()});
    }
    const double slope = order_fit(s).slope;
    CHECK(slope >= 1.6);
    CHECK(slope <= 2.4);
    CHECK(balance_doubling_check(0.3, pr).pass);

    Problem flat = reference_problem(1, 0.0);
    SolvedState st = solve_at(0.3, flat);
    CHECK(balance_vector_norms(st, flat.spec, flat.pp.cp)[0] == 0.0);
}

TEST_CASE("lambda-mass relations")
{
    // synthetic N = 2 data from the exact two-term expansion
    MassParams mp{0, 5.0, -2.5, 2, 1};
    std::vector<RelationSample> s;
    for (double lam : {10.0, 20.0, 40.0, 80.0}) s.push_back({5.0 - 2.5 / (lam * lam) + 0.8 / std::pow(lam, 3), lam});
    RelationFit f = lambda_mass_fit(s, mp);
    CHECK(f.A == doctest::Approx(-2.5).epsilon(1e-3));
    CHECK(f.C == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(lambda_mass_relation_check(s, mp).pass);
    MassParams off = mp;
    off.A = -3.0;
    CHECK_FALSE(lambda_mass_relation_check(s, off).pass);
    CHECK_THROWS_AS(lambda_mass_fit({s[0], s[1], s[2]}, mp), ConfigError);

    MassParams m3{0, 2.0, 0, 3, 1};
    std::vector<RelationSample> t;
    for (double r2 : {0.8, 0.4, 0.2, 0.1}) t.push_back({r2, std::pow(2.0 / r2, 2) * (1 + r2)});
    CHECK(lambda_mass_relation_check(t, m3).pass);
    std::swap(t[2], t[3]);
    CHECK_FALSE(lambda_mass_relation_check(t, m3).pass);
    CHECK(lambda_mass_relation_check({t[0], t[1], t[3]}, m3).pass);
    CHECK_THROWS_AS(lambda_mass_fit({t[0], t[1]}, m3), ConfigError);
}

TEST_CASE("mass shift at eps = 0.2")
{
    Problem pr = reference_problem(1);
    SolvedState st = solve_at(0.2, pr);
    const double wz0 = solve_z0_radial(*gs2()).wz0_integral;
    const double r0 = rho0_squared(pr.pp, 1, 2);
    CHECK(mass_shift_check(st, pr.spec, pr.pp.cp, r0, wz0).pass);
    for (auto& x : st.fields.u) x *= 1.01;
    CHECK_FALSE(mass_shift_check(st, pr.spec, pr.pp.cp, r0, wz0).pass);
}

TEST_CASE("uniqueness probe")
{
    // the k = 2, five-restart version is an acceptance criterion; k = 1 keeps this fast
    Problem pr = reference_problem(1);
    const PeakSet p0 = wells_of(pr);
    UniquenessResult z = uniqueness_probe(0.3, pr, p0, 1, 0.0, 7);
    CHECK(z.max_distance == 0.0);
    UniquenessResult r = uniqueness_probe(0.3, pr, p0, 3, 0.05, 7);
    CHECK(r.converged == 3);
    CHECK(uniqueness_check(r).pass);
    UniquenessResult again = uniqueness_probe(0.3, pr, p0, 3, 0.05, 7);
    CHECK(uniqueness_check(again).to_json() == uniqueness_check(r).to_json());
    CheckReport big = uniqueness_check(uniqueness_probe(0.3, pr, p0, 1, 0.5, 7));
    CHECK((big.pass || big.inconclusive));
}
