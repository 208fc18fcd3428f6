#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "cnls/corrections.hpp"
#include "cnls/errors.hpp"

#include <cmath>
#include <random>

using namespace cnls;

namespace {
std::shared_ptr<const GroundState> gs2()
{
    static auto g = std::make_shared<const GroundState>(solve_ground_state(2));
    return g;
}

Grid ygrid(double half = 26, double h = 0.125)
{
    double o[2] = {0, 0};
    return Grid::covering(2, o, o, half, h);
}

PotentialSpec one_well(Eigen::Vector2d p, Eigen::Vector2d q)
{
    PotentialSpec s;
    s.dim = 2;
    CriticalPoint c;
    c.xi = Eigen::Vector2d::Zero();
    c.p = p;
    c.q = q;
    s.wells.push_back(c);
    return s;
}
} // namespace

TEST_CASE("z0: residual, sign and the FD oracle")
{
    RadialCorrection z = solve_z0_radial(*gs2());
    CHECK(z.residual < 1e-7);
    CHECK(z.wz0_integral < 0);
    double ref = oracle::fd_wz0(1000);
    CHECK(std::abs(z.wz0_integral - ref) / std::abs(ref) < 1e-6);
    // w + x·∇w is mapped to -2w, hence ∫wz0 = -½∫|x|²w²
    CHECK(z.wz0_integral == doctest::Approx(-0.5 * gs2()->moment(2, 1)).epsilon(1e-9));
    CHECK_THROWS_AS(solve_z0_radial(solve_ground_state(3)), NotApplicable);
}

TEST_CASE("zero coefficients give a zero correction")
{
    auto basis = std::make_shared<const CorrectionBasis>(make_profiles(gs2(), coupling_sigmas(1, 2, 5)));
    auto c = solve_correction_pair(0, one_well({0, 0}, {0, 0}), basis, ygrid(14, 0.5));
    CHECK(sup_norm(c.fields.u) == 0);
    CHECK(sup_norm(c.fields.v) == 0);
    CHECK(correction_decay(c.field).slope == 0);
}

TEST_CASE("parallel mode matches the scalar radial equation")
{
    // isotropic coefficients: σ₁W* + σ₂W⋆ = c·z with (-Δ+1-3w²)z = -|y|²w
    ProfilePair pp = make_profiles(gs2(), coupling_sigmas(1, 1, 3));
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    const double p = 0.7, q = 0.3, c = pp.cp.sigma1 * pp.cp.sigma1 * p + pp.cp.sigma2 * pp.cp.sigma2 * q;
    CorrectionField f(basis, one_well({p, p}, {q, q}).wells[0]);

    oracle::FdRadial fd(2, 20.0, 4000);
    std::vector<double> w = fd.ground_state(2.2), cc(w.size()), g(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        cc[i] = 3 * w[i] * w[i];
        g[i] = -fd.r[i] * fd.r[i] * w[i];
    }
    std::vector<double> z = fd.solve(cc, g);
    double err = 0;
    for (size_t i = 0; i < 2400; i += 37) {
        for (double ang : {0.0, 0.6, 1.3}) {
            double y[2] = {fd.r[i] * std::cos(ang), fd.r[i] * std::sin(ang)};
            double a, b;
            f.eval(y, a, b);
            err = std::max(err, std::abs(pp.cp.sigma1 * a + pp.cp.sigma2 * b - c * z[i]));
        }
    }
    CHECK(err < 1e-6);
}

TEST_CASE("integral identities on the y-grid")
{
    double wz0 = solve_z0_radial(*gs2()).wz0_integral;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    struct C {
        double m1, m2, b;
    };
    Grid g = ygrid();
    for (C cc : {C{1, 2, 5}, C{1, 1, -0.5}, C{2, 1, 4}}) {
        ProfilePair pp = make_profiles(gs2(), coupling_sigmas(cc.m1, cc.m2, cc.b));
        auto basis = std::make_shared<const CorrectionBasis>(pp);
        CHECK(basis->residual() < 1e-7);
        PotentialSpec s = one_well({U(rng), U(rng)}, {U(rng), U(rng)});
        auto c = solve_correction_pair(0, s, basis, g);
        CHECK(c.residual < 1e-6 * std::max(1.0, sup_norm(c.fields.u)));
        CorrectionIntegrals I = correction_integrals(pp, c, s, 0, wz0);
        CHECK(I.I_gap() < 1e-5);
        CHECK(I.half_gap() < 1e-5);
        // evenness: y -> -y maps index i to n - i (mod n) on the centred grid
        const int n0 = g.n[0], n1 = g.n[1];
        double odd = 0;
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j) {
                size_t a = size_t(i) * n1 + j, b = size_t((n0 - i) % n0) * n1 + (n1 - j) % n1;
                odd = std::max({odd, std::abs(c.fields.u[a] - c.fields.u[b]), std::abs(c.fields.v[a] - c.fields.v[b])});
            }
        CHECK(odd < 1e-10);
    }
}

TEST_CASE("unit coefficients: I equals a quarter of the second moment")
{
    ProfilePair pp = make_profiles(gs2(), coupling_sigmas(1, 1, 3));
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    PotentialSpec s = one_well({1, 1}, {1, 1});
    auto c = solve_correction_pair(0, s, basis, ygrid());
    oracle::FdRadial fd(2, 20.0, 4000);
    std::vector<double> w = fd.ground_state(2.2), f(w.size());
    for (size_t i = 0; i < w.size(); ++i) f[i] = fd.r[i] * fd.r[i] * w[i] * w[i];
    double m2 = fd.integrate(f);
    CorrectionIntegrals I = correction_integrals(pp, c, s, 0, solve_z0_radial(*gs2()).wz0_integral);
    CHECK(I.I == doctest::Approx(0.25 * m2).epsilon(1e-5));
}

TEST_CASE("grid GMRES fallback agrees with the radial path")
{
    ProfilePair pp = make_profiles(gs2(), coupling_sigmas(1, 2, 5));
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    PotentialSpec s = one_well({0.3, -0.2}, {0.5, 0.1});
    Grid g = ygrid(24, 0.125);
    auto a = solve_correction_pair(0, s, basis, g);
    auto b = solve_correction_pair_grid(0, s, pp, g);
    double d = 0;
    for (size_t i = 0; i < g.size(); ++i)
        d = std::max({d, std::abs(a.fields.u[i] - b.fields.u[i]), std::abs(a.fields.v[i] - b.fields.v[i])});
    CHECK(d < 1e-6 * sup_norm(a.fields.u));
}

TEST_CASE("tail decay")
{
    ProfilePair pp = make_profiles(gs2(), coupling_sigmas(1, 2, 5));
    auto basis = std::make_shared<const CorrectionBasis>(pp);
    CorrectionField f(basis, one_well({0.1, 0.1}, {0.1, 0.15}).wells[0]);
    DecayFit d = correction_decay(f);
    // the algebraic prefactor r^{(N+3)/2} makes the raw secant slope shallow
    CHECK(d.slope < -0.6);
    CHECK(d.reduced_slope < -0.95);
    CHECK(d.reduced_slope > -1.05);
}
