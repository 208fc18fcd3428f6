#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

#include "cnls/errors.hpp"
#include "cnls/profiles.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace cnls;

namespace {
const GroundState& gs2()
{
    static GroundState g = solve_ground_state(2);
    return g;
}
} // namespace

TEST_CASE("1D ground state is the sech soliton")
{
    GroundState g = solve_ground_state(1);
    CHECK(g.w0() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    for (double r : {0.3, 1.7, 4.2})
        CHECK(g.w(r) == doctest::Approx(std::sqrt(2.0) / std::cosh(r)).epsilon(1e-9));
    CHECK(g.moment(2) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("2D ground state against the RK4 shooting oracle")
{
    const GroundState& g = gs2();
    double ref = oracle::shoot_w0(2, 1e-3);
    CHECK(std::abs(g.w0() - ref) / ref < 1e-6);
    CHECK(g.residual < 1e-8);
}

TEST_CASE("ground state invariants")
{
    for (int dim : {1, 2, 3}) {
        GroundState g = solve_ground_state(dim);
        for (size_t i = 0; i + 1 < g.values.size(); ++i) {
            CHECK(g.values[i] > 0);
            if (i > 0) CHECK(g.values[i] < g.values[i - 1]);
        }
        CHECK(g.tail_constant > 0);
        // log w + r + (N-1)/2 log r constant within 1% on [R/2, 3R/4]
        double lo = 1e300, hi = -1e300;
        for (size_t i = 0; i < g.r_grid.size(); ++i) {
            double r = g.r_grid[i];
            if (r < 0.5 * g.r_max || r > 0.75 * g.r_max) continue;
            double c = g.values[i] * std::exp(r) * std::pow(r, 0.5 * (dim - 1));
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        CHECK((hi - lo) / g.tail_constant < 0.01);
    }
}

TEST_CASE("2D virial identities")
{
    const GroundState& g = gs2();
    double m2 = g.moment(2), m4 = g.moment(4);
    CHECK(std::abs(m4 - 2 * m2) / m4 < 1e-6);
    CHECK(std::abs(g.grad_sq() - m2) / m2 < 1e-6);
    CHECK(m2 == doctest::Approx(11.70089652456).epsilon(1e-9));
}

TEST_CASE("ground state text table round-trips bit-exactly")
{
    const GroundState& g = gs2();
    std::ostringstream a;
    write_ground_state(a, g);
    std::istringstream in(a.str());
    GroundState h = read_ground_state(in);
    std::ostringstream b;
    write_ground_state(b, h);
    CHECK(a.str() == b.str());
    CHECK(h.values == g.values);
    CHECK(h.r_grid == g.r_grid);
    CHECK(h.tail_constant == g.tail_constant);
    CHECK(a.str().rfind("# dim=2 rmax=20 tail=", 0) == 0);
}

TEST_CASE("bad inputs")
{
    CHECK_THROWS_AS(solve_ground_state(2, 10.0), ConfigError);
    CHECK_THROWS_AS(solve_ground_state(2, 20.0, 100), ConfigError);
    CHECK_THROWS_AS(solve_ground_state(4), ConfigError);
    std::istringstream bad("dim=2\n1 2\n");
    CHECK_THROWS_AS(read_ground_state(bad), ConfigError);
}

TEST_CASE("coupling sigmas")
{
    CouplingParams cp = coupling_sigmas(1, 1, 3);
    CHECK(cp.sigma1 == doctest::Approx(0.5));
    CHECK(cp.sigma2 == doctest::Approx(0.5));
    CHECK(cp.mu1 * cp.sigma1 * cp.sigma1 + cp.beta * cp.sigma2 * cp.sigma2 == doctest::Approx(1.0));
    try {
        coupling_sigmas(1, 4, 1);
        FAIL("expected inadmissible");
    } catch (const InadmissibleCoupling& e) {
        std::string msg = e.what();
        CHECK(msg.find("(-2, 1)") != std::string::npos);
        CHECK(msg.find("(4, inf)") != std::string::npos);
    }
    CHECK_THROWS_AS(coupling_sigmas(1, 2, 0), InadmissibleCoupling);
    CHECK_THROWS_AS(coupling_sigmas(1, 2, -2), InadmissibleCoupling);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.2, 4.0), B(-5, 10);
    int n = 0;
    while (n < 200) {
        double m1 = U(rng), m2 = U(rng), b = B(rng);
        if (!admissible(m1, m2, b)) continue;
        ++n;
        CouplingParams c = coupling_sigmas(m1, m2, b);
        CHECK(std::abs(m1 * c.sigma1 * c.sigma1 + b * c.sigma2 * c.sigma2 - 1) < 1e-13);
        CHECK(std::abs(m2 * c.sigma2 * c.sigma2 + b * c.sigma1 * c.sigma1 - 1) < 1e-13);
    }
}

TEST_CASE("profile pair")
{
    auto g = std::make_shared<GroundState>(gs2());
    ProfilePair pp = make_profiles(g, coupling_sigmas(1, 1, 3));
    CHECK(pp.w_star(0) == doctest::Approx(0.5 * g->w0()));
    CHECK(pp.residual() < 10 * 1e-8);
    CHECK(pp.cp.s2() * g->moment(2) == doctest::Approx(0.5 * g->moment(2)));
    CHECK_THROWS_AS(make_profiles(g, coupling_sigmas(1, 1, 3), 3), ConfigError);
}
